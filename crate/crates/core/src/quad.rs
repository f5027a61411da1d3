//! The family `f(x) = a x^q + b x + (x^q - x)^k` over F_{q^2}.
//!
//! Two parameter regimes are covered:
//!
//! * [`QuadCase::A`]: `a + b ∈ F_q^*`, with `k >= 2` even or `q` even. The
//!   map permutes iff `b != a^q`, because `(f(x))^q - f(x) = (b - a^q)(x^q - x)`.
//! * [`QuadCase::B`]: `b = a^q`, `q` and `k` odd, `a + a^q != 0`. The map
//!   permutes iff `gcd(k, q - 1) = 1`; here `(f(x))^q - f(x) = -2 (x^q - x)^k`.
//!
//! Inverses come from eliminating `x^q` between `x^q - x = ψ(y)` and the
//! defining equation. The two possible orientations of that elimination
//! are both built and the survivor is chosen by exhaustive validation; see
//! [`SignVariant`].

use num_integer::Integer;
use serde_json::{Map, Value};

use crate::arith;
use crate::certificate::{elem_json, InverseReport, OracleReport, PermutationCertificate, Verdict};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::poly::{
    brute_inverse, is_two_sided_inverse, permutation_check, trace_kernel_power, verify_identity,
    MapFn, SparsePoly,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum QuadCase {
    A,
    B,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadParams<'a> {
    ctx: &'a FieldCtx,
    a: Elem,
    b: Elem,
    k: u64,
    case: QuadCase,
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}

impl<'a> QuadParams<'a> {
    pub fn new(ctx: &'a FieldCtx, a: Elem, b: Elem, k: u64, case: QuadCase) -> Result<Self> {
        require(ctx.n() == 2, || {
            format!("family lives over F_(q^2), field has n = {}", ctx.n())
        })?;
        require(k >= 1, || "k must be positive".into())?;
        let q = ctx.q();
        match case {
            QuadCase::A => {
                let s = ctx.add(a, b);
                require(!s.is_zero() && ctx.in_subfield(s), || {
                    "case A needs a + b in F_q^*".into()
                })?;
                require(
                    (k >= 2 && k.is_multiple_of(2)) || (k % 2 == 1 && q.is_multiple_of(2)),
                    || format!("case A needs k >= 2 even, or k odd with q even (k = {k}, q = {q})"),
                )?;
            }
            QuadCase::B => {
                require(q % 2 == 1, || "case B needs q odd".into())?;
                require(k % 2 == 1, || "case B needs k odd".into())?;
                require(b == ctx.frobenius(a, 1), || "case B needs b = a^q".into())?;
                require(!ctx.add(a, b).is_zero(), || {
                    "case B needs a + a^q != 0".into()
                })?;
            }
        }
        Ok(QuadParams { ctx, a, b, k, case })
    }

    /// Case B parameters, `b = a^q`.
    pub fn case_b(ctx: &'a FieldCtx, a: Elem, k: u64) -> Result<Self> {
        Self::new(ctx, a, ctx.frobenius(a, 1), k, QuadCase::B)
    }

    /// Case A if its hypotheses hold, else case B.
    pub fn detect(ctx: &'a FieldCtx, a: Elem, b: Elem, k: u64) -> Result<Self> {
        Self::new(ctx, a, b, k, QuadCase::A).or_else(|ea| {
            Self::new(ctx, a, b, k, QuadCase::B)
                .map_err(|eb| Error::Precondition(format!("neither case applies: {ea}; {eb}")))
        })
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn a(&self) -> Elem {
        self.a
    }

    pub fn b(&self) -> Elem {
        self.b
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn case(&self) -> QuadCase {
        self.case
    }

    fn params_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("a".into(), elem_json(self.ctx, self.a));
        m.insert("b".into(), elem_json(self.ctx, self.b));
        m.insert("k".into(), self.k.into());
        m.insert("case".into(), format!("{:?}", self.case).into());
        m
    }
}

pub fn build_f(params: &QuadParams) -> SparsePoly {
    let ctx = params.ctx;
    let mut f = trace_kernel_power(ctx, params.k);
    f.add_term(ctx, params.a, ctx.q());
    f.add_term(ctx, params.b, 1u32);
    f
}

/// `(u, v)` with `u k + v (q - 1) = 1` and `0 < u < q - 1` (`u = 1` when
/// `q = 2`).
pub fn solve_uv(k: u64, q: u64) -> Result<(u64, i64)> {
    let m = q.checked_sub(1).filter(|&m| m > 0).ok_or_else(|| {
        Error::Precondition(format!("q = {q} has no multiplicative group to work in"))
    })?;
    let g = arith::gcd(k, m);
    if g != 1 {
        return Err(Error::NotCoprime { a: k, b: m, gcd: g });
    }
    let ext = (k as i128).extended_gcd(&(m as i128));
    let mut u = ext.x.rem_euclid(m as i128);
    if u == 0 {
        u = m as i128;
    }
    let v = (1 - u * k as i128) / m as i128;
    debug_assert_eq!(u * k as i128 + v * m as i128, 1);
    Ok((u as u64, v as i64))
}

/// Which orientation of the elimination step the inverse comes from.
///
/// With `s = a + b` and `ψ` the recovered value of `x^q - x`:
///
/// * `AsPrinted`: `s^{-1}(ψ^k - aψ - y)`, from reading the defining relation
///   as `a x^q + b x = ψ^k - f`.
/// * `Reoriented`: `s^{-1}(y - ψ^k - aψ)`, from `a x^q + b x = f - ψ^k`, which
///   is what the definition of `f` gives.
///
/// In characteristic 2 the two coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignVariant {
    AsPrinted,
    Reoriented,
}

/// `ψ(y)` and `ψ(y)^k` as sparse polynomials.
fn psi_terms(params: &QuadParams) -> Result<(SparsePoly, SparsePoly)> {
    let ctx = params.ctx;
    let k = params.k;
    match params.case {
        QuadCase::A => {
            let c = ctx.inv(ctx.sub(params.b, ctx.frobenius(params.a, 1)))?;
            let psi = trace_kernel_power(ctx, 1).scale(ctx, c);
            let psi_k = trace_kernel_power(ctx, k).scale(ctx, ctx.pow(c, k));
            Ok((psi, psi_k))
        }
        QuadCase::B => {
            let (u, v) = solve_uv(k, ctx.q())?;
            let kappa = h_inverse_scalar(ctx, u, v)?;
            let psi = trace_kernel_power(ctx, u).scale(ctx, kappa);
            let psi_k = trace_kernel_power(ctx, k * u).scale(ctx, ctx.pow(kappa, k));
            Ok((psi, psi_k))
        }
    }
}

/// `(-1)^v (-2)^{-u}`, the scalar of `h^{-1}(x) = (-1)^v (-2)^{-u} x^u` for
/// `h(x) = -2 x^k`.
pub fn h_inverse_scalar(ctx: &FieldCtx, u: u64, v: i64) -> Result<Elem> {
    let minus_one = ctx.from_int(-1);
    let minus_two = ctx.from_int(-2);
    Ok(ctx.mul(
        ctx.pow_signed(minus_one, v)?,
        ctx.pow_signed(minus_two, -(u as i64))?,
    ))
}

pub fn inverse_candidate(params: &QuadParams, variant: SignVariant) -> Result<SparsePoly> {
    let ctx = params.ctx;
    let s_inv = ctx.inv(ctx.add(params.a, params.b))?;
    let (psi, psi_k) = psi_terms(params)?;
    let a_psi = psi.scale(ctx, params.a);
    let body = match variant {
        SignVariant::AsPrinted => psi_k
            .add(ctx, &a_psi.neg(ctx))
            .add(ctx, &SparsePoly::x().neg(ctx)),
        SignVariant::Reoriented => SparsePoly::x()
            .add(ctx, &psi_k.neg(ctx))
            .add(ctx, &a_psi.neg(ctx)),
    };
    Ok(body.scale(ctx, s_inv))
}

/// A closed-form inverse together with how the sign question was settled.
#[derive(Debug, Clone)]
pub struct ResolvedInverse {
    pub poly: SparsePoly,
    pub survivor: SignVariant,
    pub as_printed_valid: bool,
    pub reoriented_valid: bool,
}

/// Builds both orientations and keeps the one that inverts `f` on the
/// whole field, preferring `Reoriented` when both do.
pub fn resolve_inverse(params: &QuadParams) -> Result<ResolvedInverse> {
    let ctx = params.ctx;
    let f = build_f(params);
    let printed = inverse_candidate(params, SignVariant::AsPrinted)?;
    let reoriented = inverse_candidate(params, SignVariant::Reoriented)?;
    let as_printed_valid = is_two_sided_inverse(ctx, &f, &printed);
    let reoriented_valid = is_two_sided_inverse(ctx, &f, &reoriented);
    let (poly, survivor) = if reoriented_valid {
        (reoriented, SignVariant::Reoriented)
    } else if as_printed_valid {
        (printed, SignVariant::AsPrinted)
    } else {
        return Err(Error::InverseValidation(format!(
            "neither sign variant inverts f for a = {:?}, b = {:?}, k = {}, case {:?}",
            ctx.coeffs(params.a),
            ctx.coeffs(params.b),
            params.k,
            params.case
        )));
    };
    Ok(ResolvedInverse {
        poly,
        survivor,
        as_printed_valid,
        reoriented_valid,
    })
}

pub fn inverse_case_a(params: &QuadParams) -> Result<ResolvedInverse> {
    require(params.case == QuadCase::A, || {
        "parameters are not case A".into()
    })?;
    require(is_permutation_by_criterion(params), || {
        "b = a^q: not a permutation".into()
    })?;
    resolve_inverse(params)
}

pub fn inverse_case_b(params: &QuadParams) -> Result<ResolvedInverse> {
    require(params.case == QuadCase::B, || {
        "parameters are not case B".into()
    })?;
    require(is_permutation_by_criterion(params), || {
        "gcd(k, q - 1) != 1: not a permutation".into()
    })?;
    resolve_inverse(params)
}

pub fn is_permutation_by_criterion(params: &QuadParams) -> bool {
    let ctx = params.ctx;
    match params.case {
        QuadCase::A => params.b != ctx.frobenius(params.a, 1),
        QuadCase::B => arith::gcd(params.k, ctx.q() - 1) == 1,
    }
}

/// Decides the criterion, runs the oracle, and for permutations validates
/// the closed-form inverse.
pub fn criterion(params: &QuadParams) -> PermutationCertificate {
    let ctx = params.ctx;
    let q = ctx.q();
    let mut cert = PermutationCertificate::new("quad", ctx);
    cert.params = params.params_json();

    match params.case {
        QuadCase::A => {
            let d = ctx.sub(params.b, ctx.frobenius(params.a, 1));
            cert.derived.insert("b_minus_a_q".into(), elem_json(ctx, d));
            cert.condition("b != a^q", !d.is_zero());
        }
        QuadCase::B => {
            let g = arith::gcd(params.k, q - 1);
            cert.derived.insert("gcd_k_q_minus_1".into(), g.into());
            cert.condition("gcd(k, q-1) = 1", g == 1);
            if let Ok((u, v)) = solve_uv(params.k, q) {
                cert.derived.insert("u".into(), u.into());
                cert.derived.insert("v".into(), v.into());
            }
        }
    }
    cert.verdict = Verdict::from_bool(is_permutation_by_criterion(params));

    let f = build_f(params);
    let table = permutation_check(ctx, &f);
    cert.oracle.push(OracleReport {
        map: "f".into(),
        bijective: table.bijective,
        image_size: table.image_size(),
    });

    if cert.verdict.is_permutation() {
        let mut report = InverseReport {
            map: "f".into(),
            validated: false,
            matches_oracle_table: false,
            notes: Map::new(),
        };
        match resolve_inverse(params) {
            Ok(inv) => {
                report.validated = true;
                report.matches_oracle_table = brute_inverse(&table)
                    .map(|t| verify_identity(&inv.poly, &t, ctx))
                    .unwrap_or(false);
                report.notes.insert(
                    "survivor".into(),
                    serde_json::to_value(inv.survivor).unwrap(),
                );
                report
                    .notes
                    .insert("as_printed_valid".into(), inv.as_printed_valid.into());
                report
                    .notes
                    .insert("reoriented_valid".into(), inv.reoriented_valid.into());
                report.notes.insert("terms".into(), inv.poly.len().into());
            }
            Err(e) => {
                report.notes.insert("error".into(), e.to_string().into());
            }
        }
        cert.inverse.push(report);
    }
    cert
}

/// `(f(x))^q - f(x)` equals `(b - a^q)(x^q - x)` in case A and
/// `-2 (x^q - x)^k` in case B, at every point.
pub fn commuting_identity_holds(params: &QuadParams) -> bool {
    let ctx = params.ctx;
    let f = build_f(params);
    let lhs = MapFn(|c: &FieldCtx, x: Elem| {
        let y = f.eval(c, x);
        c.sub(c.frobenius(y, 1), y)
    });
    let rhs: SparsePoly = match params.case {
        QuadCase::A => {
            let d = ctx.sub(params.b, ctx.frobenius(params.a, 1));
            trace_kernel_power(ctx, 1).scale(ctx, d)
        }
        QuadCase::B => trace_kernel_power(ctx, params.k).scale(ctx, ctx.from_int(-2)),
    };
    verify_identity(&lhs, &rhs, ctx)
}

/// `(x^q - x)^{q-1}` is 0 on F_q and -1 elsewhere (q odd).
pub fn kernel_power_piecewise_holds(ctx: &FieldCtx) -> bool {
    let q = ctx.q();
    let minus_one = ctx.from_int(-1);
    ctx.elements().all(|x| {
        let t = ctx.sub(ctx.frobenius(x, 1), x);
        let v = ctx.pow(t, q - 1);
        if ctx.in_subfield(x) {
            v.is_zero()
        } else {
            v == minus_one
        }
    })
}

/// `h^{-1}(h(s)) = s` on `S = {x^q - x}` for `h(x) = -2x^k`.
pub fn h_inverse_holds(ctx: &FieldCtx, k: u64) -> Result<bool> {
    let (u, v) = solve_uv(k, ctx.q())?;
    let kappa = h_inverse_scalar(ctx, u, v)?;
    let minus_two = ctx.from_int(-2);
    Ok(ctx.elements().all(|x| {
        let s = ctx.sub(ctx.frobenius(x, 1), x);
        let hs = ctx.mul(minus_two, ctx.pow(s, k));
        ctx.mul(kappa, ctx.pow(hs, u)) == s
    }))
}

/// Every parameter tuple satisfying the hypotheses, for `k` in the given
/// range: case A over all `(a, b)` with `a + b ∈ F_q^*`, then case B over
/// all admissible `a` (odd `q` only). Canonical order.
pub fn enumerate_instances(
    ctx: &FieldCtx,
    ks: std::ops::RangeInclusive<u64>,
) -> Vec<QuadParams<'_>> {
    let mut out = Vec::new();
    for k in ks.clone() {
        for a in ctx.elements() {
            for b in ctx.elements() {
                if let Ok(p) = QuadParams::new(ctx, a, b, k, QuadCase::A) {
                    out.push(p);
                }
            }
        }
    }
    if ctx.q() % 2 == 1 {
        for k in ks.filter(|k| k % 2 == 1) {
            for a in ctx.elements() {
                if let Ok(p) = QuadParams::case_b(ctx, a, k) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, serde::Serialize)]
pub struct QuadSweepRow {
    pub case: QuadCase,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub k: u64,
    pub verdict: Verdict,
    pub oracle_bijective: bool,
    /// `None` when the verdict is not a permutation.
    pub inverse_valid: Option<bool>,
    pub survivor: Option<SignVariant>,
    /// Whether the printed orientation also inverts `f`.
    pub as_printed_valid: Option<bool>,
}

impl QuadSweepRow {
    pub fn consistent(&self) -> bool {
        self.verdict.is_permutation() == self.oracle_bijective && self.inverse_valid != Some(false)
    }
}

pub fn sweep_row(params: &QuadParams) -> QuadSweepRow {
    let ctx = params.ctx;
    let cert = criterion(params);
    let inv = cert.inverse.first();
    QuadSweepRow {
        case: params.case,
        a: ctx.coeffs(params.a),
        b: ctx.coeffs(params.b),
        k: params.k,
        verdict: cert.verdict,
        oracle_bijective: cert.oracle[0].bijective,
        inverse_valid: inv.map(|r| r.validated && r.matches_oracle_table),
        survivor: inv
            .and_then(|r| r.notes.get("survivor"))
            .and_then(|v| serde_json::from_value(v.clone()).ok()),
        as_printed_valid: inv
            .and_then(|r| r.notes.get("as_printed_valid"))
            .and_then(|v| v.as_bool()),
    }
}

/// [`enumerate_instances`] evaluated in parallel, rows in canonical order.
pub fn sweep(ctx: &FieldCtx, ks: std::ops::RangeInclusive<u64>) -> Vec<QuadSweepRow> {
    use rayon::prelude::*;
    enumerate_instances(ctx, ks)
        .par_iter()
        .map(sweep_row)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn f9() -> FieldCtx {
        make_field(3, 1, 2).unwrap()
    }

    #[test]
    fn build_f_examples() {
        let ctx = f9();
        let p = QuadParams::new(&ctx, Elem::ZERO, Elem::ONE, 2, QuadCase::A).unwrap();
        let expected = SparsePoly::from_terms(
            &ctx,
            [
                (1, Elem::ONE),
                (6, Elem::ONE),
                (4, ctx.from_int(-2)),
                (2, Elem::ONE),
            ],
        );
        assert_eq!(build_f(&p), expected);

        let p = QuadParams::case_b(&ctx, Elem::ONE, 3).unwrap();
        assert_eq!(p.b(), Elem::ONE);
        let f = build_f(&p);
        let direct = MapFn(|c: &FieldCtx, x: Elem| {
            let t = c.sub(c.pow(x, 3), x);
            c.sum([c.pow(x, 3), x, c.pow(t, 3)])
        });
        assert!(verify_identity(&f, &direct, &ctx));

        let f16 = make_field(2, 2, 2).unwrap();
        let p = QuadParams::new(&f16, Elem::ZERO, Elem::ONE, 3, QuadCase::A).unwrap();
        let direct = MapFn(|c: &FieldCtx, x: Elem| {
            let t = c.add(c.pow(x, 4), x);
            c.add(x, c.pow(t, 3))
        });
        assert!(verify_identity(&build_f(&p), &direct, &f16));
    }

    #[test]
    fn hypothesis_violations() {
        let ctx = f9();
        // a + b = 0.
        assert!(QuadParams::new(&ctx, Elem::ONE, ctx.from_int(-1), 2, QuadCase::A).is_err());
        // k odd with q odd in case A.
        assert!(QuadParams::new(&ctx, Elem::ZERO, Elem::ONE, 3, QuadCase::A).is_err());
        // a + b outside F_3.
        let i = ctx.from_coeffs(&[0, 1]).unwrap();
        assert!(QuadParams::new(&ctx, Elem::ZERO, i, 2, QuadCase::A).is_err());
        // k even in case B.
        assert!(QuadParams::case_b(&ctx, Elem::ONE, 2).is_err());
        // a + a^q = 0 for a = i.
        assert!(QuadParams::case_b(&ctx, i, 3).is_err());
        // n != 2.
        let f27 = make_field(3, 1, 3).unwrap();
        assert!(QuadParams::new(&f27, Elem::ZERO, Elem::ONE, 2, QuadCase::A).is_err());
    }

    #[test]
    fn criterion_examples() {
        let ctx = f9();
        let p = QuadParams::new(&ctx, Elem::ZERO, Elem::ONE, 2, QuadCase::A).unwrap();
        let c = criterion(&p);
        assert_eq!(c.verdict, Verdict::Permutation);
        assert!(c.is_consistent());

        let p = QuadParams::new(&ctx, Elem::ONE, Elem::ONE, 2, QuadCase::A).unwrap();
        let c = criterion(&p);
        assert_eq!(c.verdict, Verdict::NotPermutation);
        assert!(!c.oracle[0].bijective);
        assert!(c.is_consistent());

        let p = QuadParams::case_b(&ctx, Elem::ONE, 3).unwrap();
        let c = criterion(&p);
        assert_eq!(c.verdict, Verdict::Permutation);
        assert!(c.is_consistent());
    }

    #[test]
    fn solve_uv_examples() {
        assert_eq!(solve_uv(5, 7).unwrap(), (5, -4));
        assert_eq!(solve_uv(1, 7).unwrap(), (1, 0));
        assert_eq!(solve_uv(1, 3).unwrap(), (1, 0));
        assert_eq!(solve_uv(3, 3).unwrap(), (1, -1));
        assert_eq!(solve_uv(3, 5).unwrap(), (3, -2));
        assert_eq!(
            solve_uv(3, 7),
            Err(Error::NotCoprime { a: 3, b: 6, gcd: 3 })
        );
    }

    #[test]
    fn printed_sign_fails_at_small_case() {
        // q = 3, a = 0, b = 1, k = 2: x - (x^3 - x)^2 inverts f, while the
        // printed orientation gives its negative.
        let ctx = f9();
        let p = QuadParams::new(&ctx, Elem::ZERO, Elem::ONE, 2, QuadCase::A).unwrap();
        let r = inverse_case_a(&p).unwrap();
        assert_eq!(r.survivor, SignVariant::Reoriented);
        assert!(!r.as_printed_valid);
        let expected = SparsePoly::x().add(&ctx, &trace_kernel_power(&ctx, 2).neg(&ctx));
        assert_eq!(r.poly, expected);
        let printed = inverse_candidate(&p, SignVariant::AsPrinted).unwrap();
        assert_eq!(printed, expected.neg(&ctx));
        // Fixes F_3 pointwise.
        for c in ctx.subfield() {
            assert_eq!(r.poly.eval(&ctx, c), c);
        }
    }

    #[test]
    fn characteristic_two_variants_coincide() {
        let ctx = make_field(2, 2, 2).unwrap();
        let p = QuadParams::new(&ctx, Elem::ZERO, Elem::ONE, 3, QuadCase::A).unwrap();
        let r = inverse_case_a(&p).unwrap();
        assert!(r.as_printed_valid && r.reoriented_valid);
        assert_eq!(
            inverse_candidate(&p, SignVariant::AsPrinted).unwrap(),
            inverse_candidate(&p, SignVariant::Reoriented).unwrap()
        );
    }

    #[test]
    fn case_b_inverses() {
        for (p, k) in [(3u64, 3u64), (5, 3)] {
            let ctx = make_field(p, 1, 2).unwrap();
            let params = QuadParams::case_b(&ctx, Elem::ONE, k).unwrap();
            let r = inverse_case_b(&params).unwrap();
            assert!(r.reoriented_valid);
            assert_eq!(r.poly.eval(&ctx, Elem::ZERO), Elem::ZERO);
        }
        // gcd(3, 6) = 3 at q = 7: refused.
        let ctx = make_field(7, 1, 2).unwrap();
        let params = QuadParams::case_b(&ctx, Elem::ONE, 3).unwrap();
        assert!(inverse_case_b(&params).is_err());
        assert!(inverse_case_a(&params).is_err());
    }

    #[test]
    fn identities_at_q3() {
        let ctx = f9();
        assert!(kernel_power_piecewise_holds(&ctx));
        assert!(h_inverse_holds(&ctx, 3).unwrap());
        for p in enumerate_instances(&ctx, 1..=6) {
            assert!(commuting_identity_holds(&p), "{:?}", p);
        }
    }
}
