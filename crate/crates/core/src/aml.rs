//! The family `f(x) = A(x)^m + L(x)` over F_{q^n}, where `L` is a
//! non-permutation linearized polynomial and
//! `A(x) = x^{q^{n-1}} + b x^{q^{n-2}} + b^{1+q^{n-1}} x^{q^{n-3}} + ...`
//! for `b` of norm one.
//!
//! `f` permutes iff `gcd(m, q-1) = 1`, `rank(D) = n - 1`, `s != 0` and
//! `det(B) != 0`. The inverse recovers `A(x)` from `ψ₁(f(x)) = s A(x)^m`
//! and then `x` from `A(x)` and `L(x) = f(x) - A(x)^m` via `β`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::BTreeSet;

use crate::arith;
use crate::certificate::{
    elem_json, elems_json, InverseReport, OracleReport, PermutationCertificate, Verdict,
};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::linalg::{self, Matrix};
use crate::linearized::{checked_det_rank, dickson, LinearizedPoly};
use crate::poly::{
    brute_inverse, is_two_sided_inverse, permutation_check, verify_identity, FieldMap, MapFn,
};

/// `g^{(q-1)t}` for `t = 0 .. (q^n-1)/(q-1) - 1`: every element of norm one.
pub fn enumerate_norm_one_b(ctx: &FieldCtx) -> Vec<Elem> {
    let q1 = ctx.q() - 1;
    (0..ctx.order() / q1).map(|t| ctx.exp(q1 * t)).collect()
}

/// `q^{i}` reduced mod `q^n - 1`.
fn q_pow(ctx: &FieldCtx, i: u64) -> u128 {
    let order = ctx.order() as u128;
    (0..i).fold(1u128, |acc, _| acc * ctx.q() as u128 % order)
}

/// Coefficients of `A`: `c_{n-1} = 1`, `c_{n-2} = b`, and
/// `c_{n-j-2} = b^{1 + q^{n-1} + ... + q^{n-j}}`.
fn a_coeffs(ctx: &FieldCtx, b: Elem) -> Vec<Elem> {
    let n = ctx.n() as u64;
    let order = ctx.order() as u128;
    let mut c = vec![Elem::ZERO; n as usize];
    c[n as usize - 1] = Elem::ONE;
    let mut exp = 1u128;
    for j in 0..n - 1 {
        if j > 0 {
            exp = (exp + q_pow(ctx, n - j)) % order;
        }
        c[(n - j - 2) as usize] = ctx.pow(b, exp as u64);
    }
    c
}

/// The structured map `A`, after checking `A(x)^q = b^q A(x)` everywhere.
pub fn build_a(ctx: &FieldCtx, b: Elem) -> Result<LinearizedPoly> {
    if ctx.n() < 2 {
        return Err(Error::Precondition("A needs n >= 2".into()));
    }
    if ctx.norm_to_subfield(b) != Elem::ONE {
        return Err(Error::Precondition(format!(
            "b = {:?} does not have norm one",
            ctx.coeffs(b)
        )));
    }
    let a = LinearizedPoly::new(ctx, a_coeffs(ctx, b))?;
    let bq = ctx.frobenius(b, 1);
    let lhs = MapFn(|c: &FieldCtx, x| c.frobenius(a.eval(c, x), 1));
    let rhs = MapFn(|c: &FieldCtx, x| c.mul(bq, a.eval(c, x)));
    if !verify_identity(&lhs, &rhs, ctx) {
        return Err(Error::Inconsistent("A(x)^q != b^q A(x)".into()));
    }
    Ok(a)
}

/// Whether the image of `A^m` is `F_q · v` for some nonzero `v`.
pub fn image_power_dimension(ctx: &FieldCtx, a: &LinearizedPoly, m: u64) -> bool {
    let image: BTreeSet<Elem> = ctx.elements().map(|x| ctx.pow(a.eval(ctx, x), m)).collect();
    let Some(&v) = image.iter().find(|x| !x.is_zero()) else {
        return false;
    };
    let line: BTreeSet<Elem> = ctx.subfield().into_iter().map(|c| ctx.mul(c, v)).collect();
    image == line
}

/// Column 0 holds `A`'s coefficients (`x` first); column `j >= 1` row `r`
/// is `a_{(r-j+1) mod n}^{q^{j-1}}`.
pub fn build_b(ctx: &FieldCtx, a: &LinearizedPoly, l: &LinearizedPoly) -> Matrix {
    let n = l.n();
    let (ac, lc) = (a.coeffs(), l.coeffs());
    Matrix::from_fn(n, n, |r, j| {
        if j == 0 {
            ac[r]
        } else {
            ctx.frobenius(lc[(r + n + 1 - j) % n], (j - 1) as u64)
        }
    })
}

/// `(u, v)` with `m u = 1 + v (q - 1)`, `u` the least positive solution;
/// `v` is reduced mod `(q^n - 1)/(q - 1)`, which keeps the congruence mod
/// `q^n - 1`.
pub fn solve_exponents(m: u64, q: u64, n: u32) -> Result<(u64, u64)> {
    let q1 = q.checked_sub(1).filter(|&x| x > 0).ok_or_else(|| {
        Error::Precondition(format!("q = {q} has no multiplicative group to work in"))
    })?;
    let g = arith::gcd(m, q1);
    if g != 1 {
        return Err(Error::NotCoprime {
            a: m,
            b: q1,
            gcd: g,
        });
    }
    let u = (1..=q1)
        .find(|&u| (m as u128 * u as u128) % q1 as u128 == 1 % q1 as u128)
        .expect("m is a unit mod q-1");
    let v = (m as u128 * u as u128 - 1) / q1 as u128;
    let order = (q as u128).pow(n) - 1;
    Ok((u, (v % (order / q1 as u128)) as u64))
}

#[derive(Debug, Clone)]
pub struct AmlParams<'a> {
    ctx: &'a FieldCtx,
    b: Elem,
    m: u64,
    l: LinearizedPoly,
    a: LinearizedPoly,
}

impl<'a> AmlParams<'a> {
    pub fn new(ctx: &'a FieldCtx, b: Elem, m: u64, l: LinearizedPoly) -> Result<Self> {
        if m == 0 {
            return Err(Error::Precondition("m must be positive".into()));
        }
        if l.n() != ctx.n() as usize {
            return Err(Error::Precondition(
                "L has the wrong number of coefficients".into(),
            ));
        }
        let a = build_a(ctx, b)?;
        if !linalg::det(ctx, &dickson(ctx, &l)).is_zero() {
            return Err(Error::Precondition(
                "L is a permutation; the criterion assumes it is not".into(),
            ));
        }
        Ok(AmlParams { ctx, b, m, l, a })
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn b(&self) -> Elem {
        self.b
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn l(&self) -> &LinearizedPoly {
        &self.l
    }

    pub fn a(&self) -> &LinearizedPoly {
        &self.a
    }

    pub fn map(&self) -> AmlMap<'_> {
        AmlMap {
            a: &self.a,
            l: &self.l,
            m: self.m,
        }
    }
}

/// `x ↦ A(x)^m + L(x)`.
#[derive(Debug, Clone, Copy)]
pub struct AmlMap<'p> {
    a: &'p LinearizedPoly,
    l: &'p LinearizedPoly,
    m: u64,
}

impl FieldMap for AmlMap<'_> {
    fn apply(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        ctx.add(ctx.pow(self.a.eval(ctx, x), self.m), self.l.eval(ctx, x))
    }
}

/// `s = α_1 + α_2 b^{qm} + ... + α_n b^{m(q + ... + q^{n-1})}`.
pub fn s_value(ctx: &FieldCtx, b: Elem, m: u64, alpha: &[Elem]) -> Elem {
    let order = ctx.order() as u128;
    let mut exp = 0u128;
    let mut s = Elem::ZERO;
    for (i, &al) in alpha.iter().enumerate() {
        if i > 0 {
            exp = (exp + q_pow(ctx, i as u64)) % order;
        }
        let e = exp * (m as u128 % order) % order;
        s = ctx.add(s, ctx.mul(al, ctx.pow(b, e as u64)));
    }
    s
}

/// Every quantity the criterion and the inverse depend on.
#[derive(Debug, Clone)]
pub struct AmlAnalysis {
    pub gcd: u64,
    pub d: Matrix,
    pub rank_d: usize,
    pub b_matrix: Matrix,
    pub det_b: Elem,
    pub alpha: Option<Vec<Elem>>,
    pub s: Option<Elem>,
    pub beta: Option<Vec<Elem>>,
    pub exponents: Option<(u64, u64)>,
}

impl AmlAnalysis {
    pub fn conditions(&self, n: usize) -> [(&'static str, bool); 4] {
        [
            ("gcd(m, q-1) = 1", self.gcd == 1),
            ("rank(D) = n-1", self.rank_d + 1 == n),
            ("s != 0", self.s.is_some_and(|s| !s.is_zero())),
            ("det(B) != 0", !self.det_b.is_zero()),
        ]
    }

    pub fn is_permutation(&self, n: usize) -> bool {
        self.conditions(n).iter().all(|c| c.1)
    }
}

pub fn analyze(params: &AmlParams) -> AmlAnalysis {
    let ctx = params.ctx;
    let n = ctx.n() as usize;
    let d = dickson(ctx, &params.l);
    let (_, rank_d) =
        checked_det_rank(ctx, &params.l).expect("Dickson rank matches the kernel of L");
    let b_matrix = build_b(ctx, &params.a, &params.l);
    let det_b = linalg::det(ctx, &b_matrix);
    let alpha = (rank_d + 1 == n)
        .then(|| linalg::nullspace_vec(ctx, &d.transpose()).ok())
        .flatten();
    let s = alpha
        .as_ref()
        .map(|al| s_value(ctx, params.b, params.m, al));
    let mut e1 = vec![Elem::ZERO; n];
    e1[0] = Elem::ONE;
    let beta = linalg::solve_unique(ctx, &b_matrix, &e1).ok();
    AmlAnalysis {
        gcd: arith::gcd(params.m, ctx.q() - 1),
        d,
        rank_d,
        b_matrix,
        det_b,
        alpha,
        s,
        beta,
        exponents: solve_exponents(params.m, ctx.q(), ctx.n()).ok(),
    }
}

/// `β₁ b^{-qv} s^{-u} ψ₁(x)^u + (β₂x + ... + β_n x^{q^{n-2}}) ∘ (x - b^{-qvm} s^{-um} ψ₁(x)^{um})`.
#[derive(Debug, Clone)]
pub struct AmlInverse {
    psi: LinearizedPoly,
    tail: LinearizedPoly,
    c1: Elem,
    c2: Elem,
    u: u64,
    um: u64,
}

impl FieldMap for AmlInverse {
    fn apply(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        let p = self.psi.eval(ctx, x);
        let a_of_x = ctx.mul(self.c1, ctx.pow(p, self.u));
        let l_of_x = ctx.sub(x, ctx.mul(self.c2, ctx.pow(p, self.um)));
        ctx.add(a_of_x, self.tail.eval(ctx, l_of_x))
    }
}

impl AmlInverse {
    /// `ψ₁(x) = α₁x + α₂x^q + ... + α_n x^{q^{n-1}}`.
    pub fn psi(&self) -> &LinearizedPoly {
        &self.psi
    }
}

pub fn inverse(params: &AmlParams) -> Result<AmlInverse> {
    inverse_from(params, &analyze(params))
}

fn inverse_from(params: &AmlParams, an: &AmlAnalysis) -> Result<AmlInverse> {
    let ctx = params.ctx;
    let n = ctx.n() as usize;
    if !an.is_permutation(n) {
        return Err(Error::NotBijective);
    }
    let alpha = an.alpha.clone().expect("rank n-1");
    let beta = an.beta.as_ref().expect("det(B) != 0");
    let s = an.s.expect("rank n-1");
    let (u, v) = an.exponents.expect("gcd 1");
    let order = ctx.order() as u128;
    let m = params.m as u128 % order;
    let (u, v) = (u as u128 % order, v as u128 % order);
    let q = ctx.q() as u128;
    // b^{-qv} s^{-u} and b^{-qvm} s^{-um}, as inverse powers.
    let bs = |e_b: u128, e_s: u128| -> Result<Elem> {
        let t = ctx.mul(ctx.pow(params.b, e_b as u64), ctx.pow(s, e_s as u64));
        ctx.inv(t)
    };
    let c1 = ctx.mul(beta[0], bs(q * v % order, u)?);
    let c2 = bs(q * v % order * m % order, u * m % order)?;
    let mut tail = beta[1..].to_vec();
    tail.push(Elem::ZERO);
    Ok(AmlInverse {
        psi: LinearizedPoly::new(ctx, alpha)?,
        tail: LinearizedPoly::new(ctx, tail)?,
        c1,
        c2,
        u: u as u64,
        um: (u * m % order) as u64,
    })
}

fn params_json(params: &AmlParams) -> Map<String, Value> {
    let ctx = params.ctx;
    let mut m = Map::new();
    m.insert("b".into(), elem_json(ctx, params.b));
    m.insert("m".into(), params.m.into());
    m.insert("L".into(), elems_json(ctx, params.l.coeffs()));
    m
}

/// Criterion sub-verdicts, derived quantities, oracle and (for
/// permutations) the validated inverse.
pub fn criterion(params: &AmlParams) -> PermutationCertificate {
    let ctx = params.ctx;
    let n = ctx.n() as usize;
    let an = analyze(params);
    let mut cert = PermutationCertificate::new("aml", ctx);
    cert.params = params_json(params);
    for (name, holds) in an.conditions(n) {
        cert.condition(name, holds);
    }
    cert.verdict = Verdict::from_bool(an.is_permutation(n));

    let d = &mut cert.derived;
    d.insert("A".into(), elems_json(ctx, params.a.coeffs()));
    d.insert("gcd_m_q_minus_1".into(), an.gcd.into());
    d.insert("rank_D".into(), an.rank_d.into());
    d.insert("det_B".into(), elem_json(ctx, an.det_b));
    d.insert(
        "alpha".into(),
        an.alpha
            .as_ref()
            .map_or(Value::Null, |a| elems_json(ctx, a)),
    );
    d.insert("s".into(), an.s.map_or(Value::Null, |s| elem_json(ctx, s)));
    d.insert(
        "beta".into(),
        an.beta.as_ref().map_or(Value::Null, |b| elems_json(ctx, b)),
    );
    d.insert("u".into(), an.exponents.map_or(Value::Null, |e| e.0.into()));
    d.insert("v".into(), an.exponents.map_or(Value::Null, |e| e.1.into()));

    let f = params.map();
    let table = permutation_check(ctx, &f);
    cert.oracle.push(OracleReport {
        map: "f".into(),
        bijective: table.bijective,
        image_size: table.image_size(),
    });

    if cert.verdict.is_permutation() {
        let report = match inverse_from(params, &an) {
            Ok(inv) => InverseReport {
                map: "f".into(),
                validated: is_two_sided_inverse(ctx, &f, &inv),
                matches_oracle_table: brute_inverse(&table)
                    .is_ok_and(|t| verify_identity(&inv, &t, ctx)),
                notes: Map::new(),
            },
            Err(e) => {
                let mut notes = Map::new();
                notes.insert("error".into(), e.to_string().into());
                InverseReport {
                    map: "f".into(),
                    validated: false,
                    matches_oracle_table: false,
                    notes,
                }
            }
        };
        cert.inverse.push(report);
    }
    cert
}

/// `ψ₁(f(x)) = s A(x)^m` for all `x`; vacuous unless `rank(D) = n - 1`.
pub fn psi_identity_holds(params: &AmlParams) -> bool {
    let ctx = params.ctx;
    let an = analyze(params);
    let (Some(alpha), Some(s)) = (an.alpha, an.s) else {
        return true;
    };
    let psi = LinearizedPoly::new(ctx, alpha).expect("n coefficients");
    let f = params.map();
    let a = &params.a;
    let m = params.m;
    verify_identity(
        &MapFn(|c: &FieldCtx, x| psi.eval(c, f.apply(c, x))),
        &MapFn(|c: &FieldCtx, x| c.mul(s, c.pow(a.eval(c, x), m))),
        ctx,
    )
}

/// `f(x) - A(x)^m = L(x)` for all `x`.
pub fn difference_identity_holds(params: &AmlParams) -> bool {
    let f = params.map();
    let (a, m) = (&params.a, params.m);
    verify_identity(
        &MapFn(|c: &FieldCtx, x| c.sub(f.apply(c, x), c.pow(a.eval(c, x), m))),
        &params.l,
        params.ctx,
    )
}

/// Columns `1..n` of `B` are the first `n - 1` rows of `D`, transposed.
pub fn b_columns_match_dickson(ctx: &FieldCtx, a: &LinearizedPoly, l: &LinearizedPoly) -> bool {
    let b = build_b(ctx, a, l);
    let d = dickson(ctx, l);
    (1..l.n()).all(|j| b.col(j) == d.row(j - 1))
}

/// Every linearized polynomial over `ctx` with a singular Dickson matrix,
/// in coefficient enumeration order.
pub fn all_singular_linearized(ctx: &FieldCtx) -> Vec<LinearizedPoly> {
    let n = ctx.n() as usize;
    let size = ctx.size();
    let total = size
        .checked_pow(n as u32)
        .expect("coefficient space fits in u64");
    (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let coeffs = (0..n)
                .map(|_| {
                    let c = Elem((idx % size) as u32);
                    idx /= size;
                    c
                })
                .collect();
            let l = LinearizedPoly::new(ctx, coeffs).expect("n coefficients");
            linalg::det(ctx, &dickson(ctx, &l)).is_zero().then_some(l)
        })
        .collect()
}

/// A uniformly random singular linearized polynomial, by rejection.
pub fn random_singular_linearized<R: Rng>(ctx: &FieldCtx, rng: &mut R) -> LinearizedPoly {
    loop {
        let coeffs = (0..ctx.n())
            .map(|_| Elem(rng.gen_range(0..ctx.size()) as u32))
            .collect();
        let l = LinearizedPoly::new(ctx, coeffs).expect("n coefficients");
        if linalg::det(ctx, &dickson(ctx, &l)).is_zero() {
            return l;
        }
    }
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub b: Vec<u32>,
    pub m: u64,
    #[serde(rename = "L")]
    pub l: Vec<Vec<u32>>,
    pub gcd_ok: bool,
    pub rank_d: usize,
    pub s_nonzero: Option<bool>,
    pub det_b_nonzero: bool,
    pub verdict: Verdict,
    pub oracle_bijective: bool,
    /// `None` when the verdict is not a permutation.
    pub inverse_valid: Option<bool>,
}

impl SweepRow {
    pub fn consistent(&self) -> bool {
        self.verdict.is_permutation() == self.oracle_bijective && self.inverse_valid != Some(false)
    }
}

/// How often `s != 0` and `det(B) != 0` occur together, among rows with
/// `rank(D) = n - 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct JointCounts {
    pub s_and_det: usize,
    pub s_only: usize,
    pub det_only: usize,
    pub neither: usize,
}

impl JointCounts {
    pub fn tally(rows: &[SweepRow]) -> Self {
        let mut c = JointCounts::default();
        for r in rows {
            match (r.s_nonzero, r.det_b_nonzero) {
                (Some(true), true) => c.s_and_det += 1,
                (Some(true), false) => c.s_only += 1,
                (Some(false), true) => c.det_only += 1,
                (Some(false), false) => c.neither += 1,
                (None, _) => {}
            }
        }
        c
    }
}

pub fn sweep_row(params: &AmlParams) -> SweepRow {
    let cert = criterion(params);
    let ctx = params.ctx;
    let an = analyze(params);
    SweepRow {
        b: ctx.coeffs(params.b),
        m: params.m,
        l: params.l.to_listing(ctx),
        gcd_ok: an.gcd == 1,
        rank_d: an.rank_d,
        s_nonzero: an.s.map(|s| !s.is_zero()),
        det_b_nonzero: !an.det_b.is_zero(),
        verdict: cert.verdict,
        oracle_bijective: cert.oracle[0].bijective,
        inverse_valid: cert
            .inverse
            .first()
            .map(|i| i.validated && i.matches_oracle_table),
    }
}

/// Every norm-one `b`, `m` in `1..=m_max`, and every singular `L`; rows in
/// (b, m, L) enumeration order.
pub fn sweep_exhaustive(ctx: &FieldCtx, m_max: u64) -> Vec<SweepRow> {
    let ls = all_singular_linearized(ctx);
    let bs = enumerate_norm_one_b(ctx);
    let mut tuples = Vec::with_capacity(bs.len() * m_max as usize * ls.len());
    for &b in &bs {
        for m in 1..=m_max {
            tuples.extend(ls.iter().map(|l| (b, m, l)));
        }
    }
    run_sweep(ctx, tuples)
}

/// `count` random tuples: uniform norm-one `b`, `m` in `1..=m_max`, and a
/// uniform singular `L`, drawn from a seeded generator.
pub fn sweep_sampled(ctx: &FieldCtx, m_max: u64, count: usize, seed: u64) -> Vec<SweepRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bs = enumerate_norm_one_b(ctx);
    let tuples: Vec<(Elem, u64, LinearizedPoly)> = (0..count)
        .map(|_| {
            let b = *bs.choose(&mut rng).expect("b = 1 is always present");
            let m = rng.gen_range(1..=m_max);
            (b, m, random_singular_linearized(ctx, &mut rng))
        })
        .collect();
    run_sweep(ctx, tuples.iter().map(|(b, m, l)| (*b, *m, l)).collect())
}

fn run_sweep(ctx: &FieldCtx, tuples: Vec<(Elem, u64, &LinearizedPoly)>) -> Vec<SweepRow> {
    tuples
        .into_par_iter()
        .map(|(b, m, l)| {
            let params =
                AmlParams::new(ctx, b, m, l.clone()).expect("sweep tuples satisfy the hypotheses");
            sweep_row(&params)
        })
        .collect()
}
