//! Sparse polynomials over F_{q^n}, pointwise evaluation, the brute-force
//! permutation oracle, and exhaustive identity checking.
//!
//! Nothing here composes polynomials symbolically. Every composition claim is
//! decided by evaluating both sides at every field element.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};

/// Fields at least this large are scanned in parallel.
const PAR_THRESHOLD: u64 = 1 << 12;

/// Anything that can be evaluated at every point of a field.
pub trait FieldMap: Sync {
    fn apply(&self, ctx: &FieldCtx, x: Elem) -> Elem;
}

/// Adapter for closures.
pub struct MapFn<F>(pub F);

impl<F: Fn(&FieldCtx, Elem) -> Elem + Sync> FieldMap for MapFn<F> {
    fn apply(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        (self.0)(ctx, x)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl FieldMap for Identity {
    fn apply(&self, _ctx: &FieldCtx, x: Elem) -> Elem {
        x
    }
}

/// `outer ∘ inner`.
pub struct Compose<'a, O: ?Sized, I: ?Sized> {
    pub outer: &'a O,
    pub inner: &'a I,
}

impl<O: FieldMap + ?Sized, I: FieldMap + ?Sized> FieldMap for Compose<'_, O, I> {
    fn apply(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        self.outer.apply(ctx, self.inner.apply(ctx, x))
    }
}

pub fn compose<'a, O: FieldMap + ?Sized, I: FieldMap + ?Sized>(
    outer: &'a O,
    inner: &'a I,
) -> Compose<'a, O, I> {
    Compose { outer, inner }
}

impl<T: FieldMap + ?Sized> FieldMap for Box<T> {
    fn apply(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        (**self).apply(ctx, x)
    }
}

/// Reduces an exponent for storage: 0 stays 0 (a constant term), anything
/// else lands in [1, q^n - 1]. Values at nonzero points are unchanged, and a
/// nonconstant monomial still vanishes at 0. Negative exponents therefore
/// read as "value 0 at 0".
pub fn reduce_exponent(ctx: &FieldCtx, e: &BigInt) -> u64 {
    if e.is_zero() {
        return 0;
    }
    let order = BigInt::from(ctx.order());
    let r = (e - 1u32).mod_floor(&order) + 1u32;
    r.to_u64().expect("reduced exponent fits in u64")
}

/// Finite map exponent -> nonzero coefficient. Exponents are stored reduced
/// (see [`reduce_exponent`]), unique, and never carry a zero coefficient.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SparsePoly {
    terms: BTreeMap<u64, Elem>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(ctx: &FieldCtx, coeff: Elem, e: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(ctx, coeff, e);
        p
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(1, Elem::ONE);
        SparsePoly { terms }
    }

    pub fn from_terms<E: Into<BigInt>>(
        ctx: &FieldCtx,
        terms: impl IntoIterator<Item = (E, Elem)>,
    ) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(ctx, c, e);
        }
        p
    }

    /// Adds `coeff · x^e`, merging with any term of equal reduced exponent.
    pub fn add_term(&mut self, ctx: &FieldCtx, coeff: Elem, e: impl Into<BigInt>) {
        if coeff.is_zero() {
            return;
        }
        let e = reduce_exponent(ctx, &e.into());
        let slot = self.terms.entry(e).or_insert(Elem::ZERO);
        *slot = ctx.add(*slot, coeff);
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, ctx: &FieldCtx, other: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (&e, &c) in &other.terms {
            out.add_term(ctx, c, e);
        }
        out
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Elem) -> SparsePoly {
        let mut out = SparsePoly::zero();
        for (&e, &t) in &self.terms {
            out.add_term(ctx, ctx.mul(c, t), e);
        }
        out
    }

    pub fn neg(&self, ctx: &FieldCtx) -> SparsePoly {
        self.scale(ctx, ctx.from_int(-1))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, Elem)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, e: u64) -> Elem {
        self.terms.get(&e).copied().unwrap_or(Elem::ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        if x.is_zero() {
            return self.coeff(0);
        }
        ctx.sum(self.terms.iter().map(|(&e, &c)| ctx.mul(c, ctx.pow(x, e))))
    }

    /// `coeffs` as `(exponent, coefficient list)` pairs for printing.
    pub fn to_listing(&self, ctx: &FieldCtx) -> Vec<(u64, Vec<u32>)> {
        self.terms().map(|(e, c)| (e, ctx.coeffs(c))).collect()
    }
}

impl FieldMap for SparsePoly {
    fn apply(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        self.eval(ctx, x)
    }
}

/// `(c1 x^e1 + c2 x^e2)^k`, expanded binomially.
pub fn binomial_power(
    ctx: &FieldCtx,
    (c1, e1): (Elem, u64),
    (c2, e2): (Elem, u64),
    k: u64,
) -> SparsePoly {
    let mut out = SparsePoly::zero();
    for j in 0..=k {
        let binom = crate::arith::binomial_mod_p(k, j, ctx.p());
        if binom == 0 {
            continue;
        }
        let c = ctx.mul(
            ctx.from_int(binom as i64),
            ctx.mul(ctx.pow(c1, j), ctx.pow(c2, k - j)),
        );
        let e = BigInt::from(e1) * j + BigInt::from(e2) * (k - j);
        out.add_term(ctx, c, e);
    }
    out
}

/// `(x^q - x)^k` as a sparse polynomial.
pub fn trace_kernel_power(ctx: &FieldCtx, k: u64) -> SparsePoly {
    if k == 0 {
        return SparsePoly::monomial(ctx, Elem::ONE, 0);
    }
    binomial_power(ctx, (Elem::ONE, ctx.q()), (ctx.from_int(-1), 1), k)
}

/// Images of a map in enumeration order, with the bijectivity verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueTable {
    pub images: Vec<Elem>,
    pub bijective: bool,
}

impl ValueTable {
    pub fn from_images(ctx: &FieldCtx, images: Vec<Elem>) -> Self {
        let mut seen = vec![false; ctx.size() as usize];
        let mut distinct = 0usize;
        for &y in &images {
            if !std::mem::replace(&mut seen[y.0 as usize], true) {
                distinct += 1;
            }
        }
        let bijective = distinct == ctx.size() as usize;
        ValueTable { images, bijective }
    }

    pub fn image_size(&self) -> usize {
        let mut v = self.images.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    pub fn get(&self, x: Elem) -> Elem {
        self.images[x.0 as usize]
    }

    /// JSON-ready form: one coefficient list per domain index.
    pub fn to_json(&self, ctx: &FieldCtx) -> ValueTableJson {
        ValueTableJson {
            field: ctx.spec_string(),
            bijective: self.bijective,
            images: self.images.iter().map(|&y| ctx.coeffs(y)).collect(),
        }
    }

    /// One hex value per line (the image's enumeration index), when each
    /// element fits in 16 bits.
    pub fn to_sbox_hex(&self, ctx: &FieldCtx) -> Result<String> {
        let bits = 64 - (ctx.size() - 1).leading_zeros();
        if bits > 16 {
            return Err(Error::Precondition(format!(
                "S-box export needs at most 16 bits per element, field needs {bits}"
            )));
        }
        let width = (bits.max(1) as usize).div_ceil(4);
        let mut out = String::with_capacity(self.images.len() * (width + 1));
        for y in &self.images {
            out.push_str(&format!("{:0width$x}\n", y.0));
        }
        Ok(out)
    }
}

impl FieldMap for ValueTable {
    fn apply(&self, _ctx: &FieldCtx, x: Elem) -> Elem {
        self.get(x)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueTableJson {
    pub field: String,
    pub bijective: bool,
    pub images: Vec<Vec<u32>>,
}

/// Parses the hex S-box format back into a table.
pub fn parse_sbox_hex(ctx: &FieldCtx, text: &str) -> Result<ValueTable> {
    let images = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            u32::from_str_radix(l.trim(), 16)
                .ok()
                .and_then(|v| ctx.element(v as u64))
                .ok_or_else(|| Error::MalformedElement(format!("bad S-box line {l:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if images.len() as u64 != ctx.size() {
        return Err(Error::MalformedElement(format!(
            "S-box has {} entries, field has {}",
            images.len(),
            ctx.size()
        )));
    }
    Ok(ValueTable::from_images(ctx, images))
}

/// Full image table of `f` and its bijectivity.
pub fn permutation_check<M: FieldMap + ?Sized>(ctx: &FieldCtx, f: &M) -> ValueTable {
    let images = if ctx.size() >= PAR_THRESHOLD {
        (0..ctx.size() as u32)
            .into_par_iter()
            .map(|i| f.apply(ctx, Elem(i)))
            .collect()
    } else {
        ctx.elements().map(|x| f.apply(ctx, x)).collect()
    };
    ValueTable::from_images(ctx, images)
}

/// The inverse permutation of a bijective table.
pub fn brute_inverse(table: &ValueTable) -> Result<ValueTable> {
    if !table.bijective {
        return Err(Error::NotBijective);
    }
    let mut inv = vec![Elem::ZERO; table.images.len()];
    for (i, y) in table.images.iter().enumerate() {
        inv[y.0 as usize] = Elem(i as u32);
    }
    Ok(ValueTable {
        images: inv,
        bijective: true,
    })
}

/// First point where the two maps disagree, in enumeration order.
pub fn find_mismatch<L, R>(ctx: &FieldCtx, lhs: &L, rhs: &R) -> Option<Elem>
where
    L: FieldMap + ?Sized,
    R: FieldMap + ?Sized,
{
    let differs = |x: Elem| lhs.apply(ctx, x) != rhs.apply(ctx, x);
    if ctx.size() >= PAR_THRESHOLD {
        (0..ctx.size() as u32)
            .into_par_iter()
            .map(Elem)
            .find_first(|&x| differs(x))
    } else {
        ctx.elements().find(|&x| differs(x))
    }
}

/// `lhs(x) == rhs(x)` for every x in the field.
pub fn verify_identity<L, R>(lhs: &L, rhs: &R, ctx: &FieldCtx) -> bool
where
    L: FieldMap + ?Sized,
    R: FieldMap + ?Sized,
{
    find_mismatch(ctx, lhs, rhs).is_none()
}

/// `f ∘ g = id` and `g ∘ f = id` exhaustively.
pub fn is_two_sided_inverse<F, G>(ctx: &FieldCtx, f: &F, g: &G) -> bool
where
    F: FieldMap + ?Sized,
    G: FieldMap + ?Sized,
{
    verify_identity(&compose(f, g), &Identity, ctx)
        && verify_identity(&compose(g, f), &Identity, ctx)
}

/// Coefficients of the unique polynomial of degree < q^n interpolating the
/// table: c_0 = F(0), c_j = -Σ_a F(a) a^(q^n-1-j) for j >= 1. Quadratic in
/// the field size; display only.
pub fn lagrange_densify(ctx: &FieldCtx, table: &ValueTable) -> SparsePoly {
    let order = ctx.order();
    let mut out = SparsePoly::zero();
    out.add_term(ctx, table.get(Elem::ZERO), 0);
    for j in 1..=order {
        let s = ctx.sum(ctx.elements().map(|a| {
            let e = order - j;
            ctx.mul(table.get(a), ctx.pow(a, e))
        }));
        out.add_term(ctx, ctx.neg(s), j);
    }
    out
}

/// x^e with the value-at-0 = 0 convention for every e, including those
/// congruent to 0.
pub fn pow_vanishing(ctx: &FieldCtx, x: Elem, e: &BigInt) -> Elem {
    if x.is_zero() {
        Elem::ZERO
    } else {
        ctx.pow_big(x, e).expect("nonzero base")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    #[test]
    fn eval_examples() {
        let f27 = make_field(3, 1, 3).unwrap();
        let x5 = SparsePoly::monomial(&f27, Elem::ONE, 5);
        assert_eq!(x5.eval(&f27, Elem::ZERO), Elem::ZERO);
        let minus_one = f27.from_int(-1);
        let f = SparsePoly::from_terms(&f27, [(1, minus_one), (5, Elem::ONE), (15, Elem::ONE)]);
        assert_eq!(f.eval(&f27, Elem::ONE), Elem::ONE);

        let f9 = make_field(3, 1, 2).unwrap();
        let g = SparsePoly::x().add(&f9, &trace_kernel_power(&f9, 2));
        for c in f9.subfield() {
            assert_eq!(g.eval(&f9, c), c);
        }
    }

    #[test]
    fn constant_term_survives_at_zero() {
        let ctx = make_field(3, 1, 2).unwrap();
        let p = SparsePoly::from_terms(&ctx, [(0, ctx.from_int(2)), (3, Elem::ONE)]);
        assert_eq!(p.eval(&ctx, Elem::ZERO), ctx.from_int(2));
    }

    #[test]
    fn exponent_reduction() {
        let ctx = make_field(3, 1, 2).unwrap();
        assert_eq!(reduce_exponent(&ctx, &BigInt::from(0)), 0);
        assert_eq!(reduce_exponent(&ctx, &BigInt::from(8)), 8);
        assert_eq!(reduce_exponent(&ctx, &BigInt::from(9)), 1);
        assert_eq!(reduce_exponent(&ctx, &BigInt::from(16)), 8);
        assert_eq!(reduce_exponent(&ctx, &BigInt::from(-1)), 7);
        // x^8 is the indicator of nonzero, distinct from the constant 1.
        let ind = SparsePoly::monomial(&ctx, Elem::ONE, 16);
        assert_eq!(ind.eval(&ctx, Elem::ZERO), Elem::ZERO);
        assert_eq!(ind.eval(&ctx, ctx.from_int(2)), Elem::ONE);
    }

    #[test]
    fn square_binomial_matches_hand_expansion() {
        // (x^3 - x)^2 = x^6 - 2x^4 + x^2 over F_3.
        let ctx = make_field(3, 1, 2).unwrap();
        let sq = trace_kernel_power(&ctx, 2);
        let expected = SparsePoly::from_terms(
            &ctx,
            [(6, Elem::ONE), (4, ctx.from_int(-2)), (2, Elem::ONE)],
        );
        assert_eq!(sq, expected);
    }

    #[test]
    fn merging_cancels() {
        let ctx = make_field(3, 1, 2).unwrap();
        let mut p = SparsePoly::monomial(&ctx, Elem::ONE, 1);
        p.add_term(&ctx, ctx.from_int(2), 9);
        assert!(p.is_empty());
    }

    #[test]
    fn permutation_check_examples() {
        let ctx = make_field(3, 1, 2).unwrap();
        assert!(permutation_check(&ctx, &SparsePoly::x()).bijective);
        let sq = SparsePoly::monomial(&ctx, Elem::ONE, 2);
        assert!(!permutation_check(&ctx, &sq).bijective);
        let two_cube = SparsePoly::monomial(&ctx, ctx.from_int(2), 3);
        let t = permutation_check(&ctx, &two_cube);
        assert!(t.bijective);
        // 2x^3 is an involution on F_9.
        let inv = brute_inverse(&t).unwrap();
        assert_eq!(inv, t);
        assert!(brute_inverse(&permutation_check(&ctx, &sq)).is_err());
    }

    #[test]
    fn frobenius_inverse_table() {
        let ctx = make_field(3, 1, 3).unwrap();
        let cube = permutation_check(&ctx, &SparsePoly::monomial(&ctx, Elem::ONE, 3));
        let ninth = permutation_check(&ctx, &SparsePoly::monomial(&ctx, Elem::ONE, 9));
        assert_eq!(brute_inverse(&cube).unwrap(), ninth);
        let id = permutation_check(&ctx, &SparsePoly::x());
        assert_eq!(brute_inverse(&id).unwrap(), id);
    }

    #[test]
    fn densify_reproduces_table() {
        let ctx = make_field(3, 1, 2).unwrap();
        let f =
            SparsePoly::from_terms(&ctx, [(3, ctx.from_int(2)), (1, Elem::ONE), (5, Elem::ONE)]);
        let t = permutation_check(&ctx, &f);
        let dense = lagrange_densify(&ctx, &t);
        assert!(verify_identity(&dense, &f, &ctx));
        // x^5 + x^3·2 + x already has degree < 9, so interpolation recovers it.
        assert_eq!(dense, f);
    }

    #[test]
    fn sbox_roundtrip() {
        let ctx = make_field(3, 1, 3).unwrap();
        let f = SparsePoly::monomial(&ctx, Elem::ONE, 5);
        let t = permutation_check(&ctx, &f);
        let hex = t.to_sbox_hex(&ctx).unwrap();
        assert_eq!(hex.lines().count(), 27);
        assert!(hex.lines().all(|l| l.len() == 2));
        assert_eq!(parse_sbox_hex(&ctx, &hex).unwrap(), t);
        let big = make_field(2, 1, 17).unwrap();
        assert!(permutation_check(&big, &SparsePoly::x())
            .to_sbox_hex(&big)
            .is_err());
    }

    #[test]
    fn identity_checker_reports_mismatch() {
        let ctx = make_field(3, 1, 2).unwrap();
        let f = SparsePoly::monomial(&ctx, Elem::ONE, 3);
        assert!(verify_identity(&compose(&f, &Identity), &f, &ctx));
        assert_eq!(
            find_mismatch(&ctx, &f, &Identity),
            Some(ctx.from_coeffs(&[0, 1]).unwrap())
        );
    }
}
