//! Exact arithmetic in F_{q^n}, q = p^e.
//!
//! The field is realized once as F_p[x]/(m(x)) with deg m = e·n, where m is
//! the lexicographically smallest monic irreducible polynomial of that degree
//! (coefficients compared from x^{e·n-1} down to the constant). The
//! q-Frobenius is the (p^e)-power map, which fixes exactly the q-element
//! subfield.
//!
//! An [`Elem`] is stored as the integer whose base-p digits are its
//! little-endian coefficients in the modulus basis. That integer is also the
//! element's position in the canonical enumeration order, so `Elem(0)` is
//! zero, `Elem(1)` is one, and `Elem(c)` for `c < p` is the prime-field
//! constant `c`. Multiplication goes through discrete log / exp tables built
//! from the first primitive element in enumeration order.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, fp_poly};
use crate::error::{Error, Result};

/// Default upper bound on the number of field elements.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 22;

/// A field element, identified by its enumeration index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Immutable description of F_{q^n}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    p: u32,
    e: u32,
    n: u32,
    size: u32,
    q: u64,
    modulus: Vec<u32>,
    generator: Elem,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// Builds F_{q^n} with q = p^e using the default size cap.
pub fn make_field(p: u64, e: u32, n: u32) -> Result<FieldCtx> {
    FieldCtx::with_cap(p, e, n, DEFAULT_FIELD_CAP)
}

impl FieldCtx {
    pub fn new(p: u64, e: u32, n: u32) -> Result<Self> {
        make_field(p, e, n)
    }

    pub fn with_cap(p: u64, e: u32, n: u32, cap: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 || n == 0 {
            return Err(Error::InvalidField(format!(
                "e = {e} and n = {n} must both be positive"
            )));
        }
        let degree = e as u64 * n as u64;
        let cap = cap.min(u32::MAX as u64);
        let too_large = Error::FieldTooLarge { p, degree, cap };
        let mut size = 1u64;
        for _ in 0..degree {
            size = size.checked_mul(p).ok_or(too_large.clone())?;
            if size > cap {
                return Err(too_large);
            }
        }
        let q = p.pow(e);
        let d = degree as usize;

        let digits = |mut idx: u64| -> Vec<u64> {
            let mut out = Vec::with_capacity(d);
            for _ in 0..d {
                out.push(idx % p);
                idx /= p;
            }
            fp_poly::trim(out)
        };
        let index_of =
            |poly: &[u64]| -> u32 { poly.iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32 };

        // Counting the tail with the constant as least significant digit
        // visits monic polynomials in lexicographic order from the top.
        let modulus: Vec<u64> = (0..size)
            .map(|tail| {
                let mut f = digits(tail);
                f.resize(d, 0);
                f.push(1);
                f
            })
            .find(|f| fp_poly::is_irreducible(f, p))
            .expect("an irreducible polynomial exists in every degree");

        let order = size - 1;
        let factors = arith::prime_factors(order);
        let one = fp_poly::rem(&[1], &modulus, p);
        let generator_poly = (1..size)
            .map(digits)
            .find(|g| {
                fp_poly::pow_mod(g, order, &modulus, p) == one
                    && factors
                        .iter()
                        .all(|r| fp_poly::pow_mod(g, order / r, &modulus, p) != one)
            })
            .expect("the multiplicative group is cyclic");

        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; size as usize];
        let mut cur = one.clone();
        for (i, slot) in exp.iter_mut().enumerate() {
            let idx = index_of(&cur);
            *slot = idx;
            log[idx as usize] = i as u32;
            cur = fp_poly::mul_mod(&cur, &generator_poly, &modulus, p);
        }

        Ok(FieldCtx {
            p: p as u32,
            e,
            n,
            size: size as u32,
            q,
            modulus: modulus.into_iter().map(|c| c as u32).collect(),
            generator: Elem(index_of(&generator_poly)),
            exp,
            log,
        })
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    /// Degree of the subfield F_q over F_p.
    pub fn e(&self) -> u32 {
        self.e
    }

    /// Degree of F_{q^n} over F_q.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Degree of F_{q^n} over F_p.
    pub fn degree(&self) -> u32 {
        self.e * self.n
    }

    pub fn size(&self) -> u64 {
        self.size as u64
    }

    /// q^n - 1 as a machine integer.
    pub fn order(&self) -> u64 {
        self.size as u64 - 1
    }

    /// q^n - 1 as an arbitrary-precision integer.
    pub fn order_minus_one(&self) -> BigUint {
        BigUint::from(self.order())
    }

    /// Monic modulus, little-endian coefficients, length `degree + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn primitive_element(&self) -> Elem {
        self.generator
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.size).map(Elem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (1..self.size).map(Elem)
    }

    pub fn element(&self, index: u64) -> Option<Elem> {
        (index < self.size as u64).then_some(Elem(index as u32))
    }

    /// Image of an integer under Z -> F_p -> F_{q^n}.
    pub fn from_int(&self, c: i64) -> Elem {
        Elem(c.rem_euclid(self.p as i64) as u32)
    }

    /// Element from little-endian base-p coefficients. Shorter lists are
    /// zero-padded; every coefficient must already lie in [0, p).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        if coeffs.len() > self.degree() as usize {
            return Err(Error::MalformedElement(format!(
                "{} coefficients given, field degree is {}",
                coeffs.len(),
                self.degree()
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::MalformedElement(format!(
                "coefficient {c} is not reduced mod {}",
                self.p
            )));
        }
        let idx = coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64);
        Ok(Elem(idx as u32))
    }

    /// Canonical little-endian coefficient vector of length `degree`.
    pub fn coeffs(&self, x: Elem) -> Vec<u32> {
        let mut idx = x.0;
        (0..self.degree())
            .map(|_| {
                let c = idx % self.p;
                idx /= self.p;
                c
            })
            .collect()
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let p = self.p;
        let (mut x, mut y) = (a.0, b.0);
        let (mut acc, mut w) = (0u32, 1u32);
        while x > 0 || y > 0 {
            acc += ((x % p + y % p) % p) * w;
            x /= p;
            y /= p;
            w = w.wrapping_mul(p);
        }
        Elem(acc)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut x = a.0;
        let (mut acc, mut w) = (0u32, 1u32);
        while x > 0 {
            acc += ((p - x % p) % p) * w;
            x /= p;
            w = w.wrapping_mul(p);
        }
        Elem(acc)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        let order = self.order();
        let l = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % order;
        Elem(self.exp[l as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let order = self.order();
        let l = (order - self.log[a.0 as usize] as u64) % order;
        Ok(Elem(self.exp[l as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Discrete logarithm to the base of the primitive element.
    pub fn log(&self, a: Elem) -> Option<u64> {
        (!a.is_zero()).then(|| self.log[a.0 as usize] as u64)
    }

    /// g^i for the primitive element g.
    pub fn exp(&self, i: u64) -> Elem {
        Elem(self.exp[(i % self.order()) as usize])
    }

    /// x^e for a machine exponent. `0^0` evaluates to one here; use
    /// [`FieldCtx::pow_big`] where that case must be rejected.
    pub fn pow(&self, x: Elem, e: u64) -> Elem {
        if x.is_zero() {
            return if e == 0 { Elem::ONE } else { Elem::ZERO };
        }
        let order = self.order() as u128;
        let l = (self.log[x.0 as usize] as u128 * (e as u128 % order)) % order;
        Elem(self.exp[l as usize])
    }

    /// x^e for a signed arbitrary-precision exponent, reduced mod q^n - 1
    /// on nonzero bases.
    pub fn pow_big(&self, x: Elem, e: &BigInt) -> Result<Elem> {
        if x.is_zero() {
            return if e.is_positive() {
                Ok(Elem::ZERO)
            } else if e.is_zero() {
                Err(Error::ZeroToZero)
            } else {
                Err(Error::DivisionByZero)
            };
        }
        let r = e.mod_floor(&BigInt::from(self.order()));
        Ok(self.pow(x, r.to_u64().expect("reduced below q^n - 1")))
    }

    /// x^e for a signed machine exponent; same semantics as `pow_big`.
    pub fn pow_signed(&self, x: Elem, e: i64) -> Result<Elem> {
        self.pow_big(x, &BigInt::from(e))
    }

    /// x^(q^j), with j taken mod n.
    pub fn frobenius(&self, x: Elem, j: u64) -> Elem {
        if x.is_zero() {
            return x;
        }
        let j = j % self.n as u64;
        let order = self.order() as u128;
        let mut l = self.log[x.0 as usize] as u128;
        for _ in 0..j {
            l = l * self.q as u128 % order;
        }
        Elem(self.exp[l as usize])
    }

    /// x^((q^n - 1)/(q - 1)), landing in F_q.
    pub fn norm_to_subfield(&self, x: Elem) -> Elem {
        self.pow(x, self.order() / (self.q - 1))
    }

    pub fn in_subfield(&self, x: Elem) -> bool {
        self.frobenius(x, 1) == x
    }

    /// Elements of the q-element subfield, in enumeration order.
    pub fn subfield(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.in_subfield(x)).collect()
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, it: I) -> Elem {
        it.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    /// Short `p:e:n` label.
    pub fn spec_string(&self) -> String {
        format!("{}:{}:{}", self.p, self.e, self.n)
    }
}

/// Parsed field specification, `p:e:n` or `p^e^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub n: u32,
}

impl std::str::FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split([':', '^']).collect();
        let bad = || Error::InvalidField(format!("expected p:e:n or p^e^n, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let p = parts[0].trim().parse().map_err(|_| bad())?;
        let e = parts[1].trim().parse().map_err(|_| bad())?;
        let n = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(FieldSpec { p, e, n })
    }
}

impl FieldSpec {
    pub fn build(&self, cap: u64) -> Result<FieldCtx> {
        FieldCtx::with_cap(self.p, self.e, self.n, cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> FieldCtx {
        make_field(3, 1, 2).unwrap()
    }

    fn f27() -> FieldCtx {
        make_field(3, 1, 3).unwrap()
    }

    /// Multiplication straight from the modulus, independent of the tables.
    fn schoolbook_mul(ctx: &FieldCtx, a: Elem, b: Elem) -> Elem {
        let p = ctx.p();
        let m: Vec<u64> = ctx.modulus().iter().map(|&c| c as u64).collect();
        let pa: Vec<u64> = ctx.coeffs(a).iter().map(|&c| c as u64).collect();
        let pb: Vec<u64> = ctx.coeffs(b).iter().map(|&c| c as u64).collect();
        let r = fp_poly::mul_mod(&fp_poly::trim(pa), &fp_poly::trim(pb), &m, p);
        let c: Vec<u32> = r.iter().map(|&c| c as u32).collect();
        ctx.from_coeffs(&c).unwrap()
    }

    #[test]
    fn f9_modulus_is_x2_plus_1() {
        // Degree-2 monic candidates over F_3 in lex order: x^2 (reducible),
        // x^2 + 1 (no root in F_3).
        let ctx = f9();
        assert_eq!(ctx.modulus(), &[1, 0, 1]);
        assert_eq!(ctx.size(), 9);
        assert_eq!(ctx.q(), 3);
    }

    #[test]
    fn f27_modulus_is_first_irreducible() {
        // Brute-force: first monic cubic over F_3 without roots.
        let mut expected = None;
        'outer: for c2 in 0..3u64 {
            for c1 in 0..3u64 {
                for c0 in 0..3u64 {
                    let rootless =
                        (0..3u64).all(|x| (x * x * x + c2 * x * x + c1 * x + c0) % 3 != 0);
                    if rootless {
                        expected = Some(vec![c0 as u32, c1 as u32, c2 as u32, 1]);
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(f27().modulus(), expected.unwrap().as_slice());
    }

    #[test]
    fn prime_field_is_degenerate() {
        let ctx = make_field(2, 1, 1).unwrap();
        assert_eq!(ctx.size(), 2);
        assert_eq!(ctx.modulus(), &[0, 1]);
        assert_eq!(ctx.primitive_element(), Elem::ONE);
        assert_eq!(ctx.add(Elem::ONE, Elem::ONE), Elem::ZERO);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(make_field(4, 1, 1), Err(Error::NotPrime(4)));
        assert!(matches!(
            make_field(2, 1, 23),
            Err(Error::FieldTooLarge { .. })
        ));
        assert!(matches!(
            FieldCtx::with_cap(3, 1, 3, 26),
            Err(Error::FieldTooLarge { .. })
        ));
        assert!(matches!(make_field(3, 0, 2), Err(Error::InvalidField(_))));
    }

    #[test]
    fn construction_is_deterministic() {
        assert_eq!(f27(), f27());
        assert_eq!(make_field(2, 2, 2).unwrap(), make_field(2, 2, 2).unwrap());
    }

    #[test]
    fn table_mul_agrees_with_schoolbook() {
        for ctx in [
            f9(),
            f27(),
            make_field(2, 2, 2).unwrap(),
            make_field(5, 1, 2).unwrap(),
        ] {
            for a in ctx.elements() {
                for b in ctx.elements() {
                    assert_eq!(ctx.mul(a, b), schoolbook_mul(&ctx, a, b));
                }
            }
        }
    }

    #[test]
    fn primitive_element_orders() {
        // F_9 = F_3[i], i^2 = -1: 1 has order 1, 2 order 2, i order 4,
        // 1 + i order 8.
        let ctx = f9();
        let g = ctx.primitive_element();
        assert_eq!(ctx.coeffs(g), vec![1, 1]);
        assert_ne!(ctx.pow(g, 4), Elem::ONE);
        assert_eq!(ctx.pow(g, 8), Elem::ONE);

        let ctx = f27();
        let g = ctx.primitive_element();
        assert_ne!(ctx.pow(g, 13), Elem::ONE);
        assert_ne!(ctx.pow(g, 2), Elem::ONE);
        assert_eq!(ctx.pow(g, 26), Elem::ONE);
        // First in enumeration order.
        for x in ctx.nonzero_elements().take_while(|&x| x != g) {
            assert!(ctx.pow(x, 13) == Elem::ONE || ctx.pow(x, 2) == Elem::ONE);
        }
    }

    #[test]
    fn frobenius_examples() {
        let ctx = f9();
        for x in ctx.elements() {
            assert_eq!(ctx.frobenius(x, 2), x);
            assert_eq!(ctx.frobenius(x, 1), ctx.pow(x, 3));
        }
        for c in 0..3 {
            let c = ctx.from_int(c);
            assert_eq!(ctx.frobenius(c, 1), c);
        }
        let ctx = f27();
        let g = ctx.primitive_element();
        let cube = ctx.mul(ctx.mul(g, g), g);
        assert_eq!(ctx.frobenius(g, 1), cube);
        assert_eq!(ctx.subfield().len(), 3);
    }

    #[test]
    fn pow_big_examples() {
        let ctx = f9();
        for x in ctx.nonzero_elements() {
            assert_eq!(ctx.pow_big(x, &BigInt::from(8)).unwrap(), Elem::ONE);
        }
        let two = ctx.from_int(2);
        assert_eq!(ctx.pow_big(two, &BigInt::from(-1)).unwrap(), two);
        assert_eq!(
            ctx.pow_big(Elem::ZERO, &BigInt::from(-1)),
            Err(Error::DivisionByZero)
        );
        assert_eq!(
            ctx.pow_big(Elem::ZERO, &BigInt::from(0)),
            Err(Error::ZeroToZero)
        );
        assert_eq!(
            ctx.pow_big(Elem::ZERO, &BigInt::from(5)).unwrap(),
            Elem::ZERO
        );

        let ctx = f27();
        let g = ctx.primitive_element();
        let g25 = ctx.pow_big(g, &BigInt::from(25)).unwrap();
        assert_eq!(ctx.mul(g, g25), Elem::ONE);
        let huge = BigInt::from(10u64).pow(40) * 26 - 1;
        assert_eq!(ctx.pow_big(g, &huge).unwrap(), g25);
    }

    #[test]
    fn norm_examples() {
        let ctx = f9();
        assert_eq!(ctx.norm_to_subfield(Elem::ONE), Elem::ONE);
        let g = ctx.primitive_element();
        let ng = ctx.norm_to_subfield(g);
        assert_eq!(ng, ctx.pow(g, 4));
        assert!(ctx.in_subfield(ng));
        assert_ne!(ng, Elem::ZERO);

        // Norm-one elements of F_27 are exactly g^(2t); there are 13.
        let ctx = f27();
        let g = ctx.primitive_element();
        let kernel: Vec<Elem> = ctx
            .nonzero_elements()
            .filter(|&b| ctx.norm_to_subfield(b) == Elem::ONE)
            .collect();
        let mut squares: Vec<Elem> = (0..13).map(|t| ctx.pow(g, 2 * t)).collect();
        squares.sort();
        assert_eq!(kernel, squares);
    }

    #[test]
    fn exhaustive_group_laws_small() {
        let ctx = f27();
        for x in ctx.elements() {
            assert!(ctx.in_subfield(ctx.norm_to_subfield(x)));
            assert_eq!(ctx.add(x, ctx.neg(x)), Elem::ZERO);
            if !x.is_zero() {
                assert_eq!(ctx.pow(x, ctx.order()), Elem::ONE);
                assert_eq!(ctx.mul(x, ctx.inv(x).unwrap()), Elem::ONE);
            }
        }
    }

    #[test]
    fn coefficient_roundtrip_and_validation() {
        let ctx = f27();
        for x in ctx.elements() {
            assert_eq!(ctx.from_coeffs(&ctx.coeffs(x)).unwrap(), x);
        }
        assert_eq!(ctx.from_coeffs(&[2]).unwrap(), ctx.from_int(2));
        assert!(ctx.from_coeffs(&[3]).is_err());
        assert!(ctx.from_coeffs(&[0, 0, 0, 1]).is_err());
    }

    #[test]
    fn field_spec_parsing() {
        let s: FieldSpec = "3:1:2".parse().unwrap();
        assert_eq!(s, FieldSpec { p: 3, e: 1, n: 2 });
        let s: FieldSpec = "2^2^2".parse().unwrap();
        assert_eq!(s, FieldSpec { p: 2, e: 2, n: 2 });
        assert!("3:1".parse::<FieldSpec>().is_err());
        assert!("a:b:c".parse::<FieldSpec>().is_err());
    }
}
