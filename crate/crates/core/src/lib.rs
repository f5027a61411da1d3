//! Permutation polynomials over finite fields and their compositional
//! inverses, with every closed form checked against an exhaustive oracle.
//!
//! Three families are covered:
//!
//! * [`quad`]: `a x^q + b x + (x^q - x)^k` over F_{q^2};
//! * [`cpp`]: the complete permutation polynomial
//!   `-x + x^{(q^2+1)/2} + x^{(q^3+q)/2}` over F_{q^3};
//! * [`aml`]: `A(x)^m + L(x)` over F_{q^n}, with `A` a linearized map whose
//!   image is a line over F_q and `L` a singular linearized map.
//!
//! All arithmetic is exact. Field sizes are bounded so that every claim can
//! be confirmed point by point.

pub mod aml;
pub mod arith;
pub mod certificate;
pub mod cli;
pub mod cpp;
pub mod error;
pub mod field;
pub mod linalg;
pub mod linearized;
pub mod poly;
pub mod quad;
pub mod selftest;

pub use certificate::{PermutationCertificate, Verdict};
pub use error::{Error, Result};
pub use field::{make_field, Elem, FieldCtx, FieldSpec};
pub use linearized::LinearizedPoly;
pub use poly::{FieldMap, SparsePoly, ValueTable};

/// F_{q^n} for a prime power `q`.
pub fn field_for(q: u64, n: u32, cap: u64) -> Result<FieldCtx> {
    let (p, e) = arith::prime_power(q)
        .ok_or_else(|| Error::InvalidField(format!("q = {q} is not a prime power")))?;
    FieldCtx::with_cap(p, e, n, cap)
}
