//! Linearized polynomials `L(x) = Σ a_i x^{q^i}` over F_{q^n}, their Dickson
//! matrices, and the cofactor formula for the inverse of a linearized
//! permutation.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::linalg::{self, Matrix};
use crate::poly::{FieldMap, SparsePoly};

/// Coefficients `a_0 .. a_{n-1}` of `Σ a_i x^{q^i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearizedPoly {
    coeffs: Vec<Elem>,
}

impl LinearizedPoly {
    /// Missing high coefficients are zero; more than `n` is an error.
    pub fn new(ctx: &FieldCtx, mut coeffs: Vec<Elem>) -> Result<Self> {
        let n = ctx.n() as usize;
        if coeffs.len() > n {
            return Err(Error::Precondition(format!(
                "linearized polynomial over a degree-{n} extension takes at most {n} coefficients, got {}",
                coeffs.len()
            )));
        }
        coeffs.resize(n, Elem::ZERO);
        Ok(LinearizedPoly { coeffs })
    }

    pub fn identity(ctx: &FieldCtx) -> Self {
        Self::new(ctx, vec![Elem::ONE]).expect("n >= 1")
    }

    /// `x^{q^j}`.
    pub fn frobenius(ctx: &FieldCtx, j: usize) -> Self {
        let mut c = vec![Elem::ZERO; ctx.n() as usize];
        let n = c.len();
        c[j % n] = Elem::ONE;
        LinearizedPoly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        ctx.sum(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, &c)| ctx.mul(c, ctx.frobenius(x, i as u64))),
        )
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Elem) -> Self {
        LinearizedPoly {
            coeffs: self.coeffs.iter().map(|&a| ctx.mul(c, a)).collect(),
        }
    }

    pub fn to_sparse(&self, ctx: &FieldCtx) -> SparsePoly {
        let q = BigInt::from(ctx.q());
        SparsePoly::from_terms(
            ctx,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (q.pow(i as u32), c)),
        )
    }

    /// Size of the kernel, by enumeration.
    pub fn kernel_size(&self, ctx: &FieldCtx) -> u64 {
        ctx.elements()
            .filter(|&x| self.eval(ctx, x).is_zero())
            .count() as u64
    }

    /// Dimension of the kernel over F_q, by enumeration.
    pub fn kernel_dim(&self, ctx: &FieldCtx) -> usize {
        let mut size = self.kernel_size(ctx);
        let mut dim = 0;
        while size > 1 {
            size /= ctx.q();
            dim += 1;
        }
        dim
    }

    pub fn to_listing(&self, ctx: &FieldCtx) -> Vec<Vec<u32>> {
        self.coeffs.iter().map(|&c| ctx.coeffs(c)).collect()
    }
}

impl FieldMap for LinearizedPoly {
    fn apply(&self, ctx: &FieldCtx, x: Elem) -> Elem {
        self.eval(ctx, x)
    }
}

/// Entry `(i, j)` is `a_{(j - i) mod n}^{q^i}`.
pub fn dickson(ctx: &FieldCtx, l: &LinearizedPoly) -> Matrix {
    let n = l.n();
    Matrix::from_fn(n, n, |i, j| {
        ctx.frobenius(l.coeffs[(j + n - i) % n], i as u64)
    })
}

/// Inverse of a linearized permutation: `det(D)^{-1} Σ ā_i x^{q^i}` with
/// `ā_i` the `(i, 0)` cofactor of the Dickson matrix `D`.
pub fn linearized_inverse(ctx: &FieldCtx, l: &LinearizedPoly) -> Result<LinearizedPoly> {
    let d = dickson(ctx, l);
    let det = linalg::det(ctx, &d);
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let det_inv = ctx.inv(det)?;
    let coeffs = (0..l.n())
        .map(|i| ctx.mul(det_inv, linalg::cofactor_col0(ctx, &d, i)))
        .collect();
    Ok(LinearizedPoly { coeffs })
}

/// `(det, rank)` of the Dickson matrix, with the rank confirmed against the
/// kernel dimension of `l` found by enumeration.
pub fn checked_det_rank(ctx: &FieldCtx, l: &LinearizedPoly) -> Result<(Elem, usize)> {
    let (det, rank) = linalg::det_rank(ctx, &dickson(ctx, l));
    let by_kernel = l.n() - l.kernel_dim(ctx);
    if rank != by_kernel {
        return Err(Error::Inconsistent(format!(
            "Dickson rank {rank} disagrees with n - dim ker L = {by_kernel}"
        )));
    }
    Ok((det, rank))
}

/// `a_0 ā_0 + Σ_{i>=1} a_{n-i}^{q^i} ā_i`, the column-0 Laplace expansion.
pub fn det_by_cofactors(ctx: &FieldCtx, l: &LinearizedPoly) -> Elem {
    let d = dickson(ctx, l);
    ctx.sum((0..l.n()).map(|i| ctx.mul(d[(i, 0)], linalg::cofactor_col0(ctx, &d, i))))
}
