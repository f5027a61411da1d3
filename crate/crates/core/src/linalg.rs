//! Dense matrices over F_{q^n} with exact Gaussian elimination.

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};

/// Row-major matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Elem::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Keeps only the listed rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)])
    }

    /// Deletes row `r` and column `c`.
    pub fn minor(&self, r: usize, c: usize) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != c).collect();
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn mul_vec(&self, ctx: &FieldCtx, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| ctx.sum(self.row(i).iter().zip(v).map(|(&a, &b)| ctx.mul(a, b))))
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, ctx: &FieldCtx, v: &[Elem]) -> Vec<Elem> {
        self.transpose().mul_vec(ctx, v)
    }

    /// Row-major coefficient lists, for certificates.
    pub fn to_listing(&self, ctx: &FieldCtx) -> MatrixListing {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| ctx.coeffs(x)).collect())
            .collect()
    }
}

pub type MatrixListing = Vec<Vec<Vec<u32>>>;

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Elem;
    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of reducing a matrix to reduced row-echelon form.
struct Echelon {
    rref: Matrix,
    pivots: Vec<usize>,
    /// Product of pivots with the sign of the row permutation; the
    /// determinant when the matrix is square and full rank.
    det: Elem,
}

fn reduce(ctx: &FieldCtx, m: &Matrix) -> Echelon {
    let mut a = m.clone();
    let mut det = Elem::ONE;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
            det = ctx.neg(det);
        }
        let piv = a[(r, c)];
        det = ctx.mul(det, piv);
        let inv = ctx.inv(piv).expect("pivot is nonzero");
        for j in 0..a.cols {
            a[(r, j)] = ctx.mul(a[(r, j)], inv);
        }
        for i in 0..a.rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)];
            for j in 0..a.cols {
                a[(i, j)] = ctx.sub(a[(i, j)], ctx.mul(f, a[(r, j)]));
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon {
        rref: a,
        pivots,
        det,
    }
}

/// Determinant (of a square matrix) and rank.
pub fn det_rank(ctx: &FieldCtx, m: &Matrix) -> (Elem, usize) {
    let e = reduce(ctx, m);
    let rank = e.pivots.len();
    let det = if m.rows == m.cols && rank == m.rows {
        e.det
    } else {
        Elem::ZERO
    };
    (det, rank)
}

pub fn det(ctx: &FieldCtx, m: &Matrix) -> Elem {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    if m.rows == 0 {
        return Elem::ONE;
    }
    det_rank(ctx, m).0
}

pub fn rank(ctx: &FieldCtx, m: &Matrix) -> usize {
    det_rank(ctx, m).1
}

/// Signed minor deleting row `i` and column 0, sign (-1)^i.
pub fn cofactor_col0(ctx: &FieldCtx, m: &Matrix, i: usize) -> Elem {
    let minor = det(ctx, &m.minor(i, 0));
    if i.is_multiple_of(2) {
        minor
    } else {
        ctx.neg(minor)
    }
}

/// The canonical kernel vector of a matrix of rank `cols - 1`: solve the
/// RREF system with the single free variable set to one, then scale so the
/// first nonzero entry is one.
pub fn nullspace_vec(ctx: &FieldCtx, m: &Matrix) -> Result<Vec<Elem>> {
    let e = reduce(ctx, m);
    let expected = m.cols.saturating_sub(1);
    if e.pivots.len() != expected || m.cols == 0 {
        return Err(Error::RankMismatch {
            expected,
            found: e.pivots.len(),
        });
    }
    let free = (0..m.cols)
        .find(|c| !e.pivots.contains(c))
        .expect("one free column");
    let mut v = vec![Elem::ZERO; m.cols];
    v[free] = Elem::ONE;
    for (r, &pc) in e.pivots.iter().enumerate() {
        v[pc] = ctx.neg(e.rref[(r, free)]);
    }
    let lead = *v.iter().find(|x| !x.is_zero()).expect("free entry is one");
    let lead_inv = ctx.inv(lead)?;
    Ok(v.into_iter().map(|x| ctx.mul(x, lead_inv)).collect())
}

/// The unique solution of `m · x = rhs` for nonsingular square `m`.
pub fn solve_unique(ctx: &FieldCtx, m: &Matrix, rhs: &[Elem]) -> Result<Vec<Elem>> {
    assert_eq!(m.rows, m.cols);
    assert_eq!(rhs.len(), m.rows);
    let aug = Matrix::from_fn(m.rows, m.cols + 1, |i, j| {
        if j < m.cols {
            m[(i, j)]
        } else {
            rhs[i]
        }
    });
    let e = reduce(ctx, &aug);
    if e.pivots.len() != m.rows || e.pivots.contains(&m.cols) {
        return Err(Error::Singular);
    }
    Ok((0..m.rows).map(|i| e.rref[(i, m.cols)]).collect())
}

/// Whether every subset of `size` rows is linearly independent.
pub fn all_row_subsets_independent(ctx: &FieldCtx, m: &Matrix, size: usize) -> bool {
    fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            subsets(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    subsets(m.rows, size, 0, &mut Vec::new(), &mut all);
    all.iter().all(|s| rank(ctx, &m.select_rows(s)) == size)
}
