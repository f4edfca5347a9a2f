//! Dense matrices and the small-scale factorizations the rest of the crate
//! needs: column subsetting, Gram matrices, modified Gram-Schmidt, and a
//! cyclic Jacobi eigensolver for symmetric matrices.
//!
//! Everything here targets desk-scale sizes (tens of rows/columns), where
//! dense O(k^3) algorithms are both fast and the easiest to trust.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    /// Builds from a row-major buffer.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn scale(&self, a: f64) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| a * x).collect(),
        }
    }

    /// Matrix with the given subset of columns (indices must be strictly
    /// increasing or at least distinct; order is preserved).
    pub fn select_columns(&self, idx: &[usize]) -> Mat {
        let mut m = Mat::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m[(i, jj)] = self[(i, j)];
            }
        }
        m
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += row[j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// `self^T v` without forming the transpose.
    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let vi = v[i];
            for j in 0..self.cols {
                out[j] += row[j] * vi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Gram matrix `self^T self`.
    pub fn gram(&self) -> Mat {
        let mut g = Mat::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..self.cols {
                let ra = row[a];
                if ra == 0.0 {
                    continue;
                }
                for b in a..self.cols {
                    g[(a, b)] += ra * row[b];
                }
            }
        }
        for a in 0..self.cols {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }

    /// Gram matrix of a column subset, `X_T^T X_T`.
    pub fn gram_of_columns(&self, idx: &[usize]) -> Mat {
        let k = idx.len();
        let mut g = Mat::zeros(k, k);
        for a in 0..k {
            for b in a..k {
                let mut acc = 0.0;
                for i in 0..self.rows {
                    acc += self[(i, idx[a])] * self[(i, idx[b])];
                }
                g[(a, b)] = acc;
                g[(b, a)] = acc;
            }
        }
        g
    }

    /// Cross-Gram of two column subsets, `X_T^T X_{T'}`.
    pub fn cross_gram(&self, left: &[usize], right: &[usize]) -> Mat {
        let mut g = Mat::zeros(left.len(), right.len());
        for (a, &ja) in left.iter().enumerate() {
            for (b, &jb) in right.iter().enumerate() {
                let mut acc = 0.0;
                for i in 0..self.rows {
                    acc += self[(i, ja)] * self[(i, jb)];
                }
                g[(a, b)] = acc;
            }
        }
        g
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order; `vectors.column(i)` is the unit
/// eigenvector for `values[i]`. Off-diagonal mass is annihilated to
/// roughly machine precision relative to the largest entry, comfortably
/// below the 1e-10 accuracy the isometry certificates require.
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

pub fn sym_eigen(a: &Mat) -> SymEigen {
    assert_eq!(a.rows(), a.cols(), "symmetric eigen needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Mat::identity(n);
    if n <= 1 {
        return SymEigen { values: m.column(0).first().map(|&x| vec![x]).unwrap_or_default(), vectors: v };
    }
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, newj)] = v[(i, oldj)];
        }
    }
    SymEigen { values, vectors }
}

/// Largest singular value of a rectangular matrix, via the Gram matrix of
/// the smaller side.
pub fn spectral_norm(b: &Mat) -> f64 {
    if b.rows() == 0 || b.cols() == 0 {
        return 0.0;
    }
    let g = if b.rows() >= b.cols() { b.gram() } else { b.transpose().gram() };
    let eig = sym_eigen(&g);
    libm::sqrt(eig.values.last().copied().unwrap_or(0.0).max(0.0))
}

/// Orthonormal basis for the column span of `a` via modified Gram-Schmidt
/// with one reorthogonalization pass. Numerically-dependent columns are
/// dropped, so the result may have fewer columns than `a`.
pub fn orthonormal_basis(a: &Mat) -> Mat {
    let n = a.rows();
    let k = a.cols();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut col = a.column(j);
        let orig = norm2(&col);
        for _pass in 0..2 {
            for qi in &q {
                let r = dot(qi, &col);
                axpy(-r, qi, &mut col);
            }
        }
        let nrm = norm2(&col);
        if nrm > 1e-12 * orig.max(1.0) {
            for x in col.iter_mut() {
                *x /= nrm;
            }
            q.push(col);
        }
    }
    let mut out = Mat::zeros(n, q.len());
    for (j, col) in q.iter().enumerate() {
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    out
}

/// Solves `A x = b` for symmetric positive definite `A` via its
/// eigendecomposition. Intended for the tiny regularized Gram systems that
/// arise in posterior components.
pub fn spd_solve(eig: &SymEigen, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut out = vec![0.0; n];
    for j in 0..n {
        let qj = eig.vectors.column(j);
        let coef = dot(&qj, b) / eig.values[j];
        axpy(coef, &qj, &mut out);
    }
    out
}
