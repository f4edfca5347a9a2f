//! A dense two-phase tableau simplex for inequality-form linear programs:
//!
//! ```text
//! minimize    c^T x
//! subject to  A x <= b,  x >= 0
//! ```
//!
//! The selector programs this crate generates have a couple hundred
//! variables at most, so a dense tableau is the robust choice. Entering
//! variables are picked by most-negative reduced cost, with a switch to
//! Bland's rule after a stretch of non-improving pivots to rule out
//! cycling. Optimality is certified by the reduced costs; the certificate
//! and the worst constraint violation are reported on the solution.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::{Error, Result};

/// Solution of an inequality-form LP.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Worst violation of `A x <= b` and `x >= 0` at the returned point.
    pub max_violation: f64,
    /// Smallest reduced cost at termination; `>= -tolerance` certifies
    /// optimality of the returned vertex.
    pub min_reduced_cost: f64,
    pub iterations: usize,
}

const PIVOT_TOL: f64 = 1e-9;

struct Tableau {
    /// (m + 1) x (ncols + 1); last row is the objective, last column the rhs.
    t: Vec<Vec<f64>>,
    m: usize,
    ncols: usize,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[row][col];
        let inv = 1.0 / piv;
        for v in self.t[row].iter_mut() {
            *v *= inv;
        }
        for i in 0..=self.m {
            if i == row {
                continue;
            }
            let factor = self.t[i][col];
            if factor == 0.0 {
                continue;
            }
            // Row operation: row_i -= factor * row_pivot.
            let (pivot_row, target_row) = if i < row {
                let (a, b) = self.t.split_at_mut(row);
                (&b[0], &mut a[i])
            } else {
                let (a, b) = self.t.split_at_mut(i);
                (&a[row], &mut b[0])
            };
            for (tv, pv) in target_row.iter_mut().zip(pivot_row.iter()) {
                *tv -= factor * pv;
            }
            self.t[i][col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs simplex on the current objective row. `allowed` masks columns
    /// eligible to enter the basis.
    fn optimize(&mut self, allowed: &[bool], max_iter: usize) -> Result<usize> {
        let mut iterations = 0;
        let mut stalled = 0usize;
        let mut last_obj = f64::INFINITY;
        loop {
            if iterations > max_iter {
                return Err(Error::LpIterationLimit);
            }
            let use_bland = stalled > 64;
            let mut enter: Option<usize> = None;
            let mut best = -PIVOT_TOL;
            for j in 0..self.ncols {
                if !allowed[j] {
                    continue;
                }
                let r = self.t[self.m][j];
                if use_bland {
                    if r < -PIVOT_TOL {
                        enter = Some(j);
                        break;
                    }
                } else if r < best {
                    best = r;
                    enter = Some(j);
                }
            }
            let Some(col) = enter else {
                return Ok(iterations);
            };
            // Ratio test; tie-break on the smallest basis label for Bland.
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    let better = ratio < best_ratio - 1e-12
                        || (ratio < best_ratio + 1e-12
                            && leave.map(|l| self.basis[i] < self.basis[l]).unwrap_or(true));
                    if better {
                        best_ratio = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(row) = leave else {
                return Err(Error::LpUnbounded);
            };
            self.pivot(row, col);
            iterations += 1;
            let obj = -self.t[self.m][self.ncols];
            if obj < last_obj - 1e-12 {
                stalled = 0;
            } else {
                stalled += 1;
            }
            last_obj = obj;
        }
    }
}

/// Solves `min c^T x  s.t.  A x <= b, x >= 0`.
pub fn solve_lp(c: &[f64], a_ub: &Mat, b_ub: &[f64], tolerance: f64) -> Result<LpSolution> {
    let m = a_ub.rows();
    let n = a_ub.cols();
    if c.len() != n || b_ub.len() != m {
        return Err(Error::InvalidParameter("LP dimensions disagree"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter("LP tolerance must be positive"));
    }

    // Equality form: rows with negative rhs are negated (slack coefficient
    // becomes -1) and receive an artificial variable.
    let neg: Vec<bool> = b_ub.iter().map(|&bi| bi < 0.0).collect();
    let n_art = neg.iter().filter(|&&x| x).count();
    let ncols = n + m + n_art;
    let mut t = vec![vec![0.0; ncols + 1]; m + 1];
    let mut basis = vec![0usize; m];
    let mut art_idx = 0usize;
    for i in 0..m {
        let sign = if neg[i] { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a_ub[(i, j)];
        }
        t[i][n + i] = sign; // slack
        t[i][ncols] = sign * b_ub[i];
        if neg[i] {
            let col = n + m + art_idx;
            t[i][col] = 1.0;
            basis[i] = col;
            art_idx += 1;
        } else {
            basis[i] = n + i;
        }
    }

    let mut tab = Tableau { t, m, ncols, basis };
    let max_iter = 200 * (n + m).max(32);

    let mut total_iter = 0usize;
    if n_art > 0 {
        // Phase 1: minimize the sum of artificials. Reduced costs are
        // obtained by subtracting the artificial rows from the cost row.
        for j in 0..=ncols {
            let mut acc = 0.0;
            for i in 0..m {
                if tab.basis[i] >= n + m {
                    acc += tab.t[i][j];
                }
            }
            tab.t[m][j] = if j >= n + m && j < ncols { 1.0 - acc } else { -acc };
        }
        let allowed: Vec<bool> = (0..ncols).map(|_| true).collect();
        total_iter += tab.optimize(&allowed, max_iter)?;
        let phase1_obj = -tab.t[m][ncols];
        if phase1_obj > tolerance.max(1e-8) {
            return Err(Error::LpInfeasible);
        }
        // Drive any basic artificial (at value zero) out of the basis.
        for i in 0..m {
            if tab.basis[i] >= n + m {
                if let Some(col) = (0..n + m).find(|&j| tab.t[i][j].abs() > PIVOT_TOL) {
                    tab.pivot(i, col);
                }
                // A fully-zero row is a redundant constraint; the artificial
                // stays basic at zero, which phase 2 masks out below.
            }
        }
    }

    // Phase 2 objective row: r_j = c_j - sum_i c_{B_i} T[i][j].
    for j in 0..=ncols {
        let cj = if j < n { c[j] } else { 0.0 };
        let mut z = 0.0;
        for i in 0..m {
            let cb = if tab.basis[i] < n { c[tab.basis[i]] } else { 0.0 };
            if cb != 0.0 {
                z += cb * tab.t[i][j];
            }
        }
        tab.t[m][j] = cj - z;
    }
    // The objective cell carries -objective; initialize it consistently.
    let mut obj0 = 0.0;
    for i in 0..m {
        if tab.basis[i] < n {
            obj0 += c[tab.basis[i]] * tab.rhs(i);
        }
    }
    tab.t[m][ncols] = -obj0;

    let allowed: Vec<bool> = (0..ncols).map(|j| j < n + m).collect();
    total_iter += tab.optimize(&allowed, max_iter)?;

    // Extract the structural solution.
    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs(i);
        }
    }
    for xi in x.iter_mut() {
        if *xi < 0.0 && *xi > -tolerance {
            *xi = 0.0;
        }
    }
    let image = a_ub.matvec(&x);
    let mut violation = 0.0f64;
    for i in 0..m {
        violation = violation.max(image[i] - b_ub[i]);
    }
    for &xi in &x {
        violation = violation.max(-xi);
    }
    let objective = crate::linalg::dot(c, &x);
    let min_reduced_cost = (0..ncols)
        .filter(|&j| j < n + m)
        .map(|j| tab.t[m][j])
        .fold(f64::INFINITY, f64::min);
    Ok(LpSolution { x, objective, max_violation: violation, min_reduced_cost, iterations: total_iter })
}
