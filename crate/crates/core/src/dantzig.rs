//! The Dantzig selector, its error radius, and the derived hypothesis test.
//!
//! The selector solves
//!
//! ```text
//! minimize ||beta||_1   subject to   ||Xt^T (y - Xt beta)||_inf <= lambda_p sigma
//! ```
//!
//! over the unit-column design `Xt = X / sqrt(n)`, with
//! `lambda_p = sqrt(2 (1 + alpha) log p)`, and rescales the optimizer by
//! `1 / sqrt(n)` to land back on the original coordinates. The linear
//! program splits `beta = beta+ - beta-` into `2p` nonnegative variables
//! with `2p` inequality rows.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{norm2, Mat};
use crate::lp::solve_lp;
use crate::{Error, Result};

/// Feasibility tolerance accepted on returned solutions.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Constraint tolerance requested from the LP solver.
const SOLVER_TOL: f64 = 1e-8;
/// Equality tolerance used for the noiseless (`sigma = 0`) constraint.
const NOISELESS_TOL: f64 = 1e-10;

/// Solution of the selector program in both coordinate systems.
#[derive(Debug, Clone)]
pub struct DantzigSolution {
    /// Optimizer in the unit-column coordinates.
    pub beta_tilde: Vec<f64>,
    /// Rescaled estimate `beta_tilde / sqrt(n)`.
    pub beta_hat: Vec<f64>,
    pub lambda_p: f64,
    pub alpha: f64,
    /// `||beta_tilde||_1` at the optimum.
    pub objective: f64,
    /// Achieved `||Xt^T (y - Xt beta_tilde)||_inf`.
    pub feasibility_slack: f64,
}

/// `lambda_p = sqrt(2 (1 + alpha) log p)`.
pub fn lambda_p(p: usize, alpha: f64) -> f64 {
    libm::sqrt(2.0 * (1.0 + alpha) * libm::log(p as f64))
}

/// Solves the selector program for the design `x` (columns of squared norm
/// `n`), observation `y`, known noise level `sigma >= 0`, and `alpha > 0`.
pub fn dantzig_select(x: &Mat, y: &[f64], sigma: f64, alpha: f64) -> Result<DantzigSolution> {
    let n = x.rows();
    let p = x.cols();
    if p < 2 {
        return Err(Error::InvalidParameter("selector needs p >= 2"));
    }
    if y.len() != n {
        return Err(Error::InvalidParameter("observation length must equal n"));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter("alpha must be positive"));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter("sigma must be nonnegative"));
    }
    let lam = lambda_p(p, alpha);
    let threshold = if sigma == 0.0 { NOISELESS_TOL } else { lam * sigma };

    let xtilde = x.scale(1.0 / libm::sqrt(n as f64));
    let gram = xtilde.gram();
    let g = xtilde.tr_matvec(y);

    // Rows: Gram (b+ - b-) <= t + g  and  -Gram (b+ - b-) <= t - g.
    let mut a_ub = Mat::zeros(2 * p, 2 * p);
    let mut b_ub = vec![0.0; 2 * p];
    for i in 0..p {
        for j in 0..p {
            let v = gram[(i, j)];
            a_ub[(i, j)] = v;
            a_ub[(i, p + j)] = -v;
            a_ub[(p + i, j)] = -v;
            a_ub[(p + i, p + j)] = v;
        }
        b_ub[i] = threshold + g[i];
        b_ub[p + i] = threshold - g[i];
    }
    let c = vec![1.0; 2 * p];
    let sol = solve_lp(&c, &a_ub, &b_ub, SOLVER_TOL)?;

    // Canonicalize to positive/negative parts so the objective equals the
    // l1 norm exactly even on degenerate vertices.
    let beta_tilde: Vec<f64> = (0..p).map(|j| sol.x[j] - sol.x[p + j]).collect();
    let objective: f64 = beta_tilde.iter().map(|v| v.abs()).sum();
    let sqrt_n = libm::sqrt(n as f64);
    let beta_hat: Vec<f64> = beta_tilde.iter().map(|v| v / sqrt_n).collect();

    let mut residual = y.to_vec();
    let image = xtilde.matvec(&beta_tilde);
    for i in 0..n {
        residual[i] -= image[i];
    }
    let corr = xtilde.tr_matvec(&residual);
    let feasibility_slack = corr.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    Ok(DantzigSolution { beta_tilde, beta_hat, lambda_p: lam, alpha, objective, feasibility_slack })
}

/// High-probability error radius of the rescaled selector:
///
/// ```text
/// 8 sigma / (1 - delta - theta) * sqrt((1 + alpha) S log p / n)
///   + 2 (1 - delta + theta) / (1 - delta - theta) * R / sqrt(S)
/// ```
///
/// The first coefficient is the canonical form of `4 sqrt(2) * sqrt(2)`.
pub fn theorem1_radius(
    s: usize,
    r: f64,
    n: usize,
    p: usize,
    alpha: f64,
    delta: f64,
    theta: f64,
    sigma: f64,
) -> Result<f64> {
    if s == 0 {
        return Err(Error::InvalidParameter("radius needs S >= 1"));
    }
    if p < 2 {
        return Err(Error::InvalidParameter("radius needs p >= 2"));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("radius needs n >= 1"));
    }
    if !(alpha > 0.0) || !(r >= 0.0) || !(sigma >= 0.0) || delta < 0.0 || theta < 0.0 {
        return Err(Error::InvalidParameter("radius parameters out of range"));
    }
    if delta + theta >= 1.0 {
        return Err(Error::A4Violated { delta, theta });
    }
    let gap = 1.0 - delta - theta;
    let s_f = s as f64;
    let noise = 8.0 * sigma / gap
        * libm::sqrt((1.0 + alpha) * s_f * libm::log(p as f64) / n as f64);
    let tail = 2.0 * (1.0 - delta + theta) / gap * r / libm::sqrt(s_f);
    Ok(noise + tail)
}

/// The failure probability mass the radius guarantee carries:
/// `1 / (p^alpha sqrt(pi log p))`.
pub fn theorem1_failure_mass(p: usize, alpha: f64) -> f64 {
    let logp = libm::log(p as f64);
    libm::exp(-alpha * logp) / libm::sqrt(core::f64::consts::PI * logp)
}

/// Critical-region indicator: 1 iff the estimate strays more than
/// `epsilon` from the truth in l2.
pub fn hypothesis_test_phi(beta_hat: &[f64], beta0: &[f64], epsilon: f64) -> Result<bool> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive"));
    }
    if beta_hat.len() != beta0.len() {
        return Err(Error::InvalidParameter("vector lengths disagree"));
    }
    let diff: Vec<f64> = beta_hat.iter().zip(beta0).map(|(a, b)| a - b).collect();
    Ok(norm2(&diff) > epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate_design, Ensemble};
    use crate::rng::{Purpose, Rng};

    fn soft_threshold(v: f64, t: f64) -> f64 {
        if v > t {
            v - t
        } else if v < -t {
            v + t
        } else {
            0.0
        }
    }

    #[test]
    fn identity_design_matches_soft_thresholding_closed_form() {
        // With Xt = I the program is min ||b||_1 s.t. ||y - b||_inf <= t,
        // solved entrywise by soft thresholding.
        let n = 2;
        let x = Mat::from_rows(&[
            &[libm::sqrt(2.0), 0.0],
            &[0.0, libm::sqrt(2.0)],
        ]);
        let y = [5.0, 0.1];
        // Choose sigma so that lambda_p * sigma = 1.
        let sigma = 1.0 / lambda_p(n, 1.0);
        let sol = dantzig_select(&x, &y, sigma, 1.0).unwrap();
        assert!((sol.beta_tilde[0] - 4.0).abs() < 1e-6);
        assert!(sol.beta_tilde[1].abs() < 1e-6);
    }

    #[test]
    fn randomized_identity_cases_match_soft_threshold() {
        let n = 8;
        let mut x = Mat::zeros(n, n);
        for i in 0..n {
            x[(i, i)] = libm::sqrt(n as f64);
        }
        let alpha = 1.0;
        let sigma = 0.7;
        let t = lambda_p(n, alpha) * sigma;
        for trial in 0..100u64 {
            let mut rng = Rng::keyed(5150, Purpose::MonteCarlo, trial);
            let y: Vec<f64> = (0..n).map(|_| 3.0 * rng.next_normal()).collect();
            let sol = dantzig_select(&x, &y, sigma, alpha).unwrap();
            for i in 0..n {
                let want = soft_threshold(y[i], t);
                assert!(
                    (sol.beta_tilde[i] - want).abs() < 1e-6,
                    "trial {trial} coord {i}: got {} want {want}",
                    sol.beta_tilde[i]
                );
            }
        }
    }

    #[test]
    fn noiseless_orthonormal_design_recovers_exactly() {
        let x = generate_design(6, 6, Ensemble::PartialOrthonormal, 3).unwrap();
        let beta0 = vec![0.0, 1.25, 0.0, 0.0, -0.5, 0.0];
        let y = x.matvec(&beta0);
        let sol = dantzig_select(&x, &y, 0.0, 1.0).unwrap();
        for i in 0..6 {
            assert!(
                (sol.beta_hat[i] - beta0[i]).abs() < 1e-6,
                "coord {i}: {} vs {}",
                sol.beta_hat[i],
                beta0[i]
            );
        }
    }

    #[test]
    fn zero_observation_returns_zero() {
        let x = generate_design(4, 6, Ensemble::Gaussian, 2).unwrap();
        let sol = dantzig_select(&x, &[0.0; 4], 0.5, 1.0).unwrap();
        assert!(sol.objective < 1e-9);
        assert!(sol.beta_tilde.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn solutions_are_feasible_and_optimal_against_known_point() {
        // Whenever sqrt(n) beta0 is itself feasible, the optimum can be no
        // larger in l1.
        for trial in 0..20u64 {
            let x = generate_design(12, 8, Ensemble::Gaussian, trial).unwrap();
            let mut beta0 = vec![0.0; 8];
            beta0[(trial % 8) as usize] = 0.8;
            let sigma = 0.5;
            let inst = crate::problem::ProblemInstance::new(1, x, beta0, sigma, 0.0).unwrap();
            let obs = crate::problem::synthesize_observation(&inst, trial + 1000);
            let sol = dantzig_select(&inst.x, &obs.y, sigma, 1.0).unwrap();
            let threshold = sol.lambda_p * sigma;
            assert!(sol.feasibility_slack <= threshold + FEASIBILITY_TOL);
            assert!((sol.objective - sol.beta_tilde.iter().map(|v| v.abs()).sum::<f64>()).abs() < 1e-10);
            for i in 0..8 {
                assert_eq!(sol.beta_hat[i], sol.beta_tilde[i] / libm::sqrt(12.0));
            }
            // Check optimality against sqrt(n) beta0 when that point is feasible.
            let scaled: Vec<f64> = inst.beta0.iter().map(|v| v * libm::sqrt(12.0)).collect();
            let xt = inst.x.scale(1.0 / libm::sqrt(12.0));
            let mut resid = obs.y.clone();
            let image = xt.matvec(&scaled);
            for i in 0..12 {
                resid[i] -= image[i];
            }
            let corr = xt.tr_matvec(&resid);
            let slack = corr.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if slack <= threshold {
                let l1: f64 = scaled.iter().map(|v| v.abs()).sum();
                assert!(sol.objective <= l1 + 1e-6);
            }
        }
    }

    #[test]
    fn radius_closed_form_examples() {
        // R=0, delta=theta=0, sigma=1, S=1, alpha=1, p=100, n=400.
        let r = theorem1_radius(1, 0.0, 400, 100, 1.0, 0.0, 0.0, 1.0).unwrap();
        let direct = 4.0 * libm::sqrt(2.0)
            * libm::sqrt(2.0 * 2.0 * libm::log(100.0) / 400.0);
        assert!((r - direct).abs() < 1e-12);
        assert!((r - 1.21387).abs() < 2e-4, "r = {r}");
        // Noiseless exactly-sparse radius vanishes.
        assert_eq!(theorem1_radius(2, 0.0, 10, 50, 1.0, 0.1, 0.2, 0.0).unwrap(), 0.0);
        // Doubling n divides the noise term by sqrt(2).
        let r1 = theorem1_radius(1, 0.0, 100, 64, 1.0, 0.0, 0.0, 1.0).unwrap();
        let r2 = theorem1_radius(1, 0.0, 200, 64, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!((r1 / r2 - libm::sqrt(2.0)).abs() < 1e-12);
    }

    #[test]
    fn radius_identity_four_sqrt_two_times_sqrt_two_is_eight() {
        // Exact integer identity: (4 sqrt(2) * sqrt(2))^2 = 8^2.
        assert_eq!(4 * 4 * 2 * 2, 8 * 8);
        // Two evaluation routes agree in floating point on a grid.
        for &(s, n, p, alpha, sigma) in &[
            (1usize, 24usize, 32usize, 1.0f64, 0.5f64),
            (2, 100, 64, 3.0, 1.0),
            (3, 50, 40, 0.5, 2.0),
        ] {
            let canonical = theorem1_radius(s, 0.0, n, p, alpha, 0.0, 0.0, sigma).unwrap();
            let appendix_form = 4.0 * libm::sqrt(2.0) * sigma
                * libm::sqrt(2.0 * (1.0 + alpha) * s as f64 * libm::log(p as f64) / n as f64);
            assert!(
                (canonical - appendix_form).abs() <= 1e-12 * canonical.abs(),
                "forms disagree: {canonical} vs {appendix_form}"
            );
        }
    }

    #[test]
    fn radius_monotonicities() {
        let base = theorem1_radius(2, 0.5, 100, 64, 2.0, 0.1, 0.2, 1.0).unwrap();
        assert!(theorem1_radius(2, 0.5, 100, 64, 2.5, 0.1, 0.2, 1.0).unwrap() > base);
        assert!(theorem1_radius(2, 0.9, 100, 64, 2.0, 0.1, 0.2, 1.0).unwrap() > base);
        assert!(theorem1_radius(2, 0.5, 100, 64, 2.0, 0.2, 0.2, 1.0).unwrap() > base);
        assert!(theorem1_radius(2, 0.5, 100, 64, 2.0, 0.1, 0.3, 1.0).unwrap() > base);
        assert!(theorem1_radius(2, 0.5, 150, 64, 2.0, 0.1, 0.2, 1.0).unwrap() < base);
        assert!(matches!(
            theorem1_radius(2, 0.5, 100, 64, 2.0, 0.6, 0.5, 1.0),
            Err(Error::A4Violated { .. })
        ));
    }

    #[test]
    fn hypothesis_test_trivial_cases() {
        let b = [1.0, 2.0];
        assert!(!hypothesis_test_phi(&b, &b, 0.5).unwrap());
        // Distance exactly 2 epsilon triggers.
        assert!(hypothesis_test_phi(&[1.0, 0.0], &[0.0, 0.0], 0.5).unwrap());
        assert!(hypothesis_test_phi(&b, &b, 0.0).is_err());
    }
}
