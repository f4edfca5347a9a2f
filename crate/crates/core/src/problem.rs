//! Regression problem instances: design generation, observation synthesis,
//! norms, and compressibility measures.
//!
//! A problem is the tuple `(S, n, p, X, beta0, sigma, R)`. Designs always
//! satisfy the column-norm condition `||X_i||_2^2 = n` exactly (raw random
//! draws are rescaled column-wise), observations are `y = X beta0 + e` with
//! seeded Gaussian noise, and `beta0` must be within l1 distance `R` of some
//! `S`-sparse vector.


use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::rng::{Purpose, Rng};
use crate::{Error, Result};

/// Random design ensembles. All are column-rescaled after the raw draw so
/// the column-norm condition holds exactly rather than just in expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Gaussian,
    Rademacher,
    /// Rows of a uniformly random orthogonal matrix; requires `n <= p`.
    PartialOrthonormal,
}

/// One regression problem under the standing assumptions.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    /// Sparsity budget.
    pub s: usize,
    pub n: usize,
    pub p: usize,
    /// `n x p` design with columns of squared norm exactly `n`.
    pub x: Mat,
    pub beta0: Vec<f64>,
    /// Noise standard deviation. Zero is allowed for noiseless checks;
    /// operations that genuinely require noise reject it.
    pub sigma: f64,
    /// Compressibility slack: `best_s_term_error(beta0, s) <= r`.
    pub r: f64,
}

impl ProblemInstance {
    pub fn new(s: usize, x: Mat, beta0: Vec<f64>, sigma: f64, r: f64) -> Result<Self> {
        let n = x.rows();
        let p = x.cols();
        if n == 0 || p == 0 {
            return Err(Error::InvalidParameter("design must be nonempty"));
        }
        if s == 0 || s > p {
            return Err(Error::InvalidParameter("need 1 <= S <= p"));
        }
        if beta0.len() != p {
            return Err(Error::InvalidParameter("beta0 length must equal p"));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter("sigma must be finite and >= 0"));
        }
        if !(r >= 0.0) {
            return Err(Error::InvalidParameter("R must be >= 0"));
        }
        for j in 0..p {
            let nrm2: f64 = (0..n).map(|i| x[(i, j)] * x[(i, j)]).sum();
            if (nrm2 - n as f64).abs() > 1e-9 * n as f64 {
                return Err(Error::InvalidParameter("column norm condition violated"));
            }
        }
        if best_s_term_error(&beta0, s) > r + 1e-12 {
            return Err(Error::InvalidParameter("beta0 is not (S,R)-compressible"));
        }
        Ok(ProblemInstance { s, n, p, x, beta0, sigma, r })
    }

    /// The design rescaled to unit columns.
    pub fn normalized_design(&self) -> NormalizedDesign {
        NormalizedDesign::from_design(&self.x)
    }
}

/// A realized observation, retaining the noise vector for oracle checks.
#[derive(Debug, Clone)]
pub struct Observation {
    pub y: Vec<f64>,
    pub e: Vec<f64>,
    pub seed: u64,
}

/// The design scaled by `1/sqrt(n)`, so every column has unit l2 norm.
#[derive(Debug, Clone)]
pub struct NormalizedDesign {
    pub xtilde: Mat,
}

impl NormalizedDesign {
    pub fn from_design(x: &Mat) -> Self {
        let inv = 1.0 / libm::sqrt(x.rows() as f64);
        NormalizedDesign { xtilde: x.scale(inv) }
    }
}

/// Draws an `n x p` design from the ensemble and rescales each column to
/// squared norm exactly `n`. Deterministic given the seed.
pub fn generate_design(n: usize, p: usize, ensemble: Ensemble, seed: u64) -> Result<Mat> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and p >= 1"));
    }
    let mut x = match ensemble {
        Ensemble::Gaussian => {
            let mut m = Mat::zeros(n, p);
            for j in 0..p {
                let mut rng = Rng::keyed(seed, Purpose::Design, j as u64);
                for i in 0..n {
                    m[(i, j)] = rng.next_normal();
                }
            }
            m
        }
        Ensemble::Rademacher => {
            let mut m = Mat::zeros(n, p);
            for j in 0..p {
                let mut rng = Rng::keyed(seed, Purpose::Design, j as u64);
                for i in 0..n {
                    m[(i, j)] = if rng.next_u64() & 1 == 1 { 1.0 } else { -1.0 };
                }
            }
            m
        }
        Ensemble::PartialOrthonormal => {
            if n > p {
                return Err(Error::InvalidParameter(
                    "partial orthonormal ensemble requires n <= p",
                ));
            }
            // Random p x p orthogonal matrix, keep the first n rows.
            let mut raw = Mat::zeros(p, p);
            for j in 0..p {
                let mut rng = Rng::keyed(seed, Purpose::Design, j as u64);
                for i in 0..p {
                    raw[(i, j)] = rng.next_normal();
                }
            }
            let q = crate::linalg::orthonormal_basis(&raw);
            if q.cols() < p {
                return Err(Error::InvalidParameter(
                    "degenerate random matrix during orthonormalization",
                ));
            }
            let mut m = Mat::zeros(n, p);
            for i in 0..n {
                for j in 0..p {
                    m[(i, j)] = q[(i, j)];
                }
            }
            m
        }
    };
    let target = n as f64;
    for j in 0..p {
        let nrm2: f64 = (0..n).map(|i| x[(i, j)] * x[(i, j)]).sum();
        if nrm2 < 1e-300 {
            return Err(Error::InvalidParameter("drew a zero column; change the seed"));
        }
        let scale = libm::sqrt(target / nrm2);
        for i in 0..n {
            x[(i, j)] *= scale;
        }
    }
    Ok(x)
}

/// Synthesizes `y = X beta0 + e` with `e_i ~ N(0, sigma^2)` from the seeded
/// noise stream.
pub fn synthesize_observation(inst: &ProblemInstance, seed: u64) -> Observation {
    let mut rng = Rng::keyed(seed, Purpose::Noise, 0);
    let e: Vec<f64> = (0..inst.n).map(|_| inst.sigma * rng.next_normal()).collect();
    let mut y = inst.x.matvec(&inst.beta0);
    for i in 0..inst.n {
        y[i] += e[i];
    }
    Observation { y, e, seed }
}

/// Best `S`-term approximation error in l1: the sum of the `p - S` smallest
/// magnitudes, which equals `inf { ||beta - b||_1 : b is S-sparse }`.
pub fn best_s_term_error(beta: &[f64], s: usize) -> f64 {
    if s >= beta.len() {
        return 0.0;
    }
    let mut mags: Vec<f64> = beta.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    mags[..beta.len() - s].iter().sum()
}

/// `l_u` norm for `u >= 1`, or the max norm for `u = infinity`.
pub fn lp_norm(beta: &[f64], u: f64) -> Result<f64> {
    if u.is_nan() || u < 1.0 {
        return Err(Error::InvalidParameter("lp_norm requires u >= 1"));
    }
    if u == f64::INFINITY {
        return Ok(beta.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    }
    if u == 1.0 {
        return Ok(beta.iter().map(|x| x.abs()).sum());
    }
    if u == 2.0 {
        return Ok(crate::linalg::norm2(beta));
    }
    let sum: f64 = beta.iter().map(|x| libm::pow(x.abs(), u)).sum();
    Ok(libm::pow(sum, 1.0 / u))
}

/// The `l1 -> linf` operator norm of `X^T X`, which equals the largest
/// absolute entry of the Gram matrix. For a design meeting the column-norm
/// condition this is exactly `n`.
pub fn gram_l1_linf_norm(x: &Mat) -> f64 {
    x.gram().max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_orthonormal_square_is_scaled_isometry() {
        let x = generate_design(4, 4, Ensemble::PartialOrthonormal, 1).unwrap();
        let g = x.gram();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 4.0 } else { 0.0 };
                assert!((g[(i, j)] - want).abs() < 1e-9, "gram ({i},{j}) = {}", g[(i, j)]);
            }
        }
    }

    #[test]
    fn gaussian_columns_have_exact_norm() {
        let x = generate_design(2, 3, Ensemble::Gaussian, 7).unwrap();
        for j in 0..3 {
            let nrm2: f64 = (0..2).map(|i| x[(i, j)] * x[(i, j)]).sum();
            assert!((nrm2 - 2.0).abs() <= 1e-9 * 2.0);
        }
    }

    #[test]
    fn rademacher_entries_are_signs() {
        let x = generate_design(5, 4, Ensemble::Rademacher, 3).unwrap();
        for i in 0..5 {
            for j in 0..4 {
                assert!((x[(i, j)].abs() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_orthonormal_rejects_tall_matrices() {
        assert!(matches!(
            generate_design(5, 3, Ensemble::PartialOrthonormal, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn designs_are_deterministic_given_seed() {
        let a = generate_design(6, 9, Ensemble::Gaussian, 42).unwrap();
        let b = generate_design(6, 9, Ensemble::Gaussian, 42).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn noiseless_observation_is_exact() {
        let x = generate_design(4, 6, Ensemble::Gaussian, 5).unwrap();
        let beta0 = vec![1.0, 0.0, 0.0, -2.0, 0.0, 0.0];
        let inst = ProblemInstance::new(2, x, beta0, 0.0, 0.0).unwrap();
        let obs = synthesize_observation(&inst, 11);
        let xb = inst.x.matvec(&inst.beta0);
        for i in 0..4 {
            assert_eq!(obs.y[i], xb[i]);
            assert_eq!(obs.e[i], 0.0);
        }
    }

    #[test]
    fn zero_signal_observation_is_pure_noise() {
        let x = generate_design(4, 6, Ensemble::Gaussian, 5).unwrap();
        let inst = ProblemInstance::new(1, x, vec![0.0; 6], 1.5, 0.0).unwrap();
        let obs = synthesize_observation(&inst, 11);
        for i in 0..4 {
            assert_eq!(obs.y[i], obs.e[i]);
        }
    }

    #[test]
    fn noise_second_moment_matches_chi_square_oracle() {
        // mean of ||e||^2 / n over many draws estimates sigma^2; the
        // chi-square variance gives the standard error analytically.
        let n = 16;
        let sigma = 1.3f64;
        let x = generate_design(n, 4, Ensemble::Gaussian, 2).unwrap();
        let mut beta0 = vec![0.0; 4];
        beta0[0] = 1.0;
        let inst = ProblemInstance::new(1, x, beta0, sigma, 0.0).unwrap();
        let draws = 10_000u64;
        let mut acc = 0.0;
        for t in 0..draws {
            let obs = synthesize_observation(&inst, t);
            acc += obs.e.iter().map(|x| x * x).sum::<f64>() / n as f64;
        }
        let mean = acc / draws as f64;
        let se = libm::sqrt(2.0 * sigma.powi(4) / n as f64 / draws as f64);
        assert!(
            (mean - sigma * sigma).abs() <= 3.0 * se,
            "mean {mean} vs sigma^2 {} (3se = {})",
            sigma * sigma,
            3.0 * se
        );
    }

    #[test]
    fn best_s_term_examples() {
        assert_eq!(best_s_term_error(&[3.0, -1.0, 2.0], 1), 3.0);
        assert_eq!(best_s_term_error(&[3.0, -1.0, 2.0], 3), 0.0);
        assert_eq!(best_s_term_error(&[0.0, 0.0], 1), 0.0);
    }

    #[test]
    fn best_s_term_matches_support_enumeration() {
        // Independent oracle: minimize over all C(p, S) supports directly.
        fn oracle(beta: &[f64], s: usize) -> f64 {
            let p = beta.len();
            let mut best = f64::INFINITY;
            for support in crate::supports::Combinations::new(p, s.min(p)) {
                let err: f64 = (0..p)
                    .filter(|i| !support.contains(i))
                    .map(|i| beta[i].abs())
                    .sum();
                best = best.min(err);
            }
            best
        }
        let mut rng = Rng::keyed(17, Purpose::MonteCarlo, 0);
        for p in 1..=8usize {
            let beta: Vec<f64> = (0..p).map(|_| rng.next_normal()).collect();
            for s in 0..=p {
                let fast = best_s_term_error(&beta, s);
                let slow = oracle(&beta, s);
                assert!((fast - slow).abs() < 1e-12, "p={p} s={s}");
            }
        }
    }

    #[test]
    fn best_s_term_is_monotone_and_vanishes_at_sparsity() {
        let beta = [0.5, 0.0, -2.0, 0.0, 1.0];
        let mut prev = f64::INFINITY;
        for s in 0..=5 {
            let v = best_s_term_error(&beta, s);
            assert!(v <= prev);
            prev = v;
        }
        assert_eq!(best_s_term_error(&beta, 3), 0.0);
    }

    #[test]
    fn lp_norm_examples() {
        assert_eq!(lp_norm(&[3.0, -4.0], 2.0).unwrap(), 5.0);
        assert_eq!(lp_norm(&[3.0, -1.0, 2.0], 1.0).unwrap(), 6.0);
        assert_eq!(lp_norm(&[3.0, -1.0, 2.0], f64::INFINITY).unwrap(), 3.0);
        assert!(lp_norm(&[1.0], 0.5).is_err());
    }

    #[test]
    fn gram_norm_is_n_for_normalized_designs() {
        for seed in 0..5 {
            let x = generate_design(6, 10, Ensemble::Gaussian, seed).unwrap();
            assert!((gram_l1_linf_norm(&x) - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gram_norm_vertex_attainment() {
        // The l1->linf norm of X^T X is attained at a signed basis vector;
        // random unit-l1 vectors never exceed it.
        let x = generate_design(3, 5, Ensemble::Gaussian, 9).unwrap();
        // Undo the column normalization to get a generic matrix.
        let mut m = x.clone();
        let mut rng = Rng::keyed(1, Purpose::MonteCarlo, 0);
        for i in 0..3 {
            for j in 0..5 {
                m[(i, j)] += 0.1 * rng.next_normal();
            }
        }
        let claimed = gram_l1_linf_norm(&m);
        let g = m.gram();
        let mut best = 0.0f64;
        // Signed vertices attain the norm exactly.
        for j in 0..5 {
            for sign in [-1.0, 1.0] {
                let mut v = vec![0.0; 5];
                v[j] = sign;
                let image = g.matvec(&v);
                best = best.max(image.iter().fold(0.0f64, |m, x| m.max(x.abs())));
            }
        }
        assert!((claimed - best).abs() < 1e-12);
        // Random points of the l1 sphere stay below.
        for t in 0..100_000u64 {
            let mut rng = Rng::keyed(33, Purpose::MonteCarlo, t);
            let mut v: Vec<f64> = (0..5).map(|_| rng.next_normal()).collect();
            let l1: f64 = v.iter().map(|x| x.abs()).sum();
            for x in v.iter_mut() {
                *x /= l1;
            }
            let image = g.matvec(&v);
            let val = image.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(val <= claimed + 1e-6);
        }
    }

    #[test]
    fn instance_rejects_incompressible_beta0() {
        let x = generate_design(3, 4, Ensemble::Gaussian, 1).unwrap();
        let beta0 = vec![1.0, 1.0, 1.0, 1.0];
        assert!(ProblemInstance::new(1, x.clone(), beta0.clone(), 1.0, 0.5).is_err());
        // Large enough slack accepts it.
        assert!(ProblemInstance::new(1, x, beta0, 1.0, 3.0).is_ok());
    }
}
