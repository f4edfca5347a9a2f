//! Restricted isometry and restricted orthogonality constants of the
//! normalized design, computed exhaustively at desk scale.
//!
//! `delta_k` is the worst deviation of any k-column Gram submatrix of the
//! unit-column design from the identity, measured by extreme eigenvalues.
//! `theta_{k1,k2}` is the largest top singular value of a cross-Gram block
//! between disjoint column sets. The isometry certificate records both
//! together with the `delta + theta < 1` verdict the downstream bounds
//! condition on.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::linalg::{spectral_norm, sym_eigen, Mat};
use crate::rng::{Purpose, Rng};
use crate::supports::{check_enumeration_cap, check_pair_cap, Combinations};
use crate::{Result, DEFAULT_ENUMERATION_CAP};

/// How a certificate's constants were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RipMethod {
    /// Exact values from full support enumeration.
    Exhaustive,
    /// Certified lower bounds from randomized support sampling.
    RandomizedLowerBound,
}

/// Computed isometry constants and the assumption verdict.
#[derive(Debug, Clone)]
pub struct RipCertificate {
    /// Support size for `delta_k` (equal to `2S` when certifying).
    pub k: usize,
    pub delta_k: f64,
    /// Block sizes for `theta_{k1,k2}` (equal to `(S, 2S)` when certifying).
    pub k1: usize,
    pub k2: usize,
    pub theta: f64,
    pub method: RipMethod,
    pub a4_satisfied: bool,
}

/// Exact `delta_k` by enumerating all size-`k` supports.
///
/// Smaller supports are covered automatically: eigenvalues of principal
/// submatrices interlace, so the extreme deviation over size-`k` supports
/// dominates every smaller support.
pub fn delta_exhaustive(xtilde: &Mat, k: usize) -> Result<f64> {
    delta_exhaustive_with_cap(xtilde, k, DEFAULT_ENUMERATION_CAP)
}

pub fn delta_exhaustive_with_cap(xtilde: &Mat, k: usize, cap: u64) -> Result<f64> {
    let p = xtilde.cols();
    if k == 0 || k > p {
        return Err(crate::Error::InvalidParameter("need 1 <= k <= p"));
    }
    check_enumeration_cap(p as u64, k as u64, cap)?;
    let mut worst = 0.0f64;
    for support in Combinations::new(p, k) {
        worst = worst.max(support_deviation(xtilde, &support));
    }
    Ok(worst)
}

fn support_deviation(xtilde: &Mat, support: &[usize]) -> f64 {
    let g = xtilde.gram_of_columns(support);
    let eig = sym_eigen(&g);
    let lo = eig.values.first().copied().unwrap_or(1.0);
    let hi = eig.values.last().copied().unwrap_or(1.0);
    (hi - 1.0).max(1.0 - lo)
}

/// Exact `theta_{k1,k2}` by enumerating all disjoint support pairs.
pub fn theta_exhaustive(xtilde: &Mat, k1: usize, k2: usize) -> Result<f64> {
    theta_exhaustive_with_cap(xtilde, k1, k2, DEFAULT_ENUMERATION_CAP)
}

pub fn theta_exhaustive_with_cap(xtilde: &Mat, k1: usize, k2: usize, cap: u64) -> Result<f64> {
    let p = xtilde.cols();
    if k1 == 0 || k2 == 0 || k1 + k2 > p {
        return Err(crate::Error::InvalidParameter("need k1, k2 >= 1 and k1 + k2 <= p"));
    }
    check_pair_cap(p as u64, k1 as u64, k2 as u64, cap)?;
    let mut worst = 0.0f64;
    for left in Combinations::new(p, k1) {
        let rest: Vec<usize> = (0..p).filter(|j| !left.contains(j)).collect();
        for right_local in Combinations::new(rest.len(), k2) {
            let right: Vec<usize> = right_local.iter().map(|&i| rest[i]).collect();
            let cross = xtilde.cross_gram(&left, &right);
            worst = worst.max(spectral_norm(&cross));
        }
    }
    Ok(worst)
}

/// Certifies the isometry assumption for sparsity `s`: computes
/// `delta_{2S}` and `theta_{S,2S}` exhaustively and records whether their
/// sum is below one.
pub fn certify_a4(xtilde: &Mat, s: usize) -> Result<RipCertificate> {
    certify_a4_with_cap(xtilde, s, DEFAULT_ENUMERATION_CAP)
}

pub fn certify_a4_with_cap(xtilde: &Mat, s: usize, cap: u64) -> Result<RipCertificate> {
    let p = xtilde.cols();
    if s == 0 || 3 * s > p {
        return Err(crate::Error::InvalidParameter(
            "certification needs 1 <= S and 3S <= p for disjoint (S, 2S) pairs",
        ));
    }
    let delta = delta_exhaustive_with_cap(xtilde, 2 * s, cap)?;
    let theta = theta_exhaustive_with_cap(xtilde, s, 2 * s, cap)?;
    Ok(RipCertificate {
        k: 2 * s,
        delta_k: delta,
        k1: s,
        k2: 2 * s,
        theta,
        method: RipMethod::Exhaustive,
        a4_satisfied: delta + theta < 1.0,
    })
}

/// Certified lower bound on `delta_k` from randomly sampled supports.
///
/// Samples until `trials` distinct supports have been visited (or the whole
/// space is exhausted), so `trials = C(p, k)` reproduces the exhaustive
/// value. Always at most the exhaustive constant.
pub fn delta_lower_bound_random(xtilde: &Mat, k: usize, trials: u64, seed: u64) -> Result<f64> {
    let p = xtilde.cols();
    if k == 0 || k > p {
        return Err(crate::Error::InvalidParameter("need 1 <= k <= p"));
    }
    if trials == 0 {
        return Err(crate::Error::InvalidParameter("need trials >= 1"));
    }
    let total = crate::logsum::binomial_exact(p as u64, k as u64).unwrap_or(u128::MAX);
    let want = (trials as u128).min(total);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut worst = 0.0f64;
    let mut attempt = 0u64;
    let max_attempts = trials.saturating_mul(100).max(1000);
    while (seen.len() as u128) < want && attempt < max_attempts {
        let mut rng = Rng::keyed(seed, Purpose::SupportSample, attempt);
        attempt += 1;
        let support = rng.sample_support(p, k);
        if seen.insert(support.clone()) {
            worst = worst.max(support_deviation(xtilde, &support));
        }
    }
    Ok(worst)
}
