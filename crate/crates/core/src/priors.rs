//! The three priors under study and their analytic small-ball machinery.
//!
//! * sparsity(S)-Gaussian: a uniformly random size-`S` support carries
//!   i.i.d. `N(0, V^2)` slabs, everything else is an exact zero;
//! * Bernoulli-Gaussian: independent `Bernoulli(phi)` inclusions with
//!   `N(0, V^2)` slabs;
//! * Laplace: i.i.d. `Laplace(lambda)` coordinates, kept as the
//!   demonstration that volume-based small-ball masses collapse in high
//!   dimension.
//!
//! The analytic lower bounds on the prior mass of small l1 balls around a
//! sparse center are evaluated entirely in log domain: they multiply
//! `p - K` near-unit factors against terms like `(2 C1)^S / Gamma(1 + S)`
//! that underflow linear arithmetic almost immediately.

use alloc::vec::Vec;

use crate::logsum::{binomial_estimate, lgamma, log_binomial};
use crate::problem::lp_norm;
use crate::rng::{Purpose, Rng};
use crate::{Error, Result};

/// Tagged description of one prior.
#[derive(Debug, Clone, PartialEq)]
pub enum PriorSpec {
    SparsityGaussian { p: usize, s: usize, v: f64 },
    BernoulliGaussian { p: usize, phi: f64, v: f64 },
    Laplace { p: usize, lambda: f64 },
}

impl PriorSpec {
    pub fn dimension(&self) -> usize {
        match *self {
            PriorSpec::SparsityGaussian { p, .. } => p,
            PriorSpec::BernoulliGaussian { p, .. } => p,
            PriorSpec::Laplace { p, .. } => p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PriorSpec::SparsityGaussian { p, s, v } => {
                if p == 0 || s == 0 || s > p {
                    return Err(Error::InvalidParameter("need 1 <= S <= p"));
                }
                if !(v > 0.0) {
                    return Err(Error::InvalidParameter("slab scale V must be positive"));
                }
            }
            PriorSpec::BernoulliGaussian { p, phi, v } => {
                if p == 0 {
                    return Err(Error::InvalidParameter("need p >= 1"));
                }
                if !(phi > 0.0 && phi < 1.0) {
                    return Err(Error::InvalidParameter("phi must lie in (0, 1)"));
                }
                if !(v > 0.0) {
                    return Err(Error::InvalidParameter("slab scale V must be positive"));
                }
            }
            PriorSpec::Laplace { p, lambda } => {
                if p == 0 {
                    return Err(Error::InvalidParameter("need p >= 1"));
                }
                if !(lambda > 0.0) {
                    return Err(Error::InvalidParameter("rate lambda must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// Monte Carlo estimate of a small-ball probability, optionally paired with
/// the analytic lower bound it validates (log scale for the analytic side,
/// linear for the estimate).
#[derive(Debug, Clone)]
pub struct SmallBallEstimate {
    pub log_analytic_lower_bound: Option<f64>,
    pub mc_estimate: f64,
    pub mc_std_error: f64,
    pub radius: f64,
    pub norm_index: f64,
}

/// One draw from the prior. Supports are drawn first, then slab values.
pub fn sample_prior(spec: &PriorSpec, seed: u64, index: u64) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = Rng::keyed(seed, Purpose::Prior, index);
    Ok(match *spec {
        PriorSpec::SparsityGaussian { p, s, v } => {
            let support = rng.sample_support(p, s);
            let mut beta = alloc::vec![0.0; p];
            for &j in &support {
                beta[j] = v * rng.next_normal();
            }
            beta
        }
        PriorSpec::BernoulliGaussian { p, phi, v } => {
            let mut beta = alloc::vec![0.0; p];
            let included: Vec<usize> = (0..p).filter(|_| rng.next_f64() < phi).collect();
            for j in included {
                beta[j] = v * rng.next_normal();
            }
            beta
        }
        PriorSpec::Laplace { p, lambda } => (0..p)
            .map(|_| {
                let u = rng.next_f64() - 0.5;
                let mag = -libm::log1p(-2.0 * u.abs());
                let sign = if u < 0.0 { -1.0 } else { 1.0 };
                sign * mag / lambda
            })
            .collect(),
    })
}

/// Log of the sparsity(S)-Gaussian small-ball lower bound at l1 radius
/// `c1`, in terms of the summary statistics it actually depends on:
///
/// ```text
/// C(p,S)^-1 (2 pi V^2)^(-S/2) e^(-||b0||^2 / 2V^2) e^(-c1^2 / 2V^2)
///   (2 c1)^S / Gamma(1 + S)
/// ```
pub fn log_small_ball_sg_from_stats(p: f64, s: f64, v: f64, beta0_l2sq: f64, c1: f64) -> f64 {
    -log_binomial(p, s) - 0.5 * s * libm::log(2.0 * core::f64::consts::PI * v * v)
        - beta0_l2sq / (2.0 * v * v)
        - c1 * c1 / (2.0 * v * v)
        + s * libm::log(2.0 * c1)
        - lgamma(1.0 + s)
}

/// Sparsity(S)-Gaussian small-ball lower bound (natural log) for a concrete
/// center. `c_sup` must bound `||beta0||_inf`.
pub fn small_ball_lb_sg(spec: &PriorSpec, beta0: &[f64], c1: f64, c_sup: f64) -> Result<f64> {
    let PriorSpec::SparsityGaussian { p, s, v } = *spec else {
        return Err(Error::PriorKindMismatch);
    };
    spec.validate()?;
    if beta0.len() != p {
        return Err(Error::InvalidParameter("beta0 length must equal p"));
    }
    if !(c1 > 0.0) {
        return Err(Error::InvalidParameter("radius c1 must be positive"));
    }
    let sup = beta0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if sup > c_sup + 1e-12 {
        return Err(Error::InvalidParameter("||beta0||_inf exceeds the declared bound"));
    }
    let actual = beta0.iter().filter(|x| **x != 0.0).count();
    if actual > s {
        return Err(Error::SparsityMismatch { expected: s, actual });
    }
    let l2sq: f64 = beta0.iter().map(|x| x * x).sum();
    Ok(log_small_ball_sg_from_stats(p as f64, s as f64, v, l2sq, c1))
}

/// The relaxed sparsity(S)-Gaussian bound used in asymptotic sweeps, with
/// its two constants exposed. The radius is pinned internally to the
/// `tau = 1` small-ball radius `(2 sigma / 3) sqrt(log p / n)`, matching
/// the chain it was derived from:
///
/// ```text
/// bound = eta0 * (eta1 * (1/p) sqrt(log p / n))^S,
/// eta0 = exp(-c1^2 / 2V^2),
/// eta1 = (2/3) exp(-c_sup^2 / 2V^2) sqrt(2 sigma^2 / (pi e^2 V^2))
/// ```
#[derive(Debug, Clone, Copy)]
pub struct RelaxedSgBound {
    pub log_bound: f64,
    pub log_eta0: f64,
    pub log_eta1: f64,
    pub c1: f64,
}

pub fn sg_relaxed_lb(p: f64, s: f64, v: f64, c_sup: f64, sigma: f64, n: f64) -> RelaxedSgBound {
    let logp = libm::log(p);
    let c1 = (2.0 * sigma / 3.0) * libm::sqrt(logp / n);
    let log_eta0 = -c1 * c1 / (2.0 * v * v);
    let e = core::f64::consts::E;
    let log_eta1 = libm::log(2.0 / 3.0) - c_sup * c_sup / (2.0 * v * v)
        + 0.5 * libm::log(2.0 * sigma * sigma / (core::f64::consts::PI * e * e * v * v));
    let log_bound =
        log_eta0 + s * (log_eta1 - libm::log(p) + 0.5 * (libm::log(logp) - libm::log(n)));
    RelaxedSgBound { log_bound, log_eta0, log_eta1, c1 }
}

/// Log of the Bernoulli-Gaussian small-ball lower bound at l1 radius `c1`
/// from summary statistics. `k` is the sparsity of the center and
/// `phi = k / p` the inclusion probability:
///
/// ```text
/// e^(-||b0||^2/2V^2 - c1^2/2V^2) (g/K)^K (1 - phi + g/p)^(p-K),
/// g = 2 phi c1 / sqrt(2 pi V^2)
/// ```
pub fn log_small_ball_bg_from_stats(
    p: f64,
    k: f64,
    v: f64,
    phi: f64,
    beta0_l2sq: f64,
    c1: f64,
) -> f64 {
    let g = 2.0 * phi * c1 / libm::sqrt(2.0 * core::f64::consts::PI * v * v);
    -beta0_l2sq / (2.0 * v * v) - c1 * c1 / (2.0 * v * v) + k * (libm::log(g) - libm::log(k))
        + (p - k) * libm::log1p(-phi + g / p)
}

/// Bernoulli-Gaussian small-ball lower bound (natural log) for a concrete
/// `K`-sparse center; requires `p * phi = K`.
pub fn small_ball_lb_bg(
    spec: &PriorSpec,
    beta0: &[f64],
    c1: f64,
    k: usize,
    c_sup: f64,
) -> Result<f64> {
    let PriorSpec::BernoulliGaussian { p, phi, v } = *spec else {
        return Err(Error::PriorKindMismatch);
    };
    spec.validate()?;
    if beta0.len() != p {
        return Err(Error::InvalidParameter("beta0 length must equal p"));
    }
    if !(c1 > 0.0) {
        return Err(Error::InvalidParameter("radius c1 must be positive"));
    }
    let actual = beta0.iter().filter(|x| **x != 0.0).count();
    if actual != k {
        return Err(Error::SparsityMismatch { expected: k, actual });
    }
    if (phi * p as f64 - k as f64).abs() > 1e-9 {
        return Err(Error::InvalidParameter("need p * phi = K"));
    }
    let sup = beta0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if sup > c_sup + 1e-12 {
        return Err(Error::InvalidParameter("||beta0||_inf exceeds the declared bound"));
    }
    let l2sq: f64 = beta0.iter().map(|x| x * x).sum();
    Ok(log_small_ball_bg_from_stats(p as f64, k as f64, v, phi, l2sq, c1))
}

/// Log of the Chernoff-Hoeffding tail bound on the Bernoulli-Gaussian
/// support size, `pr{ sum gamma_i >= S } <= (K/S)^S ((p-K)/(p-S))^(p-S)`.
/// This dominates the prior mass outside the S-sparse set.
pub fn log_tail_mass_nonsparse_bg(phi: f64, p: u64, k: u64, s: u64) -> Result<f64> {
    if s < k {
        return Err(Error::InvalidParameter(
            "tail bound needs S >= K (it exceeds one below the mean)",
        ));
    }
    if s > p {
        return Err(Error::InvalidParameter("need S <= p"));
    }
    if (phi * p as f64 - k as f64).abs() > 1e-9 {
        return Err(Error::InvalidParameter("need p * phi = K"));
    }
    let (pf, kf, sf) = (p as f64, k as f64, s as f64);
    let first = if s == 0 { 0.0 } else { sf * (libm::log(kf) - libm::log(sf)) };
    let second = if s == p {
        0.0
    } else {
        (pf - sf) * (libm::log(pf - kf) - libm::log(pf - sf))
    };
    Ok(first + second)
}

/// Log of the volume-based small-ball estimate for the Laplace prior at a
/// zero center: max density `(lambda/2)^p` times the l1-ball volume
/// `(2 r)^p / p!`. The factorial decay is exactly what makes the universal
/// bound vacuous for this prior; `n` is carried only to document which
/// sample size the radius was derived from.
pub fn laplace_smallball_diagnostic(lambda: f64, p: u64, _n: u64, radius: f64) -> Result<f64> {
    if p == 0 || !(lambda > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidParameter("need p >= 1, lambda > 0, radius > 0"));
    }
    let pf = p as f64;
    Ok(pf * libm::log(lambda * radius) - lgamma(pf + 1.0))
}

/// Monte Carlo small-ball probability: the fraction of `trials` prior draws
/// inside the l_u ball of the given radius around `beta0`.
pub fn mc_small_ball(
    spec: &PriorSpec,
    beta0: &[f64],
    radius: f64,
    u: f64,
    trials: u64,
    seed: u64,
) -> Result<SmallBallEstimate> {
    spec.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("need trials >= 1"));
    }
    if beta0.len() != spec.dimension() {
        return Err(Error::InvalidParameter("beta0 length must equal p"));
    }
    let mut hits = 0u64;
    let mut diff = alloc::vec![0.0; beta0.len()];
    for t in 0..trials {
        let draw = sample_prior(spec, seed, t)?;
        for (d, (a, b)) in diff.iter_mut().zip(draw.iter().zip(beta0)) {
            *d = a - b;
        }
        if lp_norm(&diff, u)? < radius {
            hits += 1;
        }
    }
    let (mc_estimate, mc_std_error) = binomial_estimate(hits, trials);
    Ok(SmallBallEstimate {
        log_analytic_lower_bound: None,
        mc_estimate,
        mc_std_error,
        radius,
        norm_index: u,
    })
}
