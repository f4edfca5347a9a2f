//! Exact spike-slab posterior for the sparsity(S)-Gaussian prior, by full
//! support enumeration.
//!
//! For each size-`S` support `gamma` the posterior restricted to that
//! support is Gaussian with
//!
//! ```text
//! Sigma_gamma = ((1/sigma^2) X_g^T X_g + (1/V^2) I)^(-1/2)
//! mu_gamma    = (1/sigma^2) Sigma_gamma^2 X_g^T y
//! ```
//!
//! and mixture weight proportional to
//! `det(Sigma_gamma) exp(mu^T Sigma^-2 mu / 2)`. Weights are normalized in
//! log domain with max subtraction; the exponent alone overflows linear
//! arithmetic even at small sizes. The module also numerically verifies
//! the determinant bracket, the projection-approximation gap, and the
//! reconstruction/noise inequalities that the sharp concentration bound is
//! assembled from.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, norm2, orthonormal_basis, spd_solve, sym_eigen, Mat};
use crate::logsum::{log_binomial, log_sum_exp, normalize_log_weights};
use crate::problem::ProblemInstance;
use crate::rip::RipCertificate;
use crate::rng::{Purpose, Rng};
use crate::supports::{check_enumeration_cap, set_difference, Combinations};
use crate::{Error, Result, DEFAULT_ENUMERATION_CAP};

/// One support's contribution to the posterior mixture.
#[derive(Debug, Clone)]
pub struct MixtureComponent {
    pub support: Vec<usize>,
    /// Normalized log weight.
    pub log_weight: f64,
    /// Posterior mean on the support coordinates.
    pub mu: Vec<f64>,
    /// `Sigma_gamma`, the inverse square root of the precision matrix.
    pub sigma_matrix: Mat,
    /// `log det(Sigma_gamma)`.
    pub log_det_sigma: f64,
}

/// The full posterior mixture over all `C(p, S)` supports.
#[derive(Debug, Clone)]
pub struct PosteriorMixture {
    pub components: Vec<MixtureComponent>,
    /// Log marginal likelihood of `y`, including all shared constants:
    /// `-||y||^2/(2 sigma^2) - (n/2) log(2 pi sigma^2) - S log V
    ///  - log C(p,S) + logsumexp(raw weights)`.
    pub log_evidence: f64,
    pub p: usize,
    pub s: usize,
    pub sigma: f64,
    pub v: f64,
}

/// Enumerates the exact posterior for slab scale `v > 0`.
pub fn enumerate_posterior(inst: &ProblemInstance, y: &[f64], v: f64) -> Result<PosteriorMixture> {
    enumerate_posterior_with_cap(inst, y, v, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_posterior_with_cap(
    inst: &ProblemInstance,
    y: &[f64],
    v: f64,
    cap: u64,
) -> Result<PosteriorMixture> {
    if !(v > 0.0) {
        return Err(Error::InvalidParameter("slab scale V must be positive"));
    }
    if inst.sigma <= 0.0 {
        return Err(Error::InvalidParameter("posterior enumeration needs sigma > 0"));
    }
    if y.len() != inst.n {
        return Err(Error::InvalidParameter("observation length must equal n"));
    }
    check_enumeration_cap(inst.p as u64, inst.s as u64, cap)?;

    let sigma2 = inst.sigma * inst.sigma;
    let mut components = Vec::new();
    let mut raw_weights = Vec::new();
    for support in Combinations::new(inst.p, inst.s) {
        let (component, raw) = build_component(inst, y, v, support, sigma2);
        raw_weights.push(raw);
        components.push(component);
    }
    let lse = log_sum_exp(&raw_weights);
    let mut normalized = raw_weights;
    normalize_log_weights(&mut normalized);
    for (c, w) in components.iter_mut().zip(&normalized) {
        c.log_weight = *w;
    }
    let n = inst.n as f64;
    let y_norm2 = dot(y, y);
    let log_evidence = -y_norm2 / (2.0 * sigma2)
        - 0.5 * n * libm::log(2.0 * core::f64::consts::PI * sigma2)
        - inst.s as f64 * libm::log(v)
        - log_binomial(inst.p as f64, inst.s as f64)
        + lse;
    Ok(PosteriorMixture {
        components,
        log_evidence,
        p: inst.p,
        s: inst.s,
        sigma: inst.sigma,
        v,
    })
}

fn build_component(
    inst: &ProblemInstance,
    y: &[f64],
    v: f64,
    support: Vec<usize>,
    sigma2: f64,
) -> (MixtureComponent, f64) {
    let k = support.len();
    let mut precision = inst.x.gram_of_columns(&support);
    for i in 0..k {
        for j in 0..k {
            precision[(i, j)] /= sigma2;
        }
        precision[(i, i)] += 1.0 / (v * v);
    }
    let eig = sym_eigen(&precision);
    // b = X_g^T y / sigma^2; mu = precision^-1 b.
    let xg = inst.x.select_columns(&support);
    let mut b = xg.tr_matvec(y);
    for bi in b.iter_mut() {
        *bi /= sigma2;
    }
    let mu = spd_solve(&eig, &b);
    // Quadratic form mu^T Sigma^-2 mu = b^T precision^-1 b.
    let quad = dot(&b, &mu);
    let log_det_sigma: f64 = eig.values.iter().map(|&l| -0.5 * libm::log(l)).sum();
    // Sigma = V diag(lambda^-1/2) V^T.
    let mut sigma_matrix = Mat::zeros(k, k);
    for t in 0..k {
        let col = eig.vectors.column(t);
        let inv_sqrt = 1.0 / libm::sqrt(eig.values[t]);
        for i in 0..k {
            for j in 0..k {
                sigma_matrix[(i, j)] += inv_sqrt * col[i] * col[j];
            }
        }
    }
    let raw = log_det_sigma + 0.5 * quad;
    (
        MixtureComponent { support, log_weight: 0.0, mu, sigma_matrix, log_det_sigma },
        raw,
    )
}

/// Stratified Monte Carlo estimate of the posterior mass of the l2 ball of
/// `radius` around `center`, with a binomial standard error.
///
/// Trials are allocated proportionally to component weights with at least
/// one draw per component above the weight floor; the total weight of the
/// components below the floor is folded into the standard error.
pub fn ball_mass(
    mix: &PosteriorMixture,
    center: &[f64],
    radius: f64,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidParameter("radius must be nonnegative"));
    }
    if center.len() != mix.p {
        return Err(Error::InvalidParameter("center length must equal p"));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need trials >= 1"));
    }
    const WEIGHT_FLOOR: f64 = 1e-12;
    let center_norm2 = dot(center, center);
    let mut estimate = 0.0;
    let mut variance = 0.0;
    let mut skipped_mass = 0.0;
    for (idx, comp) in mix.components.iter().enumerate() {
        let w = libm::exp(comp.log_weight);
        if w <= WEIGHT_FLOOR {
            skipped_mass += w;
            continue;
        }
        let m = ((trials as f64 * w) as u64).max(1);
        let k = comp.support.len();
        // Squared distance contributed by coordinates off the support.
        let on_norm2: f64 = comp.support.iter().map(|&j| center[j] * center[j]).sum();
        let off2 = (center_norm2 - on_norm2).max(0.0);
        let mut rng = Rng::keyed(seed, Purpose::MonteCarlo, idx as u64);
        let mut hits = 0u64;
        let mut z = vec![0.0; k];
        let r2 = radius * radius;
        for _ in 0..m {
            for zi in z.iter_mut() {
                *zi = rng.next_normal();
            }
            let draw = comp.sigma_matrix.matvec(&z);
            let mut d2 = off2;
            for (i, &j) in comp.support.iter().enumerate() {
                let diff = comp.mu[i] + draw[i] - center[j];
                d2 += diff * diff;
            }
            if d2 <= r2 {
                hits += 1;
            }
        }
        let phat = hits as f64 / m as f64;
        estimate += w * phat;
        variance += w * w * phat * (1.0 - phat) / m as f64;
    }
    Ok((estimate, libm::sqrt(variance) + skipped_mass))
}

/// Posterior mean, embedded back into the ambient coordinates.
pub fn posterior_mean(mix: &PosteriorMixture) -> Vec<f64> {
    let mut mean = vec![0.0; mix.p];
    for comp in &mix.components {
        let w = libm::exp(comp.log_weight);
        for (i, &j) in comp.support.iter().enumerate() {
            mean[j] += w * comp.mu[i];
        }
    }
    mean
}

/// One inequality violation found by a lemma checker.
#[derive(Debug, Clone)]
pub struct LemmaViolation {
    pub gamma: Vec<usize>,
    pub gamma_prime: Option<Vec<usize>>,
    pub lhs: f64,
    pub rhs: f64,
}

/// Outcome of a numeric lemma verification.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub name: String,
    pub checked: usize,
    pub pass: bool,
    /// Smallest slack `rhs - lhs` seen across all checks (negative means a
    /// violation of that magnitude).
    pub worst_margin: f64,
    pub violations: Vec<LemmaViolation>,
    /// Set when a conditional check was skipped because its hypothesis
    /// (noise event membership) failed.
    pub skipped_conditional: bool,
}

impl LemmaReport {
    fn new(name: &str) -> Self {
        LemmaReport {
            name: String::from(name),
            checked: 0,
            pass: true,
            worst_margin: f64::INFINITY,
            violations: Vec::new(),
            skipped_conditional: false,
        }
    }

    fn record(&mut self, lhs: f64, rhs: f64, tol: f64, gamma: &[usize], gp: Option<&[usize]>) {
        self.checked += 1;
        let margin = rhs - lhs;
        if margin < self.worst_margin {
            self.worst_margin = margin;
        }
        if margin < -tol {
            self.pass = false;
            if self.violations.len() < 16 {
                self.violations.push(LemmaViolation {
                    gamma: gamma.to_vec(),
                    gamma_prime: gp.map(|g| g.to_vec()),
                    lhs,
                    rhs,
                });
            }
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} ({} checks, worst margin {:.3e})",
            self.name,
            if self.pass { "pass" } else { "FAIL" },
            self.checked,
            self.worst_margin
        )
    }
}

fn log_det_sigma_for(inst: &ProblemInstance, v: f64, support: &[usize]) -> f64 {
    let sigma2 = inst.sigma * inst.sigma;
    let k = support.len();
    let mut precision = inst.x.gram_of_columns(support);
    for i in 0..k {
        for j in 0..k {
            precision[(i, j)] /= sigma2;
        }
        precision[(i, i)] += 1.0 / (v * v);
    }
    sym_eigen(&precision).values.iter().map(|&l| -0.5 * libm::log(l)).sum()
}

/// Verifies the determinant bracket for every support of size up to `2S`,
/// and the flat one-sided bound for size `2S + 1`:
///
/// ```text
/// (n(1+d)/s^2 + 1/V^2)^(-|g|/2) <= det(Sigma_g) <= (n(1-d)/s^2 + 1/V^2)^(-|g|/2)
/// det(Sigma_g) <= (n(1-d)/s^2 + 1/V^2)^(-S)          for |g| > 2S
/// ```
pub fn verify_lemma_det(
    inst: &ProblemInstance,
    v: f64,
    cert: &RipCertificate,
    cap: u64,
) -> Result<LemmaReport> {
    let mut report = LemmaReport::new("determinant bracket");
    let sigma2 = inst.sigma * inst.sigma;
    let n = inst.n as f64;
    let delta = cert.delta_k;
    let lo_rate = n * (1.0 + delta) / sigma2 + 1.0 / (v * v);
    let hi_rate = n * (1.0 - delta) / sigma2 + 1.0 / (v * v);
    if hi_rate <= 0.0 {
        return Err(Error::InvalidParameter("delta >= 1 makes the bracket empty"));
    }
    let two_s = 2 * inst.s;
    for k in 1..=two_s.min(inst.p) {
        check_enumeration_cap(inst.p as u64, k as u64, cap)?;
        for support in Combinations::new(inst.p, k) {
            let log_det = log_det_sigma_for(inst, v, &support);
            let log_lower = -(k as f64) / 2.0 * libm::log(lo_rate);
            let log_upper = -(k as f64) / 2.0 * libm::log(hi_rate);
            // Two one-sided checks in log domain.
            report.record(log_lower, log_det, 1e-9, &support, None);
            report.record(log_det, log_upper, 1e-9, &support, None);
        }
    }
    let oversize = two_s + 1;
    if oversize <= inst.p {
        check_enumeration_cap(inst.p as u64, oversize as u64, cap)?;
        let log_flat = -(inst.s as f64) * libm::log(hi_rate);
        for support in Combinations::new(inst.p, oversize) {
            let log_det = log_det_sigma_for(inst, v, &support);
            report.record(log_det, log_flat, 1e-9, &support, None);
        }
    }
    Ok(report)
}

fn true_support(beta0: &[f64]) -> Vec<usize> {
    beta0
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| if x != 0.0 { Some(i) } else { None })
        .collect()
}

/// Supersets of the true support with size at most `2S`.
fn supersets_of_truth(inst: &ProblemInstance) -> Vec<Vec<usize>> {
    let gamma0 = true_support(&inst.beta0);
    let complement: Vec<usize> = (0..inst.p).filter(|j| !gamma0.contains(j)).collect();
    let max_extra = (2 * inst.s).saturating_sub(gamma0.len());
    let mut out = Vec::new();
    for extra in 0..=max_extra.min(complement.len()) {
        for pick in Combinations::new(complement.len(), extra) {
            let mut g = gamma0.clone();
            g.extend(pick.iter().map(|&i| complement[i]));
            g.sort_unstable();
            out.push(g);
        }
    }
    out
}

/// Verifies the projection-approximation gap on every superset of the true
/// support with `|gamma| <= 2S`: both displayed operator norms are at most
/// `sigma^2 / (n (1 - delta) V^2 + sigma^2)`.
pub fn verify_lemma_projappx(
    inst: &ProblemInstance,
    v: f64,
    cert: &RipCertificate,
) -> Result<LemmaReport> {
    let mut report = LemmaReport::new("projection approximation gap");
    let sigma2 = inst.sigma * inst.sigma;
    let n = inst.n as f64;
    let bound = sigma2 / (n * (1.0 - cert.delta_k) * v * v + sigma2);
    for gamma in supersets_of_truth(inst) {
        let k = gamma.len();
        let xg = inst.x.select_columns(&gamma);
        // Regularized inverse term: X (X^T X + (s^2/V^2) I)^-1 X^T.
        let mut reg = xg.gram();
        for i in 0..k {
            reg[(i, i)] += sigma2 / (v * v);
        }
        let eig = sym_eigen(&reg);
        // First display: ||P - X reg^-1 X^T||.
        let q = orthonormal_basis(&xg);
        let mut diff = q.matmul(&q.transpose());
        let xg_t = xg.transpose();
        for col in 0..inst.n {
            let rhs = xg_t.column(col);
            let sol = spd_solve(&eig, &rhs);
            let image = xg.matvec(&sol);
            for row in 0..inst.n {
                diff[(row, col)] -= image[row];
            }
        }
        let gap1 = sym_eigen(&diff).values.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        report.record(gap1, bound, 1e-9, &gamma, None);
        // Second display: ||I - reg^-1 X^T X||.
        let gram = xg.gram();
        let mut diff2 = Mat::identity(k);
        for col in 0..k {
            let rhs = gram.column(col);
            let sol = spd_solve(&eig, &rhs);
            for row in 0..k {
                diff2[(row, col)] -= sol[row];
            }
        }
        let gap2 = sym_eigen(&diff2).values.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        report.record(gap2, bound, 1e-9, &gamma, None);
    }
    Ok(report)
}

/// Reports from the paired reconstruction/noise inequalities.
pub struct TermLemmaReports {
    pub energy: LemmaReport,
    pub noise: LemmaReport,
    /// Value of `1 - delta - theta^2 / (1 - delta)`, which the lemma pair
    /// requires to be positive under the isometry assumption.
    pub contraction_margin: f64,
}

/// Verifies, on all pairs `(gamma ⊇ gamma0, |gamma'| <= 2S)`:
///
/// ```text
/// (Xb)^T (P_g' - P_g) (Xb)   <= -n (1 - d - t^2/(1-d)) ||b_{g0 \ g'}||^2
/// |(Xb)^T (P_g' - P_g) e|    <= 2s (1-d+t)/(1-d)
///     sqrt((1+a) max(|g0\g'|, |g'|) n log p) ||b_{g0 \ g'}||
/// ```
///
/// The second display is conditional on the noise event; if `e` fails it
/// the noise report is marked skipped.
pub fn verify_lemma_terms(
    inst: &ProblemInstance,
    cert: &RipCertificate,
    e: &[f64],
    alpha: f64,
    cap: u64,
) -> Result<TermLemmaReports> {
    if e.len() != inst.n {
        return Err(Error::InvalidParameter("noise length must equal n"));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter("alpha must be positive"));
    }
    let delta = cert.delta_k;
    let theta = cert.theta;
    if delta + theta >= 1.0 {
        return Err(Error::A4Violated { delta, theta });
    }
    let mut energy = LemmaReport::new("projection energy loss");
    let mut noise = LemmaReport::new("noise correlation");
    let contraction = 1.0 - delta - theta * theta / (1.0 - delta);
    let contraction_margin = contraction;

    let xtilde = inst.normalized_design();
    let in_event =
        crate::bounds::noise_event_membership(&xtilde.xtilde, e, inst.sigma, alpha, inst.p)?;
    noise.skipped_conditional = !in_event;

    let n = inst.n as f64;
    let logp = libm::log(inst.p as f64);
    let gamma0 = true_support(&inst.beta0);
    let xb = inst.x.matvec(&inst.beta0);
    let xb_norm2 = dot(&xb, &xb);
    let scale = xb_norm2.max(1.0);

    // Projector functionals for every |gamma'| <= 2S:
    // a = ||P Xb||^2 and b = <P Xb, e>.
    let two_s = (2 * inst.s).min(inst.p);
    let mut count: u128 = 0;
    for k in 0..=two_s {
        count += crate::logsum::binomial_exact(inst.p as u64, k as u64).unwrap_or(u128::MAX);
    }
    if count > cap as u128 {
        return Err(Error::EnumerationCapExceeded { required: count, cap });
    }
    let mut primed: Vec<(Vec<usize>, f64, f64)> = Vec::new();
    for k in 0..=two_s {
        for support in Combinations::new(inst.p, k) {
            let (a, b) = if k == 0 {
                (0.0, 0.0)
            } else {
                let q = orthonormal_basis(&inst.x.select_columns(&support));
                let qxb = q.tr_matvec(&xb);
                let qe = q.tr_matvec(e);
                (dot(&qxb, &qxb), dot(&qxb, &qe))
            };
            primed.push((support, a, b));
        }
    }
    for gamma in supersets_of_truth(inst) {
        // gamma contains the truth, so P_gamma leaves X beta0 fixed.
        let (a_g, b_g) = {
            let q = orthonormal_basis(&inst.x.select_columns(&gamma));
            let qxb = q.tr_matvec(&xb);
            let qe = q.tr_matvec(e);
            (dot(&qxb, &qxb), dot(&qxb, &qe))
        };
        debug_assert!((a_g - xb_norm2).abs() <= 1e-8 * scale);
        for (gp, a_gp, b_gp) in &primed {
            let missing = set_difference(&gamma0, gp);
            let missing_norm2: f64 = missing.iter().map(|&j| inst.beta0[j] * inst.beta0[j]).sum();
            let lhs_energy = a_gp - a_g;
            let rhs_energy = -n * contraction * missing_norm2;
            energy.record(lhs_energy, rhs_energy, 1e-8 * scale, &gamma, Some(gp));
            if in_event {
                let lhs_noise = (b_gp - b_g).abs();
                let worst = missing.len().max(gp.len()) as f64;
                let rhs_noise = 2.0 * inst.sigma * (1.0 - delta + theta) / (1.0 - delta)
                    * libm::sqrt((1.0 + alpha) * worst * n * logp)
                    * libm::sqrt(missing_norm2);
                noise.record(lhs_noise, rhs_noise, 1e-8 * scale.max(norm2(e)), &gamma, Some(gp));
            }
        }
    }
    Ok(TermLemmaReports { energy, noise, contraction_margin })
}
