//! Log-domain arithmetic helpers.
//!
//! Concentration bounds multiply quantities like `p^(1+tau)` against
//! small-ball masses of order `exp(-S log p)`, which under- or overflow
//! linear f64 long before the interesting parameter regimes. All bound
//! evaluation therefore happens on logs and is exponentiated only for
//! reporting.


/// `log(exp(a) + exp(b))` with max-subtraction.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + libm::log1p(libm::exp(lo - hi))
}

/// `log(sum_i exp(x_i))`; returns `-inf` on an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = xs.iter().map(|&x| libm::exp(x - hi)).sum();
    hi + libm::log(sum)
}

/// Natural log of the gamma function.
pub fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `log C(n, k)` via log-gamma, valid far beyond integer overflow.
pub fn log_binomial(n: f64, k: f64) -> f64 {
    if k < 0.0 || k > n {
        return f64::NEG_INFINITY;
    }
    lgamma(n + 1.0) - lgamma(k + 1.0) - lgamma(n - k + 1.0)
}

/// Exact binomial coefficient when it fits in `u128`, else `None`.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// Normalizes `log_weights` in place so that `sum(exp(w)) = 1`; returns the
/// log normalization constant.
pub fn normalize_log_weights(log_weights: &mut [f64]) -> f64 {
    let lse = log_sum_exp(log_weights);
    for w in log_weights.iter_mut() {
        *w -= lse;
    }
    lse
}

/// Mean and standard error of a Bernoulli sample given `hits` out of
/// `trials`.
pub fn binomial_estimate(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let p = hits as f64 / trials as f64;
    let se = libm::sqrt(p * (1.0 - p) / trials as f64);
    (p, se)
}

pub fn mean_and_standard_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, libm::sqrt(var / n as f64))
}
