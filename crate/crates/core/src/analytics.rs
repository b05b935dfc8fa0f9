//! Closed-form absolute-value-noise statistics, the Gaussian Q-function and
//! its inverse, the folding probability, and the minimum-bias design rule.

#[allow(unused_imports)] // inherent f64 methods take over when std is enabled
use num_traits::Float;

/// Moments of the AV noise at a given bias, all for `sigma_s = 1` unless
/// scaled: `p_a` is the folding probability, `mean`/`power` the first two
/// moments of `n_a`, `rms = sqrt(power)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvNoiseStats {
    pub kappa: f64,
    pub p_a: f64,
    pub mean: f64,
    pub power: f64,
    pub rms: f64,
}

/// Standard Gaussian tail probability Q(x), via the complementary error
/// function: Q(x) = erfc(x / sqrt(2)) / 2.
pub fn q_func(x: f64) -> f64 {
    assert!(x.is_finite(), "q_func requires finite input");
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Inverse of [`q_func`] by bisection; |Q(q_inv(p)) - p| <= ~1e-10.
/// Chosen over a rational approximation because it is called rarely and the
/// bracket width bounds the error directly.
pub fn q_inv(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "q_inv domain is (0, 1)");
    if p == 0.5 {
        return 0.0;
    }
    if p > 0.5 {
        return -q_inv(1.0 - p);
    }
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if q_func(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Probability that a biased sample is negative: p_a = Q(kappa).
pub fn folding_probability(kappa: f64) -> f64 {
    assert!(kappa >= 0.0, "kappa must be non-negative");
    q_func(kappa)
}

fn gaussian_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * core::f64::consts::PI).sqrt()
}

/// E[n_a] = 2 sigma_s [ phi(kappa) - kappa Q(kappa) ].
pub fn av_mean(kappa: f64, sigma_s: f64) -> f64 {
    assert!(kappa >= 0.0 && sigma_s > 0.0, "av_mean domain: kappa >= 0, sigma_s > 0");
    2.0 * sigma_s * (gaussian_density(kappa) - kappa * q_func(kappa))
}

/// E[n_a^2] = 4 sigma_s^2 [ (1 + kappa^2) Q(kappa) - kappa phi(kappa) ].
pub fn av_power(kappa: f64, sigma_s: f64) -> f64 {
    assert!(kappa >= 0.0 && sigma_s > 0.0, "av_power domain: kappa >= 0, sigma_s > 0");
    4.0 * sigma_s * sigma_s * ((1.0 + kappa * kappa) * q_func(kappa) - kappa * gaussian_density(kappa))
}

/// All AV-noise statistics at one bias point.
pub fn av_noise_stats(kappa: f64, sigma_s: f64) -> AvNoiseStats {
    let power = av_power(kappa, sigma_s);
    AvNoiseStats {
        kappa,
        p_a: folding_probability(kappa),
        mean: av_mean(kappa, sigma_s),
        power,
        rms: power.sqrt(),
    }
}

/// Smallest sufficient bias for a folding-probability budget:
/// B_DC = sigma_s * Q^{-1}(p_th).
pub fn min_bias(p_th: f64, sigma_s: f64) -> f64 {
    assert!(p_th > 0.0 && p_th < 0.5, "min_bias domain is 0 < p_th < 0.5");
    assert!(sigma_s > 0.0);
    sigma_s * q_inv(p_th)
}
