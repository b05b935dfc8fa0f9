//! AWGN measurement model, SNR accounting, and the chromatic-dispersion
//! impairment applied to the transmitted waveform.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods take over when std is enabled
use num_traits::Float;
use rand_core::RngCore;

use crate::fft::Direction;
use crate::ofdm::{Ofdm, RealSignal, SignalRole};
use crate::{Error, Result};

/// Channel parameters: additive-noise deviation and the dimensionless
/// dispersion group D_n = B^2 beta'' L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub sigma_v: f64,
    pub normalized_dispersion: f64,
}

impl ChannelSpec {
    pub fn new(sigma_v: f64, normalized_dispersion: f64) -> Result<ChannelSpec> {
        if sigma_v < 0.0 {
            return Err(Error::NegativeSigma(sigma_v));
        }
        if normalized_dispersion < 0.0 {
            return Err(Error::NegativeDispersion(normalized_dispersion));
        }
        Ok(ChannelSpec { sigma_v, normalized_dispersion })
    }

    pub fn snr_db(&self, sigma_s: f64) -> f64 {
        10.0 * (sigma_s * sigma_s / (self.sigma_v * self.sigma_v)).log10()
    }
}

/// Noise deviation for a target SNR: sigma_v = sigma_s 10^(-snr/20).
/// An infinite SNR maps to exactly zero noise.
pub fn snr_to_sigma_v(snr_db: f64, sigma_s: f64) -> f64 {
    assert!(sigma_s > 0.0, "sigma_s must be positive");
    sigma_s * 10.0f64.powf(-snr_db / 20.0)
}

/// One standard-normal pair by the Box-Muller transform. Uses the top 53
/// bits of the stream for the uniforms, with the half-open interval shifted
/// to (0, 1] so the logarithm is always finite.
pub fn standard_normal_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let r = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * core::f64::consts::PI * u2;
    (r * angle.cos(), r * angle.sin())
}

/// Adds i.i.d. zero-mean Gaussian noise of deviation `sigma_v`.
pub fn awgn<R: RngCore + ?Sized>(
    signal: &RealSignal,
    sigma_v: f64,
    rng: &mut R,
) -> Result<RealSignal> {
    if sigma_v < 0.0 {
        return Err(Error::NegativeSigma(sigma_v));
    }
    if sigma_v == 0.0 {
        return Ok(signal.retag(SignalRole::Received, signal.kappa()));
    }
    let mut samples = signal.samples().to_vec();
    let mut i = 0;
    while i < samples.len() {
        let (a, b) = standard_normal_pair(rng);
        samples[i] += sigma_v * a;
        if i + 1 < samples.len() {
            samples[i + 1] += sigma_v * b;
        }
        i += 2;
    }
    Ok(signal.with_samples(samples, SignalRole::Received))
}

/// Circular all-pass quadratic-phase filter parameterized by the normalized
/// dispersion: bin k (1 <= k < N/2) is rotated by 2 pi^2 D_n (k/N)^2 and the
/// mirror bins by the conjugate, which keeps real signals exactly real and
/// preserves energy. The DC and Nyquist bins are left untouched.
pub fn apply_dispersion(
    ofdm: &Ofdm,
    signal: &RealSignal,
    normalized_dispersion: f64,
) -> Result<RealSignal> {
    if normalized_dispersion < 0.0 {
        return Err(Error::NegativeDispersion(normalized_dispersion));
    }
    let n = ofdm.n_fft();
    if signal.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: signal.len() });
    }
    if normalized_dispersion == 0.0 {
        return Ok(signal.clone());
    }

    let mut buf: Vec<Complex64> =
        signal.samples().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    ofdm.plan().process(&mut buf, Direction::Forward);
    let scale = 2.0 * core::f64::consts::PI * core::f64::consts::PI * normalized_dispersion;
    for k in 1..n / 2 {
        let frac = k as f64 / n as f64;
        let phase = scale * frac * frac;
        let h = Complex64::new(phase.cos(), phase.sin());
        buf[k] *= h;
        buf[n - k] *= h.conj();
    }
    ofdm.plan().process(&mut buf, Direction::Inverse);
    let inv_n = 1.0 / n as f64;
    let max_re = buf.iter().fold(0.0f64, |m, c| m.max(c.re.abs())) * inv_n;
    let max_im = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs())) * inv_n;
    assert!(
        max_im <= 1e-9 * max_re.max(1e-300),
        "dispersion filter produced an imaginary residue"
    );
    let samples = buf.iter().map(|c| c.re * inv_n).collect();
    Ok(signal.with_samples(samples, signal.role()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand_chacha::ChaCha8Rng;
    use rand_core::SeedableRng;

    fn random_signal(n: usize, seed: u64) -> RealSignal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = (0..n).map(|_| standard_normal_pair(&mut rng).0).collect();
        RealSignal::new(samples, SignalRole::Raw, 0.0, 1.0)
    }

    #[test]
    fn snr_conversions() {
        assert_abs_diff_eq!(snr_to_sigma_v(0.0, 1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(snr_to_sigma_v(20.0, 1.0), 0.1, epsilon = 1e-15);
        assert_eq!(snr_to_sigma_v(f64::INFINITY, 1.0), 0.0);
        for snr in [-3.0, 0.0, 7.5, 31.0] {
            let sv = snr_to_sigma_v(snr, 1.0);
            let back = ChannelSpec::new(sv, 0.0).unwrap().snr_db(1.0);
            assert_abs_diff_eq!(back, snr, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_sigma_noise_is_identity() {
        let sig = random_signal(64, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = awgn(&sig, 0.0, &mut rng).unwrap();
        assert_eq!(out.samples(), sig.samples());
        assert_eq!(out.role(), SignalRole::Received);
    }

    #[test]
    fn awgn_rejects_negative_sigma() {
        let sig = random_signal(8, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(awgn(&sig, -0.1, &mut rng), Err(Error::NegativeSigma(_))));
    }

    #[test]
    fn awgn_moments() {
        let n = 1_000_000usize;
        let sig = RealSignal::new(alloc::vec![0.0; n], SignalRole::Raw, 0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = awgn(&sig, 0.5, &mut rng).unwrap();
        let mean: f64 = out.samples().iter().sum::<f64>() / n as f64;
        let var: f64 = out.samples().iter().map(|x| x * x).sum::<f64>() / n as f64;
        // 4-sigma bound on the sample mean of N(0, 0.25)
        assert!(mean.abs() < 4.0 * 0.5 / (n as f64).sqrt());
        assert_abs_diff_eq!(var, 0.25, epsilon = 0.0025);
    }

    #[test]
    fn awgn_passes_kolmogorov_smirnov() {
        let n = 1_000_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut xs: alloc::vec::Vec<f64> =
            (0..n / 2).flat_map(|_| {
                let (a, b) = standard_normal_pair(&mut rng);
                [a, b]
            }).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = xs.len() as f64;
        let mut d = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let cdf = 1.0 - crate::analytics::q_func(x);
            d = d.max((cdf - i as f64 / m).abs());
            d = d.max((cdf - (i + 1) as f64 / m).abs());
        }
        // critical value at significance 0.001: sqrt(-ln(0.0005)/2)/sqrt(n)
        let crit = (-(0.0005f64).ln() / 2.0).sqrt() / m.sqrt();
        assert!(d < crit, "KS statistic {d} over {crit}");
    }

    #[test]
    fn dispersion_zero_is_identity() {
        let ofdm = Ofdm::new(64).unwrap();
        let sig = random_signal(64, 5);
        let out = apply_dispersion(&ofdm, &sig, 0.0).unwrap();
        assert_eq!(out.samples(), sig.samples());
    }

    #[test]
    fn dispersion_rejects_negative() {
        let ofdm = Ofdm::new(64).unwrap();
        let sig = random_signal(64, 5);
        assert!(matches!(
            apply_dispersion(&ofdm, &sig, -0.01),
            Err(Error::NegativeDispersion(_))
        ));
    }

    #[test]
    fn dispersion_preserves_energy_and_dc() {
        let ofdm = Ofdm::new(256).unwrap();
        let sig = random_signal(256, 6);
        for d in [0.01, 0.1, 0.75] {
            let out = apply_dispersion(&ofdm, &sig, d).unwrap();
            let e_in: f64 = sig.samples().iter().map(|x| x * x).sum();
            let e_out: f64 = out.samples().iter().map(|x| x * x).sum();
            assert_abs_diff_eq!(e_out, e_in, epsilon = 1e-9 * e_in);
            let dc_in: f64 = sig.samples().iter().sum();
            let dc_out: f64 = out.samples().iter().sum();
            assert_abs_diff_eq!(dc_out, dc_in, epsilon = 1e-9);
        }
    }

    #[test]
    fn dispersion_composes_additively() {
        let ofdm = Ofdm::new(128).unwrap();
        let sig = random_signal(128, 7);
        let twice = apply_dispersion(
            &ofdm,
            &apply_dispersion(&ofdm, &sig, 0.03).unwrap(),
            0.05,
        )
        .unwrap();
        let once = apply_dispersion(&ofdm, &sig, 0.08).unwrap();
        for (a, b) in twice.samples().iter().zip(once.samples()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn dispersion_is_linear() {
        let ofdm = Ofdm::new(128).unwrap();
        let a = random_signal(128, 8);
        let b = random_signal(128, 9);
        let summed = RealSignal::new(
            a.samples().iter().zip(b.samples()).map(|(x, y)| 2.0 * x + 3.0 * y).collect(),
            SignalRole::Raw,
            0.0,
            1.0,
        );
        let d = 0.07;
        let lhs = apply_dispersion(&ofdm, &summed, d).unwrap();
        let da = apply_dispersion(&ofdm, &a, d).unwrap();
        let db = apply_dispersion(&ofdm, &b, d).unwrap();
        for i in 0..128 {
            assert_abs_diff_eq!(
                lhs.samples()[i],
                2.0 * da.samples()[i] + 3.0 * db.samples()[i],
                epsilon = 1e-10
            );
        }
    }
}
