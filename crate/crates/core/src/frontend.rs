//! DC biasing and the non-negativity front-ends: clipping, absolute value,
//! sign extraction, and their distortion decompositions.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 methods take over when std is enabled
use num_traits::Float;

use crate::ofdm::{Ofdm, OfdmFrame, RealSignal, SignalRole};
use crate::{Error, Result};

/// DC bias level expressed through the proportionality constant kappa:
/// `b_dc = kappa * sigma_s`, with the dB power overhead
/// `beta_db = 10 log10(1 + kappa^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasSpec {
    kappa: f64,
    sigma_s: f64,
    b_dc: f64,
    beta_db: f64,
}

impl BiasSpec {
    pub fn new(kappa: f64, sigma_s: f64) -> BiasSpec {
        assert!(kappa >= 0.0, "kappa must be non-negative");
        assert!(sigma_s > 0.0, "sigma_s must be positive");
        BiasSpec {
            kappa,
            sigma_s,
            b_dc: kappa * sigma_s,
            beta_db: 10.0 * (1.0 + kappa * kappa).log10(),
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    pub fn b_dc(&self) -> f64 {
        self.b_dc
    }

    pub fn beta_db(&self) -> f64 {
        self.beta_db
    }
}

/// A vector over {+1, -1}; zero is counted as positive where it arises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn all_ones(len: usize) -> SignVector {
        SignVector { signs: alloc::vec![1i8; len] }
    }

    pub(crate) fn from_raw(signs: Vec<i8>) -> SignVector {
        debug_assert!(signs.iter().all(|&s| s == 1 || s == -1));
        SignVector { signs }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.signs
    }

    /// Elementwise product with a sample vector.
    pub fn apply(&self, samples: &[f64]) -> Vec<f64> {
        debug_assert_eq!(samples.len(), self.signs.len());
        samples
            .iter()
            .zip(&self.signs)
            .map(|(&x, &s)| x * f64::from(s))
            .collect()
    }

    pub fn count_negative(&self) -> usize {
        self.signs.iter().filter(|&&s| s == -1).count()
    }
}

fn expect_role(signal: &RealSignal, expected: SignalRole) -> Result<()> {
    if signal.role() == expected {
        Ok(())
    } else {
        Err(Error::RoleMismatch { expected, got: signal.role() })
    }
}

/// `s_B[n] = s[n] + B_DC`.
pub fn add_bias(signal: &RealSignal, bias: &BiasSpec) -> Result<RealSignal> {
    expect_role(signal, SignalRole::Raw)?;
    if signal.sigma_s() != bias.sigma_s() {
        return Err(Error::SigmaMismatch { signal: signal.sigma_s(), bias: bias.sigma_s() });
    }
    let samples = signal.samples().iter().map(|&x| x + bias.b_dc()).collect();
    Ok(RealSignal::new(samples, SignalRole::Biased, bias.kappa(), bias.sigma_s()))
}

/// Zero-level clipping: negative samples are replaced by zero.
pub fn clip(signal: &RealSignal) -> Result<RealSignal> {
    expect_role(signal, SignalRole::Biased)?;
    let samples = signal.samples().iter().map(|&x| x.max(0.0)).collect();
    Ok(signal.with_samples(samples, SignalRole::Clipped))
}

/// Absolute-value front-end: negative samples are folded up instead of lost.
pub fn absval(signal: &RealSignal) -> Result<RealSignal> {
    expect_role(signal, SignalRole::Biased)?;
    let samples = signal.samples().iter().map(|&x| x.abs()).collect();
    Ok(signal.with_samples(samples, SignalRole::Absolute))
}

/// Sign series of the biased signal, with sgn(0) = +1.
pub fn signs(signal: &RealSignal) -> Result<SignVector> {
    expect_role(signal, SignalRole::Biased)?;
    let signs = signal.samples().iter().map(|&x| if x >= 0.0 { 1i8 } else { -1 }).collect();
    Ok(SignVector::from_raw(signs))
}

/// Clipping noise `n_c = clip(s_B) - s_B`: zero where the signal is
/// non-negative, `-s_B` otherwise.
pub fn clipping_noise(signal: &RealSignal) -> Result<Vec<f64>> {
    expect_role(signal, SignalRole::Biased)?;
    Ok(signal.samples().iter().map(|&x| if x < 0.0 { -x } else { 0.0 }).collect())
}

/// Absolute-value noise `n_a = |s_B| - s_B`; exactly twice the clipping noise.
pub fn av_noise(signal: &RealSignal) -> Result<Vec<f64>> {
    expect_role(signal, SignalRole::Biased)?;
    Ok(signal.samples().iter().map(|&x| if x < 0.0 { -2.0 * x } else { 0.0 }).collect())
}

/// Digital-domain transmitter: `s_aB[n] = |s[n] + B_DC|` in one pass.
/// Sample-for-sample identical to `absval(add_bias(modulate(frame)))`.
pub fn simplified_transmit(ofdm: &Ofdm, frame: &OfdmFrame, bias: &BiasSpec) -> Result<RealSignal> {
    let s = ofdm.modulate(frame)?;
    let samples = s.samples().iter().map(|&x| (x + bias.b_dc()).abs()).collect();
    Ok(RealSignal::new(samples, SignalRole::Absolute, bias.kappa(), bias.sigma_s()))
}
