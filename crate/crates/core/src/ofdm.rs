//! Hermitian-symmetric frame assembly, unitary modulation to a real
//! time-domain signal, demodulation, and PAPR measurement.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods take over when std is enabled
use num_traits::Float;

use crate::fft::{Direction, FftPlan};
use crate::{Error, Result};

/// Tolerance for the Hermitian-symmetry check in `modulate`.
const HERMITIAN_TOL: f64 = 1e-12;

/// What stage of the transmit/receive chain a real sample vector represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalRole {
    Raw,
    Biased,
    Clipped,
    Absolute,
    Received,
}

/// A length-N real sample vector tagged with its chain stage, the bias
/// proportionality constant applied so far, and the design signal deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal {
    samples: Vec<f64>,
    role: SignalRole,
    kappa: f64,
    sigma_s: f64,
}

impl RealSignal {
    pub fn new(samples: Vec<f64>, role: SignalRole, kappa: f64, sigma_s: f64) -> RealSignal {
        RealSignal { samples, role, kappa, sigma_s }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn role(&self) -> SignalRole {
        self.role
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn sigma_s(&self) -> f64 {
        self.sigma_s
    }

    /// Same samples re-tagged; used by chain operators that change stage.
    pub(crate) fn retag(&self, role: SignalRole, kappa: f64) -> RealSignal {
        RealSignal { samples: self.samples.clone(), role, kappa, sigma_s: self.sigma_s }
    }

    pub(crate) fn with_samples(&self, samples: Vec<f64>, role: SignalRole) -> RealSignal {
        RealSignal { samples, role, kappa: self.kappa, sigma_s: self.sigma_s }
    }
}

/// A length-N symbol vector constrained to Hermitian symmetry, so that its
/// inverse DFT is real: entry 0 and N/2 are zero and entry N-k mirrors the
/// conjugate of entry k. The payload lives in slots 1..N/2.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmFrame {
    theta: Vec<Complex64>,
}

impl OfdmFrame {
    /// Builds a frame from its payload half; the mirror half is derived.
    pub fn assemble(payload: &[Complex64], n_fft: usize) -> Result<OfdmFrame> {
        check_fft_size(n_fft)?;
        let expected = n_fft / 2 - 1;
        if payload.len() != expected {
            return Err(Error::PayloadLength { expected, got: payload.len() });
        }
        let mut theta = vec![Complex64::new(0.0, 0.0); n_fft];
        for (k, &p) in payload.iter().enumerate() {
            theta[k + 1] = p;
            theta[n_fft - 1 - k] = p.conj();
        }
        Ok(OfdmFrame { theta })
    }

    /// Validates an explicit spectrum as a frame.
    pub fn from_spectrum(theta: Vec<Complex64>) -> Result<OfdmFrame> {
        check_fft_size(theta.len())?;
        let violation = hermitian_violation(&theta);
        if violation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { violation });
        }
        Ok(OfdmFrame { theta })
    }

    pub fn n_fft(&self) -> usize {
        self.theta.len()
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.theta
    }

    /// The independently-chosen symbols, slots 1..N/2.
    pub fn payload(&self) -> &[Complex64] {
        &self.theta[1..self.theta.len() / 2]
    }

    /// Elementwise product with a Hermitian-symmetric +/-1 phase vector.
    pub(crate) fn scaled_by_signs(&self, signs: &[i8]) -> OfdmFrame {
        debug_assert_eq!(signs.len(), self.theta.len());
        let theta = self
            .theta
            .iter()
            .zip(signs)
            .map(|(&t, &s)| t * f64::from(s))
            .collect();
        OfdmFrame { theta }
    }
}

/// Largest deviation from the Hermitian constraints of Eq. form
/// `theta_k = conj(theta_{N-k})`, `theta_0 = theta_{N/2} = 0`.
fn hermitian_violation(theta: &[Complex64]) -> f64 {
    let n = theta.len();
    let mut worst = theta[0].norm().max(theta[n / 2].norm());
    for k in 1..n / 2 {
        worst = worst.max((theta[k] - theta[n - k].conj()).norm());
    }
    worst
}

fn check_fft_size(n: usize) -> Result<()> {
    if n.is_power_of_two() && n >= 8 {
        Ok(())
    } else {
        Err(Error::InvalidFftSize(n))
    }
}

/// A demodulated spectrum. Unlike [`OfdmFrame`] it carries no symmetry
/// guarantee: distorted inputs produce arbitrary complex bins.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftFrame {
    bins: Vec<Complex64>,
}

impl SoftFrame {
    pub fn n_fft(&self) -> usize {
        self.bins.len()
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    /// Soft estimates on the payload subcarriers 1..N/2.
    pub fn payload(&self) -> &[Complex64] {
        &self.bins[1..self.bins.len() / 2]
    }
}

/// Transform engine for one FFT size. Holds the precomputed plan; all
/// operations are `&self` and allocate their outputs, so one engine can be
/// shared immutably while each worker keeps its own if contention matters.
#[derive(Debug, Clone)]
pub struct Ofdm {
    n: usize,
    plan: FftPlan,
    scale: f64,
}

impl Ofdm {
    pub fn new(n_fft: usize) -> Result<Ofdm> {
        check_fft_size(n_fft)?;
        Ok(Ofdm { n: n_fft, plan: FftPlan::new(n_fft), scale: 1.0 / (n_fft as f64).sqrt() })
    }

    pub fn n_fft(&self) -> usize {
        self.n
    }

    /// Unitary inverse DFT of the frame: s[n] = (1/sqrt(N)) sum theta_k e^{j2pikn/N}.
    /// The imaginary part is guaranteed negligible by the frame symmetry and
    /// discarded; the symmetry itself is re-checked to catch frames built by
    /// hand through `from_spectrum` on stale data.
    pub fn modulate(&self, frame: &OfdmFrame) -> Result<RealSignal> {
        if frame.n_fft() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: frame.n_fft() });
        }
        let violation = hermitian_violation(frame.spectrum());
        if violation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { violation });
        }
        let mut buf = frame.spectrum().to_vec();
        self.plan.process(&mut buf, Direction::Inverse);
        let samples: Vec<f64> = buf.iter().map(|c| c.re * self.scale).collect();
        debug_assert!({
            let max_re = samples.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            let max_im = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs())) * self.scale;
            max_im <= 1e-10 * max_re.max(1e-300)
        });
        Ok(RealSignal { samples, role: SignalRole::Raw, kappa: 0.0, sigma_s: 1.0 })
    }

    /// Unitary forward DFT. The input may be any stage of the chain; the
    /// output is a soft spectrum with no symmetry guarantee.
    pub fn demodulate(&self, signal: &RealSignal) -> SoftFrame {
        assert_eq!(signal.len(), self.n, "signal length must match the engine FFT size");
        self.demodulate_samples(signal.samples())
    }

    pub(crate) fn demodulate_samples(&self, samples: &[f64]) -> SoftFrame {
        assert_eq!(samples.len(), self.n);
        let mut buf: Vec<Complex64> =
            samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.plan.process(&mut buf, Direction::Forward);
        for c in &mut buf {
            *c *= self.scale;
        }
        SoftFrame { bins: buf }
    }

    pub(crate) fn plan(&self) -> &FftPlan {
        &self.plan
    }
}

/// Peak-to-average power ratio in dB: 10 log10(max s^2 / mean s^2).
pub fn papr_db(signal: &RealSignal) -> Result<f64> {
    let mut peak = 0.0f64;
    let mut sum = 0.0f64;
    for &x in signal.samples() {
        let p = x * x;
        peak = peak.max(p);
        sum += p;
    }
    if sum == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let mean = sum / signal.len() as f64;
    Ok(10.0 * (peak / mean).log10())
}
