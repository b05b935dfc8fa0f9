//! Simulation primitives for DC-biased optical OFDM with an absolute-value
//! front-end and iterative sign estimation.
//!
//! The crate is `no_std` (with `alloc`) so the signal chain can run on hosts
//! without an OS; all IO, parallelism and experiment drivers live in the
//! companion `avofdm-sim` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod analytics;
pub mod channel;
pub mod constellation;
pub mod detectors;
pub mod frontend;
pub mod ofdm;

mod fft;

pub use analytics::AvNoiseStats;
pub use channel::ChannelSpec;
pub use constellation::{build_constellation, ConstellationKind, ConstellationSpec};
pub use detectors::{DetectionResult, DetectorKind, SlmSideInfo};
pub use frontend::{BiasSpec, SignVector};
pub use num_complex::Complex64;
pub use ofdm::{Ofdm, OfdmFrame, RealSignal, SignalRole, SoftFrame};

use core::fmt;

/// Errors from signal-chain operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// FFT size is not a power of two of at least 8.
    InvalidFftSize(usize),
    /// Payload does not have exactly `n_fft / 2 - 1` entries.
    PayloadLength { expected: usize, got: usize },
    /// Frame violates Hermitian symmetry beyond tolerance.
    NotHermitian { violation: f64 },
    /// Operation applied to a signal with the wrong role tag.
    RoleMismatch { expected: SignalRole, got: SignalRole },
    /// Vector lengths disagree.
    LengthMismatch { expected: usize, got: usize },
    /// Bias and signal carry inconsistent `sigma_s` design values.
    SigmaMismatch { signal: f64, bias: f64 },
    /// PAPR of an all-zero signal is undefined.
    ZeroSignal,
    /// The ISEA stopping rule needs at least two iterations.
    MaxIterTooSmall(u32),
    /// SLM needs at least one candidate sequence.
    NoSlmCandidates,
    /// Negative noise standard deviation.
    NegativeSigma(f64),
    /// Negative normalized dispersion.
    NegativeDispersion(f64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidFftSize(n) => {
                write!(f, "FFT size {n} is not a power of two >= 8")
            }
            Error::PayloadLength { expected, got } => {
                write!(f, "payload length {got}, expected {expected}")
            }
            Error::NotHermitian { violation } => {
                write!(f, "frame violates Hermitian symmetry by {violation:e}")
            }
            Error::RoleMismatch { expected, got } => {
                write!(f, "signal role {got:?}, expected {expected:?}")
            }
            Error::LengthMismatch { expected, got } => {
                write!(f, "signal length {got}, expected {expected}")
            }
            Error::SigmaMismatch { signal, bias } => {
                write!(f, "signal sigma_s {signal} inconsistent with bias sigma_s {bias}")
            }
            Error::ZeroSignal => write!(f, "operation undefined for an all-zero signal"),
            Error::MaxIterTooSmall(m) => write!(f, "max_iter {m} < 2"),
            Error::NoSlmCandidates => write!(f, "SLM candidate count must be >= 1"),
            Error::NegativeSigma(s) => write!(f, "negative noise sigma {s}"),
            Error::NegativeDispersion(d) => write!(f, "negative normalized dispersion {d}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
