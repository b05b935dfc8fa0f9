//! Monte-Carlo experiment harness for the `avofdm-core` signal chain:
//! configuration handling, the deterministic sweep drivers, and CSV
//! readers/writers for their record schemas.

pub mod config;
pub mod csv;
pub mod harness;

pub use config::{parse_detectors, parse_sweep, SimConfig};
pub use harness::{
    dump_constellation_scatter, frame_stream, run_av_noise, run_detect_one,
    run_dispersion_sweep, run_iteration_stats, run_lower_bound_comparison,
    run_noiseless_threshold, run_ser_vs_kappa, run_ser_vs_snr, run_sweep, AvNoiseRecord,
    FrameOutcome, LowerBoundComparison, ScatterRecord, SweepRecord, ThresholdRecord,
    ThresholdResult,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] avofdm_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV line {line}: {message}")]
    CsvParse { line: usize, message: String },
}
