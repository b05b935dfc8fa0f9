//! CSV emission and parsing for the experiment record schemas. Floats are
//! written with the shortest round-trippable representation, so equal
//! configurations produce byte-identical files.

use std::io::{BufRead, Write};

use avofdm_core::{ConstellationKind, DetectorKind};

use crate::harness::{AvNoiseRecord, ScatterRecord, SweepRecord, ThresholdRecord};
use crate::SimError;

pub const SWEEP_HEADER: &str = "detector,constellation,n_fft,kappa,beta_db,snr_db,dispersion,\
frames,symbols_total,symbol_errors,ser,iter_mean,iter_std,iter_max,converged_fraction";

pub const THRESHOLD_HEADER: &str = "kappa,beta_db,frames,symbols_total,ser0_errors,ser0,\
alg_errors,ser_alg,pa_analytic,pa_empirical,iter_mean,iter_std,iter_max,converged_fraction";

pub const AV_NOISE_HEADER: &str =
    "kappa,p_a_analytic,p_a_empirical,mean_analytic,mean_empirical,rms_analytic,rms_empirical";

pub const SCATTER_HEADER: &str = "detector,kappa,snr_db,frame,subcarrier,re,im";

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(mut w: W, records: &[SweepRecord]) -> Result<(), SimError> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.detector,
            r.constellation,
            r.n_fft,
            r.kappa,
            r.beta_db,
            r.snr_db,
            r.dispersion,
            r.frames,
            r.symbols_total,
            r.symbol_errors,
            r.ser,
            opt(r.iter_mean),
            opt(r.iter_std),
            opt(r.iter_max),
            opt(r.converged_fraction),
        )?;
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(
    field: &str,
    name: &str,
    line: usize,
) -> Result<T, SimError> {
    field.parse().map_err(|_| SimError::CsvParse {
        line,
        message: format!("cannot parse {name} from {field:?}"),
    })
}

fn parse_opt<T: std::str::FromStr>(
    field: &str,
    name: &str,
    line: usize,
) -> Result<Option<T>, SimError> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_field(field, name, line).map(Some)
    }
}

/// Reads back a sweep CSV produced by [`write_sweep_csv`].
pub fn read_sweep_csv<R: BufRead>(r: R) -> Result<Vec<SweepRecord>, SimError> {
    let mut lines = r.lines().enumerate();
    match lines.next() {
        Some((_, Ok(header))) if header == SWEEP_HEADER => {}
        Some((_, Ok(header))) => {
            return Err(SimError::CsvParse {
                line: 1,
                message: format!("unexpected header {header:?}"),
            })
        }
        Some((_, Err(e))) => return Err(e.into()),
        None => return Err(SimError::CsvParse { line: 1, message: "empty file".into() }),
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let n = i + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 15 {
            return Err(SimError::CsvParse {
                line: n,
                message: format!("expected 15 fields, found {}", f.len()),
            });
        }
        let detector: DetectorKind = f[0].parse().map_err(|e: &str| SimError::CsvParse {
            line: n,
            message: e.to_string(),
        })?;
        let constellation: ConstellationKind =
            f[1].parse().map_err(|e: &str| SimError::CsvParse {
                line: n,
                message: e.to_string(),
            })?;
        records.push(SweepRecord {
            detector,
            constellation,
            n_fft: parse_field(f[2], "n_fft", n)?,
            kappa: parse_field(f[3], "kappa", n)?,
            beta_db: parse_field(f[4], "beta_db", n)?,
            snr_db: parse_field(f[5], "snr_db", n)?,
            dispersion: parse_field(f[6], "dispersion", n)?,
            frames: parse_field(f[7], "frames", n)?,
            symbols_total: parse_field(f[8], "symbols_total", n)?,
            symbol_errors: parse_field(f[9], "symbol_errors", n)?,
            ser: parse_field(f[10], "ser", n)?,
            iter_mean: parse_opt(f[11], "iter_mean", n)?,
            iter_std: parse_opt(f[12], "iter_std", n)?,
            iter_max: parse_opt(f[13], "iter_max", n)?,
            converged_fraction: parse_opt(f[14], "converged_fraction", n)?,
        });
    }
    Ok(records)
}

pub fn write_threshold_csv<W: Write>(
    mut w: W,
    records: &[ThresholdRecord],
) -> Result<(), SimError> {
    writeln!(w, "{THRESHOLD_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.kappa,
            r.beta_db,
            r.frames,
            r.symbols_total,
            r.ser0_errors,
            r.ser0,
            r.alg_errors,
            r.ser_alg,
            r.pa_analytic,
            r.pa_empirical,
            r.iter_mean,
            r.iter_std,
            r.iter_max,
            r.converged_fraction,
        )?;
    }
    Ok(())
}

pub fn write_av_noise_csv<W: Write>(mut w: W, records: &[AvNoiseRecord]) -> Result<(), SimError> {
    writeln!(w, "{AV_NOISE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.kappa,
            r.pa_analytic,
            r.pa_empirical,
            r.mean_analytic,
            r.mean_empirical,
            r.rms_analytic,
            r.rms_empirical,
        )?;
    }
    Ok(())
}

pub fn write_scatter_csv<W: Write>(mut w: W, records: &[ScatterRecord]) -> Result<(), SimError> {
    writeln!(w, "{SCATTER_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.detector, r.kappa, r.snr_db, r.frame, r.subcarrier, r.re, r.im,
        )?;
    }
    Ok(())
}
