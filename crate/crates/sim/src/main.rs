//! `avofdm` — Monte-Carlo experiments for DC-biased optical OFDM with an
//! absolute-value front-end and iterative sign estimation.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use clap::{Args, Parser, Subcommand};

use avofdm_core::{ConstellationKind, DetectorKind};
use avofdm_sim::{config, csv, harness, SimConfig};

#[derive(Parser)]
#[command(name = "avofdm", version, about = "DCO-OFDM symbol-recovery experiments", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic vs empirical AV-noise statistics over a kappa grid
    AvNoise(RunArgs),
    /// Noiseless SER scan over kappa; reports the zero-error threshold and p_th
    Threshold(RunArgs),
    /// ISEA iteration statistics over a kappa grid (noiseless)
    Iterations(RunArgs),
    /// SER vs SNR for the selected detectors at fixed bias
    SerVsSnr(RunArgs),
    /// SER vs kappa for the selected detectors at fixed SNR
    SerVsKappa(RunArgs),
    /// SER vs normalized dispersion at fixed bias and SNR
    Dispersion(RunArgs),
    /// Soft symbol estimates before the slicer
    Scatter(RunArgs),
    /// One frame end to end; prints errors, iterations, and convergence
    DetectOne(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags override its values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when omitted. A resolved-config sidecar
    /// `<out>.config.toml` is written next to the file.
    #[arg(long, short, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Master seed; the full record set is a pure function of the config
    #[arg(long)]
    seed: Option<u64>,
    /// Worker-thread cap (0 = default pool); never changes results
    #[arg(long)]
    threads: Option<usize>,
    /// qpsk | 8psk | 16psk | 16qam
    #[arg(long)]
    constellation: Option<ConstellationKind>,
    /// FFT size (power of two >= 8)
    #[arg(long = "n-fft")]
    n_fft: Option<usize>,
    /// Bias kappa grid: value, comma list, or start:step:stop
    #[arg(long)]
    kappa: Option<String>,
    /// SNR grid in dB: value, list, or start:step:stop; inf/noiseless allowed
    #[arg(long, visible_alias = "snr-db")]
    snr: Option<String>,
    /// Normalized dispersion grid
    #[arg(long)]
    dispersion: Option<String>,
    /// OFDM frames per sweep point
    #[arg(long)]
    frames: Option<u64>,
    /// Comma list from: isea, clipping, slm, lower-bound
    #[arg(long)]
    detectors: Option<String>,
    /// ISEA iteration cap (>= 2)
    #[arg(long = "max-iter")]
    max_iter: Option<u32>,
    /// SLM candidate sequences per frame
    #[arg(long = "slm-candidates")]
    slm_candidates: Option<u32>,
}

impl RunArgs {
    /// defaults <- config file <- flags.
    fn resolve(&self, base: SimConfig) -> anyhow::Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                SimConfig::from_toml(&text)?
            }
            None => base,
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(threads) = self.threads {
            cfg.threads = threads;
        }
        if let Some(kind) = self.constellation {
            cfg.constellation = kind;
        }
        if let Some(n) = self.n_fft {
            cfg.n_fft = n;
        }
        if let Some(text) = &self.kappa {
            cfg.kappas = config::parse_sweep(text)?;
        }
        if let Some(text) = &self.snr {
            cfg.snrs_db = config::parse_sweep(text)?;
        }
        if let Some(text) = &self.dispersion {
            cfg.dispersions = config::parse_sweep(text)?;
        }
        if let Some(frames) = self.frames {
            cfg.frames = frames;
        }
        if let Some(text) = &self.detectors {
            cfg.detectors = config::parse_detectors(text)?;
        }
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        if let Some(c) = self.slm_candidates {
            cfg.slm_candidates = c;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Per-subcommand seed configs: the figure-specific grids and frame counts
/// used when neither the config file nor the flags say otherwise.
fn base_config(cmd: &Command) -> SimConfig {
    let mut cfg = SimConfig::default();
    match cmd {
        Command::AvNoise(_) => {
            cfg.kappas = config::parse_sweep("0:0.25:3").unwrap();
        }
        Command::Threshold(_) | Command::Iterations(_) => {
            cfg.kappas = config::parse_sweep("0.9:0.05:1.7").unwrap();
            cfg.frames = 4000;
        }
        Command::SerVsSnr(_) => {
            cfg.snrs_db = config::parse_sweep("0:2:20").unwrap();
        }
        Command::SerVsKappa(_) => {
            cfg.kappas = config::parse_sweep("0.5:0.1:2").unwrap();
            cfg.snrs_db = vec![12.0];
        }
        Command::Dispersion(_) => {
            cfg.constellation = ConstellationKind::Psk8;
            cfg.kappas = vec![1.6];
            cfg.snrs_db = vec![20.0];
            cfg.dispersions = config::parse_sweep("0:0.01:0.1").unwrap();
            cfg.detectors =
                vec![DetectorKind::Isea, DetectorKind::Clipping, DetectorKind::Slm];
        }
        Command::Scatter(_) => {
            cfg.frames = 10;
            cfg.kappas = vec![1.0];
        }
        Command::DetectOne(_) => {
            cfg.frames = 1;
            cfg.detectors = vec![DetectorKind::Isea];
        }
    }
    cfg
}

/// Writes the CSV plus the resolved-config sidecar, or CSV to stdout with
/// the resolved config logged to stderr.
fn emit(
    out: &Option<PathBuf>,
    cfg: &SimConfig,
    subcommand: &str,
    write_csv: impl Fn(&mut dyn Write) -> Result<(), avofdm_sim::SimError>,
) -> anyhow::Result<()> {
    let sidecar_text = format!(
        "# reproduce with: avofdm {subcommand} --config <this file>\n{}",
        cfg.to_toml()
    );
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)
                    .with_context(|| format!("creating {}", dir.display()))?;
            }
            let mut file = fs::File::create(path)
                .with_context(|| format!("writing {}", path.display()))?;
            write_csv(&mut file)?;
            let sidecar = sidecar_path(path);
            fs::write(&sidecar, sidecar_text)
                .with_context(|| format!("writing {}", sidecar.display()))?;
        }
        None => {
            eprintln!("# resolved config\n{sidecar_text}");
            let stdout = io::stdout();
            write_csv(&mut stdout.lock())?;
        }
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.toml");
    PathBuf::from(s)
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let cfg = match &cli.command {
        Command::AvNoise(a)
        | Command::Threshold(a)
        | Command::Iterations(a)
        | Command::SerVsSnr(a)
        | Command::SerVsKappa(a)
        | Command::Dispersion(a)
        | Command::Scatter(a)
        | Command::DetectOne(a) => a.resolve(base_config(&cli.command))?,
    };

    match &cli.command {
        Command::AvNoise(a) => {
            let records = harness::run_av_noise(&cfg)?;
            emit(&a.out, &cfg, "av-noise", |w| csv::write_av_noise_csv(w, &records))?;
        }
        Command::Threshold(a) => {
            let result = harness::run_noiseless_threshold(&cfg)?;
            emit(&a.out, &cfg, "threshold", |w| csv::write_threshold_csv(w, &result.records))?;
            match (result.kappa_threshold, result.p_th) {
                (Some(k), Some(p)) => println!("kappa_threshold={k} p_th={p}"),
                _ => println!("kappa_threshold=none (no zero-error grid point)"),
            }
        }
        Command::Iterations(a) => {
            let records = harness::run_iteration_stats(&cfg)?;
            emit(&a.out, &cfg, "iterations", |w| csv::write_sweep_csv(w, &records))?;
        }
        Command::SerVsSnr(a) => {
            let records = harness::run_ser_vs_snr(&cfg)?;
            emit(&a.out, &cfg, "ser-vs-snr", |w| csv::write_sweep_csv(w, &records))?;
        }
        Command::SerVsKappa(a) => {
            let records = harness::run_ser_vs_kappa(&cfg)?;
            emit(&a.out, &cfg, "ser-vs-kappa", |w| csv::write_sweep_csv(w, &records))?;
        }
        Command::Dispersion(a) => {
            let records = harness::run_dispersion_sweep(&cfg)?;
            emit(&a.out, &cfg, "dispersion", |w| csv::write_sweep_csv(w, &records))?;
        }
        Command::Scatter(a) => {
            let records = harness::dump_constellation_scatter(&cfg)?;
            emit(&a.out, &cfg, "scatter", |w| csv::write_scatter_csv(w, &records))?;
        }
        Command::DetectOne(a) => {
            let records = harness::run_detect_one(&cfg)?;
            if records.is_empty() {
                bail!("detect-one produced no record");
            }
            for r in &records {
                let iters = r.iter_max.map(|m| m.to_string()).unwrap_or_else(|| "1".into());
                let converged = r.converged_fraction.map(|c| c == 1.0).unwrap_or(true);
                println!(
                    "detector={} errors={} iterations={} converged={}",
                    r.detector, r.symbol_errors, iters, converged
                );
            }
            if a.out.is_some() {
                emit(&a.out, &cfg, "detect-one", |w| csv::write_sweep_csv(w, &records))?;
            }
        }
    }
    Ok(())
}
