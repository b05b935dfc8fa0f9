//! Deterministic Monte-Carlo experiment drivers: SER sweeps over SNR, bias,
//! and dispersion; the noiseless threshold scan; iteration statistics;
//! AV-noise moment estimation; and constellation-scatter dumps.
//!
//! Reproducibility contract: every frame draws from its own ChaCha stream,
//! derived from the master seed and the (sweep-point, frame) pair, so the
//! record set depends only on the configuration and never on thread count
//! or scheduling.

use avofdm_core::{
    analytics, build_constellation, channel, detectors, frontend, BiasSpec, Complex64,
    ConstellationKind, ConstellationSpec, DetectorKind, Ofdm, OfdmFrame, RealSignal,
    SignalRole,
};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rayon::prelude::*;

use crate::config::SimConfig;
use crate::SimError;

/// One Monte-Carlo measurement point in the generic sweep schema.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub detector: DetectorKind,
    pub constellation: ConstellationKind,
    pub n_fft: usize,
    pub kappa: f64,
    pub beta_db: f64,
    pub snr_db: f64,
    pub dispersion: f64,
    pub frames: u64,
    pub symbols_total: u64,
    pub symbol_errors: u64,
    pub ser: f64,
    pub iter_mean: Option<f64>,
    pub iter_std: Option<f64>,
    pub iter_max: Option<u32>,
    pub converged_fraction: Option<f64>,
}

/// One bias point of the noiseless threshold scan: first-pass SER, final
/// ISEA SER, folding probabilities, and iteration statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRecord {
    pub kappa: f64,
    pub beta_db: f64,
    pub frames: u64,
    pub symbols_total: u64,
    pub ser0_errors: u64,
    pub ser0: f64,
    pub alg_errors: u64,
    pub ser_alg: f64,
    pub pa_analytic: f64,
    pub pa_empirical: f64,
    pub iter_mean: f64,
    pub iter_std: f64,
    pub iter_max: u32,
    pub converged_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub records: Vec<ThresholdRecord>,
    /// Smallest grid kappa with zero ISEA errors across all frames.
    pub kappa_threshold: Option<f64>,
    /// Folding probability Q(kappa_threshold).
    pub p_th: Option<f64>,
}

/// One bias point of the AV-noise experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct AvNoiseRecord {
    pub kappa: f64,
    pub pa_analytic: f64,
    pub pa_empirical: f64,
    pub mean_analytic: f64,
    pub mean_empirical: f64,
    pub rms_analytic: f64,
    pub rms_empirical: f64,
}

/// One soft symbol estimate before the slicer.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRecord {
    pub detector: DetectorKind,
    pub kappa: f64,
    pub snr_db: f64,
    pub frame: u64,
    pub subcarrier: usize,
    pub re: f64,
    pub im: f64,
}

/// Outcome of one simulated frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameOutcome {
    pub symbol_errors: u64,
    pub iterations: u32,
    pub converged: bool,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stable stream id for a frame: splitmix64(splitmix64(point) + frame).
/// The point index covers the (snr, dispersion) grid only. Bias and
/// detector are deliberately excluded so that sweeps over kappa reuse the
/// same frame and noise realizations (common random numbers), which in
/// particular makes the lower-bound detector exactly bias-invariant.
pub fn frame_stream(point_index: u64, frame_index: u64) -> u64 {
    splitmix64(splitmix64(point_index).wrapping_add(frame_index))
}

fn frame_rng(seed: u64, point_index: u64, frame_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame_stream(point_index, frame_index));
    rng
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(f)
    }
}

struct Context {
    ofdm: Ofdm,
    spec: ConstellationSpec,
}

impl Context {
    fn new(cfg: &SimConfig) -> Result<Context, SimError> {
        Ok(Context {
            ofdm: Ofdm::new(cfg.n_fft)?,
            spec: build_constellation(cfg.constellation, cfg.n_fft)?,
        })
    }

    fn payload_len(&self) -> usize {
        self.ofdm.n_fft() / 2 - 1
    }
}

/// Runs one frame end to end for one detector. Infallible by construction
/// once the configuration is validated, hence the expects.
fn run_frame(
    ctx: &Context,
    detector: DetectorKind,
    bias: &BiasSpec,
    sigma_v: f64,
    dispersion: f64,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> FrameOutcome {
    let payload = ctx.spec.draw_symbols(ctx.payload_len(), rng);
    let frame = OfdmFrame::assemble(&payload, ctx.ofdm.n_fft()).expect("validated payload");

    let disperse = |tx: RealSignal| -> RealSignal {
        if dispersion > 0.0 {
            channel::apply_dispersion(&ctx.ofdm, &tx, dispersion).expect("validated dispersion")
        } else {
            tx
        }
    };

    let result = match detector {
        DetectorKind::LowerBound => {
            let s = disperse(ctx.ofdm.modulate(&frame).expect("valid frame"));
            detectors::lower_bound_detect(&ctx.ofdm, &s, sigma_v, &ctx.spec, rng)
                .expect("lower-bound detect")
        }
        DetectorKind::Isea => {
            let s = ctx.ofdm.modulate(&frame).expect("valid frame");
            let sb = frontend::add_bias(&s, bias).expect("raw signal");
            let tx = disperse(frontend::absval(&sb).expect("biased signal"));
            let y = channel::awgn(&tx, sigma_v, rng).expect("valid sigma");
            detectors::isea_detect(&ctx.ofdm, &y, bias, &ctx.spec, cfg.max_iter)
                .expect("isea detect")
        }
        DetectorKind::Clipping => {
            let s = ctx.ofdm.modulate(&frame).expect("valid frame");
            let sb = frontend::add_bias(&s, bias).expect("raw signal");
            let tx = disperse(frontend::clip(&sb).expect("biased signal"));
            let y = channel::awgn(&tx, sigma_v, rng).expect("valid sigma");
            detectors::clipping_detect(&ctx.ofdm, &y, bias, &ctx.spec).expect("clipping detect")
        }
        DetectorKind::Slm => {
            let (chosen, side) =
                detectors::slm_select(&ctx.ofdm, &frame, cfg.slm_candidates, rng)
                    .expect("slm select");
            let s = ctx.ofdm.modulate(&chosen).expect("valid frame");
            let sb = frontend::add_bias(&s, bias).expect("raw signal");
            let tx = disperse(frontend::clip(&sb).expect("biased signal"));
            let y = channel::awgn(&tx, sigma_v, rng).expect("valid sigma");
            detectors::slm_detect(&ctx.ofdm, &y, &side, bias, &ctx.spec).expect("slm detect")
        }
    };

    FrameOutcome {
        symbol_errors: result.count_payload_errors(&payload),
        iterations: result.iterations,
        converged: result.converged,
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct PointAgg {
    errors: u64,
    iter_sum: u64,
    iter_sq_sum: u64,
    iter_max: u32,
    converged: u64,
}

impl PointAgg {
    fn absorb(mut self, o: FrameOutcome) -> PointAgg {
        self.errors += o.symbol_errors;
        self.iter_sum += u64::from(o.iterations);
        self.iter_sq_sum += u64::from(o.iterations) * u64::from(o.iterations);
        self.iter_max = self.iter_max.max(o.iterations);
        self.converged += u64::from(o.converged);
        self
    }

    fn merge(self, o: PointAgg) -> PointAgg {
        PointAgg {
            errors: self.errors + o.errors,
            iter_sum: self.iter_sum + o.iter_sum,
            iter_sq_sum: self.iter_sq_sum + o.iter_sq_sum,
            iter_max: self.iter_max.max(o.iter_max),
            converged: self.converged + o.converged,
        }
    }

    fn iter_mean(&self, frames: u64) -> f64 {
        self.iter_sum as f64 / frames as f64
    }

    fn iter_std(&self, frames: u64) -> f64 {
        let mean = self.iter_mean(frames);
        (self.iter_sq_sum as f64 / frames as f64 - mean * mean).max(0.0).sqrt()
    }
}

fn run_point(
    ctx: &Context,
    detector: DetectorKind,
    bias: &BiasSpec,
    snr_db: f64,
    dispersion: f64,
    point_index: u64,
    cfg: &SimConfig,
) -> PointAgg {
    let sigma_v = channel::snr_to_sigma_v(snr_db, bias.sigma_s());
    (0..cfg.frames)
        .into_par_iter()
        .map(|f| {
            let mut rng = frame_rng(cfg.seed, point_index, f);
            run_frame(ctx, detector, bias, sigma_v, dispersion, cfg, &mut rng)
        })
        .fold(PointAgg::default, PointAgg::absorb)
        .reduce(PointAgg::default, PointAgg::merge)
}

/// The generic sweep engine over kappa x snr x dispersion x detector.
/// Record order is deterministic: kappa outermost, then snr, dispersion,
/// detector in the configured order.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<SweepRecord>, SimError> {
    cfg.validate()?;
    let ctx = Context::new(cfg)?;
    let symbols_total = cfg.frames * ctx.payload_len() as u64;
    with_pool(cfg.threads, || {
        let mut records = Vec::new();
        for &kappa in &cfg.kappas {
            let bias = BiasSpec::new(kappa, 1.0);
            for (si, &snr_db) in cfg.snrs_db.iter().enumerate() {
                for (di, &dispersion) in cfg.dispersions.iter().enumerate() {
                    let point_index = (si * cfg.dispersions.len() + di) as u64;
                    for &detector in &cfg.detectors {
                        let agg =
                            run_point(&ctx, detector, &bias, snr_db, dispersion, point_index, cfg);
                        let is_isea = detector == DetectorKind::Isea;
                        records.push(SweepRecord {
                            detector,
                            constellation: cfg.constellation,
                            n_fft: cfg.n_fft,
                            kappa,
                            beta_db: bias.beta_db(),
                            snr_db,
                            dispersion,
                            frames: cfg.frames,
                            symbols_total,
                            symbol_errors: agg.errors,
                            ser: agg.errors as f64 / symbols_total as f64,
                            iter_mean: is_isea.then(|| agg.iter_mean(cfg.frames)),
                            iter_std: is_isea.then(|| agg.iter_std(cfg.frames)),
                            iter_max: is_isea.then_some(agg.iter_max),
                            converged_fraction: is_isea
                                .then(|| agg.converged as f64 / cfg.frames as f64),
                        });
                    }
                }
            }
        }
        Ok(records)
    })
}

/// SER vs SNR at fixed bias (one or more kappa values).
pub fn run_ser_vs_snr(cfg: &SimConfig) -> Result<Vec<SweepRecord>, SimError> {
    if cfg.snrs_db.len() < 2 {
        return Err(SimError::Config("ser-vs-snr expects an SNR grid of at least 2 points".into()));
    }
    run_sweep(cfg)
}

/// SER vs kappa at fixed SNR.
pub fn run_ser_vs_kappa(cfg: &SimConfig) -> Result<Vec<SweepRecord>, SimError> {
    if cfg.kappas.len() < 2 {
        return Err(SimError::Config("ser-vs-kappa expects a kappa grid of at least 2 points".into()));
    }
    run_sweep(cfg)
}

/// SER vs normalized dispersion at fixed bias and SNR.
pub fn run_dispersion_sweep(cfg: &SimConfig) -> Result<Vec<SweepRecord>, SimError> {
    if cfg.dispersions.len() < 2 {
        return Err(SimError::Config(
            "dispersion sweep expects a dispersion grid of at least 2 points".into(),
        ));
    }
    run_sweep(cfg)
}

/// ISEA iteration statistics over the kappa grid in a noiseless channel.
pub fn run_iteration_stats(cfg: &SimConfig) -> Result<Vec<SweepRecord>, SimError> {
    let mut cfg = cfg.clone();
    cfg.snrs_db = vec![f64::INFINITY];
    cfg.detectors = vec![DetectorKind::Isea];
    run_sweep(&cfg)
}

/// ISEA vs unconstrained-AWGN comparison at one SNR point, measured on
/// shared channel realizations frame by frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundComparison {
    pub kappa: f64,
    pub snr_db: f64,
    pub frames: u64,
    pub symbols_total: u64,
    pub isea_errors: u64,
    pub lb_errors: u64,
    pub isea_ser: f64,
    pub lb_ser: f64,
    /// Standard error of the paired SER difference, from the per-frame
    /// error-count differences (symbol errors cluster within frames, so the
    /// frame is the independent sampling unit).
    pub diff_se: f64,
}

/// Runs ISEA and the unconstrained lower bound on identical frames and
/// noise realizations (both detectors re-derive the same per-frame stream
/// and consume it identically), and reports the paired difference per SNR
/// point of the grid.
pub fn run_lower_bound_comparison(cfg: &SimConfig) -> Result<Vec<LowerBoundComparison>, SimError> {
    cfg.validate()?;
    let ctx = Context::new(cfg)?;
    let payload_symbols = ctx.payload_len() as u64;
    let symbols_total = cfg.frames * payload_symbols;
    let kappa = cfg.kappas[0];
    let bias = BiasSpec::new(kappa, 1.0);
    with_pool(cfg.threads, || {
        Ok(cfg
            .snrs_db
            .iter()
            .enumerate()
            .map(|(si, &snr_db)| {
                let sigma_v = channel::snr_to_sigma_v(snr_db, bias.sigma_s());
                let point = (si * cfg.dispersions.len()) as u64;
                let (isea_errors, lb_errors, diff_sum, diff_sq_sum) = (0..cfg.frames)
                    .into_par_iter()
                    .map(|f| {
                        let isea = {
                            let mut rng = frame_rng(cfg.seed, point, f);
                            run_frame(&ctx, DetectorKind::Isea, &bias, sigma_v, 0.0, cfg, &mut rng)
                        };
                        let lb = {
                            let mut rng = frame_rng(cfg.seed, point, f);
                            run_frame(
                                &ctx,
                                DetectorKind::LowerBound,
                                &bias,
                                sigma_v,
                                0.0,
                                cfg,
                                &mut rng,
                            )
                        };
                        let d = isea.symbol_errors as i64 - lb.symbol_errors as i64;
                        (isea.symbol_errors, lb.symbol_errors, d, d * d)
                    })
                    .reduce(
                        || (0u64, 0u64, 0i64, 0i64),
                        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3),
                    );
                let m = cfg.frames as f64;
                let mean_d = diff_sum as f64 / m;
                let var_d = (diff_sq_sum as f64 / m - mean_d * mean_d).max(0.0);
                LowerBoundComparison {
                    kappa,
                    snr_db,
                    frames: cfg.frames,
                    symbols_total,
                    isea_errors,
                    lb_errors,
                    isea_ser: isea_errors as f64 / symbols_total as f64,
                    lb_ser: lb_errors as f64 / symbols_total as f64,
                    diff_se: (var_d / m).sqrt() / payload_symbols as f64,
                }
            })
            .collect())
    })
}

struct ThresholdFrame {
    ser0_errors: u64,
    alg_errors: u64,
    negative_samples: u64,
    iterations: u32,
    converged: bool,
}

/// Noiseless threshold scan (sigma_v forced to zero): per kappa, the
/// first-pass SER (decisions from the all-ones sign guess, which coincide
/// with the clipping receiver applied to the folded signal), the final ISEA
/// SER, and analytic vs empirical folding probabilities. The threshold is
/// the smallest grid kappa with zero ISEA errors, and p_th = Q(threshold).
pub fn run_noiseless_threshold(cfg: &SimConfig) -> Result<ThresholdResult, SimError> {
    let mut cfg = cfg.clone();
    cfg.snrs_db = vec![f64::INFINITY];
    cfg.validate()?;
    let mut kappas = cfg.kappas.clone();
    kappas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ctx = Context::new(&cfg)?;
    let n = ctx.ofdm.n_fft();
    let symbols_total = cfg.frames * ctx.payload_len() as u64;

    let records: Vec<ThresholdRecord> = with_pool(cfg.threads, || {
        kappas
            .iter()
            .map(|&kappa| {
                let bias = BiasSpec::new(kappa, 1.0);
                let agg = (0..cfg.frames)
                    .into_par_iter()
                    .map(|f| {
                        let mut rng = frame_rng(cfg.seed, 0, f);
                        let payload = ctx.spec.draw_symbols(ctx.payload_len(), &mut rng);
                        let frame = OfdmFrame::assemble(&payload, n).expect("validated payload");
                        let s = ctx.ofdm.modulate(&frame).expect("valid frame");
                        let sb = frontend::add_bias(&s, &bias).expect("raw signal");
                        let negative_samples =
                            sb.samples().iter().filter(|&&x| x < 0.0).count() as u64;
                        let y = frontend::absval(&sb).expect("biased signal");
                        let first =
                            detectors::clipping_detect(&ctx.ofdm, &y, &bias, &ctx.spec)
                                .expect("first pass");
                        let alg =
                            detectors::isea_detect(&ctx.ofdm, &y, &bias, &ctx.spec, cfg.max_iter)
                                .expect("isea detect");
                        ThresholdFrame {
                            ser0_errors: first.count_payload_errors(&payload),
                            alg_errors: alg.count_payload_errors(&payload),
                            negative_samples,
                            iterations: alg.iterations,
                            converged: alg.converged,
                        }
                    })
                    .fold(
                        || (0u64, 0u64, 0u64, PointAgg::default()),
                        |(s0, neg, samples, agg), fr| {
                            (
                                s0 + fr.ser0_errors,
                                neg + fr.negative_samples,
                                samples + n as u64,
                                agg.absorb(FrameOutcome {
                                    symbol_errors: fr.alg_errors,
                                    iterations: fr.iterations,
                                    converged: fr.converged,
                                }),
                            )
                        },
                    )
                    .reduce(
                        || (0u64, 0u64, 0u64, PointAgg::default()),
                        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3.merge(b.3)),
                    );
                let (ser0_errors, negatives, samples, alg) = agg;
                ThresholdRecord {
                    kappa,
                    beta_db: bias.beta_db(),
                    frames: cfg.frames,
                    symbols_total,
                    ser0_errors,
                    ser0: ser0_errors as f64 / symbols_total as f64,
                    alg_errors: alg.errors,
                    ser_alg: alg.errors as f64 / symbols_total as f64,
                    pa_analytic: analytics::folding_probability(kappa),
                    pa_empirical: negatives as f64 / samples as f64,
                    iter_mean: alg.iter_mean(cfg.frames),
                    iter_std: alg.iter_std(cfg.frames),
                    iter_max: alg.iter_max,
                    converged_fraction: alg.converged as f64 / cfg.frames as f64,
                }
            })
            .collect()
    });

    let kappa_threshold = records.iter().find(|r| r.alg_errors == 0).map(|r| r.kappa);
    let p_th = kappa_threshold.map(analytics::folding_probability);
    Ok(ThresholdResult { records, kappa_threshold, p_th })
}

/// Empirical AV-noise moments against the closed forms, per kappa.
/// Per-frame partial sums are reduced in frame order so the floating-point
/// totals do not depend on the thread count.
pub fn run_av_noise(cfg: &SimConfig) -> Result<Vec<AvNoiseRecord>, SimError> {
    cfg.validate()?;
    let ctx = Context::new(cfg)?;
    let n = ctx.ofdm.n_fft();
    with_pool(cfg.threads, || {
        Ok(cfg
            .kappas
            .iter()
            .map(|&kappa| {
                let bias = BiasSpec::new(kappa, 1.0);
                let partials: Vec<(f64, f64, u64)> = (0..cfg.frames)
                    .into_par_iter()
                    .map(|f| {
                        let mut rng = frame_rng(cfg.seed, 0, f);
                        let payload = ctx.spec.draw_symbols(ctx.payload_len(), &mut rng);
                        let frame = OfdmFrame::assemble(&payload, n).expect("validated payload");
                        let s = ctx.ofdm.modulate(&frame).expect("valid frame");
                        let sb = frontend::add_bias(&s, &bias).expect("raw signal");
                        let na = frontend::av_noise(&sb).expect("biased signal");
                        let sum: f64 = na.iter().sum();
                        let sum_sq: f64 = na.iter().map(|x| x * x).sum();
                        let neg = na.iter().filter(|&&x| x > 0.0).count() as u64;
                        (sum, sum_sq, neg)
                    })
                    .collect();
                let mut sum = 0.0;
                let mut sum_sq = 0.0;
                let mut negatives = 0u64;
                for (a, b, c) in partials {
                    sum += a;
                    sum_sq += b;
                    negatives += c;
                }
                let count = (cfg.frames * n as u64) as f64;
                AvNoiseRecord {
                    kappa,
                    pa_analytic: analytics::folding_probability(kappa),
                    pa_empirical: negatives as f64 / count,
                    mean_analytic: analytics::av_mean(kappa, 1.0),
                    mean_empirical: sum / count,
                    rms_analytic: analytics::av_power(kappa, 1.0).sqrt(),
                    rms_empirical: (sum_sq / count).sqrt(),
                }
            })
            .collect())
    })
}

/// Soft symbol estimates right before the slicer, for constellation plots.
/// Uses the first grid value of each sweep list.
pub fn dump_constellation_scatter(cfg: &SimConfig) -> Result<Vec<ScatterRecord>, SimError> {
    cfg.validate()?;
    let ctx = Context::new(cfg)?;
    let n = ctx.ofdm.n_fft();
    let kappa = cfg.kappas[0];
    let snr_db = cfg.snrs_db[0];
    let dispersion = cfg.dispersions[0];
    let bias = BiasSpec::new(kappa, 1.0);
    let sigma_v = channel::snr_to_sigma_v(snr_db, bias.sigma_s());
    let b_dc = bias.b_dc();

    let mut records = Vec::new();
    for &detector in &cfg.detectors {
        for f in 0..cfg.frames {
            let mut rng = frame_rng(cfg.seed, 0, f);
            let payload = ctx.spec.draw_symbols(ctx.payload_len(), &mut rng);
            let frame = OfdmFrame::assemble(&payload, n).expect("validated payload");
            let s = ctx.ofdm.modulate(&frame).expect("valid frame");

            let soft: Vec<Complex64> = match detector {
                DetectorKind::LowerBound => {
                    let s = if dispersion > 0.0 {
                        channel::apply_dispersion(&ctx.ofdm, &s, dispersion).expect("dispersion")
                    } else {
                        s
                    };
                    let y = channel::awgn(&s, sigma_v, &mut rng).expect("valid sigma");
                    ctx.ofdm.demodulate(&y).payload().to_vec()
                }
                DetectorKind::Clipping | DetectorKind::Slm => {
                    let (tx_frame, side) = if detector == DetectorKind::Slm {
                        let (chosen, side) =
                            detectors::slm_select(&ctx.ofdm, &frame, cfg.slm_candidates, &mut rng)
                                .expect("slm select");
                        (chosen, Some(side))
                    } else {
                        (frame.clone(), None)
                    };
                    let sb = frontend::add_bias(&ctx.ofdm.modulate(&tx_frame).expect("frame"), &bias)
                        .expect("raw signal");
                    let mut tx = frontend::clip(&sb).expect("biased signal");
                    if dispersion > 0.0 {
                        tx = channel::apply_dispersion(&ctx.ofdm, &tx, dispersion)
                            .expect("dispersion");
                    }
                    let y = channel::awgn(&tx, sigma_v, &mut rng).expect("valid sigma");
                    let shifted: Vec<f64> = y.samples().iter().map(|&v| v - b_dc).collect();
                    let shifted = RealSignal::new(shifted, SignalRole::Received, kappa, 1.0);
                    let bins = ctx.ofdm.demodulate(&shifted);
                    match side {
                        None => bins.payload().to_vec(),
                        Some(side) => bins
                            .payload()
                            .iter()
                            .enumerate()
                            .map(|(i, &c)| c * f64::from(side.phase_vector.as_slice()[i + 1]))
                            .collect(),
                    }
                }
                DetectorKind::Isea => {
                    let sb = frontend::add_bias(&s, &bias).expect("raw signal");
                    let mut tx = frontend::absval(&sb).expect("biased signal");
                    if dispersion > 0.0 {
                        tx = channel::apply_dispersion(&ctx.ofdm, &tx, dispersion)
                            .expect("dispersion");
                    }
                    let y = channel::awgn(&tx, sigma_v, &mut rng).expect("valid sigma");
                    let res = detectors::isea_detect(&ctx.ofdm, &y, &bias, &ctx.spec, cfg.max_iter)
                        .expect("isea detect");
                    // re-run the final pass to expose the pre-slicer estimates
                    let signs = res.final_signs.expect("isea returns signs");
                    let s_hat: Vec<f64> = y
                        .samples()
                        .iter()
                        .zip(signs.as_slice())
                        .map(|(&v, &z)| f64::from(z) * v - b_dc)
                        .collect();
                    let s_hat = RealSignal::new(s_hat, SignalRole::Received, kappa, 1.0);
                    ctx.ofdm.demodulate(&s_hat).payload().to_vec()
                }
            };

            records.extend(soft.iter().enumerate().map(|(i, c)| ScatterRecord {
                detector,
                kappa,
                snr_db,
                frame: f,
                subcarrier: i + 1,
                re: c.re,
                im: c.im,
            }));
        }
    }
    Ok(records)
}

/// One frame end to end with the resolved configuration; the degenerate
/// single-shot experiment behind `detect-one`.
pub fn run_detect_one(cfg: &SimConfig) -> Result<Vec<SweepRecord>, SimError> {
    let mut cfg = cfg.clone();
    cfg.frames = 1;
    cfg.kappas.truncate(1);
    cfg.snrs_db.truncate(1);
    cfg.dispersions.truncate(1);
    run_sweep(&cfg)
}
