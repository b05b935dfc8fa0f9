//! Experiment configuration: defaults, TOML (de)serialization, sweep-grid
//! parsing, and validation.

use avofdm_core::{ConstellationKind, DetectorKind};
use serde::{Deserialize, Serialize};

use crate::SimError;

/// Everything a run depends on. The record set produced by any experiment is
/// a pure function of this struct, including the seed, so a saved config
/// reproduces a run byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub n_fft: usize,
    #[serde(with = "kind_str")]
    pub constellation: ConstellationKind,
    pub kappas: Vec<f64>,
    /// SNR grid in dB; `inf` means a noiseless channel.
    pub snrs_db: Vec<f64>,
    pub dispersions: Vec<f64>,
    pub frames: u64,
    #[serde(with = "detector_list")]
    pub detectors: Vec<DetectorKind>,
    pub seed: u64,
    pub max_iter: u32,
    pub slm_candidates: u32,
    /// Worker-thread cap; 0 uses the default pool. Never affects results.
    pub threads: usize,
}

impl Default for SimConfig {
    fn default() -> SimConfig {
        SimConfig {
            n_fft: 1024,
            constellation: ConstellationKind::Qpsk,
            kappas: vec![1.2],
            snrs_db: vec![f64::INFINITY],
            dispersions: vec![0.0],
            frames: 2000,
            detectors: DetectorKind::ALL.to_vec(),
            seed: 7,
            max_iter: 50,
            slm_candidates: 128,
            threads: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !self.n_fft.is_power_of_two() || self.n_fft < 8 {
            return Err(SimError::Config(format!("n_fft {} is not a power of two >= 8", self.n_fft)));
        }
        if self.frames == 0 {
            return Err(SimError::Config("frames must be >= 1".into()));
        }
        if self.kappas.is_empty() || self.snrs_db.is_empty() || self.dispersions.is_empty() {
            return Err(SimError::Config("sweep grids must be non-empty".into()));
        }
        if self.detectors.is_empty() {
            return Err(SimError::Config("at least one detector must be selected".into()));
        }
        for &k in &self.kappas {
            if !k.is_finite() || k < 0.0 {
                return Err(SimError::Config(format!("kappa {k} must be finite and >= 0")));
            }
        }
        for &s in &self.snrs_db {
            if s.is_nan() {
                return Err(SimError::Config("snr must not be NaN".into()));
            }
        }
        for &d in &self.dispersions {
            if !d.is_finite() || d < 0.0 {
                return Err(SimError::Config(format!("dispersion {d} must be finite and >= 0")));
            }
        }
        if self.max_iter < 2 {
            return Err(SimError::Config(format!("max_iter {} must be >= 2", self.max_iter)));
        }
        if self.slm_candidates == 0 {
            return Err(SimError::Config("slm_candidates must be >= 1".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<SimConfig, SimError> {
        toml::from_str(text).map_err(|e| SimError::Config(format!("config file: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("SimConfig always serializes")
    }
}

/// Parses a sweep argument: a single value, a comma list, or an inclusive
/// `start:step:stop` range. `inf` and `noiseless` denote a noiseless channel.
pub fn parse_sweep(text: &str) -> Result<Vec<f64>, SimError> {
    let text = text.trim();
    let parse_one = |tok: &str| -> Result<f64, SimError> {
        let tok = tok.trim();
        if tok.eq_ignore_ascii_case("noiseless") {
            return Ok(f64::INFINITY);
        }
        tok.parse::<f64>()
            .map_err(|_| SimError::Config(format!("cannot parse sweep value {tok:?}")))
    };
    if text.contains(',') {
        return text.split(',').map(parse_one).collect();
    }
    // A range needs exactly start:step:stop; anything else is a scalar.
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => Ok(vec![parse_one(parts[0])?]),
        3 => {
            let start = parse_one(parts[0])?;
            let step = parse_one(parts[1])?;
            let stop = parse_one(parts[2])?;
            if !(step > 0.0) || !step.is_finite() {
                return Err(SimError::Config(format!("sweep step {step} must be positive")));
            }
            if stop < start {
                return Err(SimError::Config(format!("sweep stop {stop} below start {start}")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(SimError::Config(format!("sweep {text:?} is not value, list, or start:step:stop"))),
    }
}

mod kind_str {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &ConstellationKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(v.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ConstellationKind, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

mod detector_list {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[DetectorKind], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|d| d.as_str()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DetectorKind>, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        names.iter().map(|n| n.parse().map_err(D::Error::custom)).collect()
    }
}

/// Comma-separated detector list for the CLI.
pub fn parse_detectors(text: &str) -> Result<Vec<DetectorKind>, SimError> {
    let mut out = Vec::new();
    for tok in text.split(',') {
        let det: DetectorKind =
            tok.trim().parse().map_err(|e: &str| SimError::Config(e.to_string()))?;
        if !out.contains(&det) {
            out.push(det);
        }
    }
    if out.is_empty() {
        return Err(SimError::Config("empty detector list".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_roundtrips_through_toml() {
        let cfg = SimConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml();
        let back = SimConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn toml_roundtrips_infinite_snr() {
        let mut cfg = SimConfig::default();
        cfg.snrs_db = vec![f64::INFINITY, 12.0];
        cfg.constellation = ConstellationKind::Psk8;
        cfg.detectors = vec![DetectorKind::Isea, DetectorKind::LowerBound];
        let back = SimConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let cfg = SimConfig::from_toml("frames = 12\nconstellation = \"16qam\"\n").unwrap();
        assert_eq!(cfg.frames, 12);
        assert_eq!(cfg.constellation, ConstellationKind::Qam16);
        assert_eq!(cfg.n_fft, 1024);
        assert!(SimConfig::from_toml("no_such_field = 1").is_err());
    }

    #[test]
    fn sweep_forms() {
        assert_eq!(parse_sweep("1.5").unwrap(), vec![1.5]);
        assert_eq!(parse_sweep("1,2,3.5").unwrap(), vec![1.0, 2.0, 3.5]);
        assert_eq!(parse_sweep("0:2:20").unwrap().len(), 11);
        assert_eq!(parse_sweep("0:2:20").unwrap()[10], 20.0);
        assert_eq!(parse_sweep("1.0:0.05:1.3").unwrap().len(), 7);
        assert_eq!(parse_sweep("inf").unwrap(), vec![f64::INFINITY]);
        assert_eq!(parse_sweep("noiseless").unwrap(), vec![f64::INFINITY]);
        // stop short of an exact multiple: last in-range point wins
        assert_eq!(parse_sweep("0:3:10").unwrap(), vec![0.0, 3.0, 6.0, 9.0]);
        assert!(parse_sweep("1:0:5").is_err());
        assert!(parse_sweep("5:1:1").is_err());
        assert!(parse_sweep("a:b").is_err());
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut cfg = SimConfig::default();
        cfg.n_fft = 100;
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::default();
        cfg.kappas = vec![-0.5];
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::default();
        cfg.frames = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::default();
        cfg.max_iter = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::default();
        cfg.detectors.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn detector_lists() {
        assert_eq!(
            parse_detectors("isea, clipping").unwrap(),
            vec![DetectorKind::Isea, DetectorKind::Clipping]
        );
        assert_eq!(parse_detectors("isea,isea").unwrap(), vec![DetectorKind::Isea]);
        assert!(parse_detectors("isea,bogus").is_err());
    }
}
