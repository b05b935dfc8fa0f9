//! Symbol alphabets, uniform drawing, Gray labeling, and the
//! minimum-distance slicer.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods take over when std is enabled
use num_traits::Float;
use rand_core::RngCore;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstellationKind {
    Qpsk,
    Psk8,
    Psk16,
    Qam16,
}

impl ConstellationKind {
    pub fn size(self) -> usize {
        match self {
            ConstellationKind::Qpsk => 4,
            ConstellationKind::Psk8 => 8,
            ConstellationKind::Psk16 | ConstellationKind::Qam16 => 16,
        }
    }

    pub fn bits_per_symbol(self) -> u32 {
        self.size().trailing_zeros()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConstellationKind::Qpsk => "qpsk",
            ConstellationKind::Psk8 => "8psk",
            ConstellationKind::Psk16 => "16psk",
            ConstellationKind::Qam16 => "16qam",
        }
    }

    pub const ALL: [ConstellationKind; 4] = [
        ConstellationKind::Qpsk,
        ConstellationKind::Psk8,
        ConstellationKind::Psk16,
        ConstellationKind::Qam16,
    ];
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstellationKind {
    type Err = &'static str;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "qpsk" => Ok(ConstellationKind::Qpsk),
            "8psk" => Ok(ConstellationKind::Psk8),
            "16psk" => Ok(ConstellationKind::Psk16),
            "16qam" => Ok(ConstellationKind::Qam16),
            _ => Err("unknown constellation (expected qpsk|8psk|16psk|16qam)"),
        }
    }
}

/// A zero-mean alphabet scaled so the time-domain OFDM signal it produces
/// has unit variance: with N-2 of N subcarriers carrying symbols, the
/// per-symbol energy must be N/(N-2).
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationSpec {
    kind: ConstellationKind,
    points: Vec<Complex64>,
    per_symbol_energy: f64,
}

/// PSK rotation convention: point 0 at angle 0, indices counterclockwise.
/// QPSK uses the diagonal {+-1 +-j}/sqrt(2) points; 16-QAM the {+-1,+-3}^2
/// grid in row-major order. Fixed here because symbol-exact reproducibility
/// needs one convention even though SER is rotation-invariant.
fn base_points(kind: ConstellationKind) -> Vec<Complex64> {
    match kind {
        ConstellationKind::Qpsk => {
            let a = 0.5f64.sqrt();
            [(a, a), (-a, a), (-a, -a), (a, -a)]
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect()
        }
        ConstellationKind::Psk8 | ConstellationKind::Psk16 => {
            let k = kind.size();
            (0..k)
                .map(|i| {
                    let angle = 2.0 * core::f64::consts::PI * i as f64 / k as f64;
                    Complex64::new(angle.cos(), angle.sin())
                })
                .collect()
        }
        ConstellationKind::Qam16 => {
            let scale = 1.0 / 10.0f64.sqrt();
            let levels = [-3.0, -1.0, 1.0, 3.0];
            let mut pts = Vec::with_capacity(16);
            for &im in &levels {
                for &re in &levels {
                    pts.push(Complex64::new(re * scale, im * scale));
                }
            }
            pts
        }
    }
}

/// Builds the alphabet for a given FFT size.
pub fn build_constellation(kind: ConstellationKind, n_fft: usize) -> Result<ConstellationSpec> {
    if !n_fft.is_power_of_two() || n_fft < 8 {
        return Err(Error::InvalidFftSize(n_fft));
    }
    let scale = (n_fft as f64 / (n_fft - 2) as f64).sqrt();
    let points: Vec<Complex64> = base_points(kind).iter().map(|&p| p * scale).collect();
    let per_symbol_energy =
        points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
    Ok(ConstellationSpec { kind, points, per_symbol_energy })
}

impl ConstellationSpec {
    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    /// Mean of |point|^2; equals N/(N-2) by construction.
    pub fn per_symbol_energy(&self) -> f64 {
        self.per_symbol_energy
    }

    /// Minimum pairwise distance of the alphabet.
    pub fn min_distance(&self) -> f64 {
        let mut d2 = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d2 = d2.min((a - b).norm_sqr());
            }
        }
        d2.sqrt()
    }

    /// One uniform index. The alphabet sizes are powers of two, so masking
    /// the raw stream is exactly uniform.
    pub fn draw_index<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        (rng.next_u32() as usize) & (self.points.len() - 1)
    }

    pub fn draw_indices<R: RngCore + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<u8> {
        (0..count).map(|_| self.draw_index(rng) as u8).collect()
    }

    /// I.i.d. symbols, uniform over the alphabet.
    pub fn draw_symbols<R: RngCore + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Complex64> {
        (0..count).map(|_| self.points[self.draw_index(rng)]).collect()
    }

    /// Index of the alphabet point nearest to `soft` in Euclidean distance;
    /// ties go to the lowest index.
    pub fn slice_index(&self, soft: Complex64) -> usize {
        assert!(soft.re.is_finite() && soft.im.is_finite(), "slicer input must be finite");
        let mut best = 0;
        let mut best_d2 = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d2 = (soft - p).norm_sqr();
            if d2 < best_d2 {
                best_d2 = d2;
                best = i;
            }
        }
        best
    }

    /// Hard decision: the nearest alphabet point itself.
    pub fn slice(&self, soft: Complex64) -> Complex64 {
        self.points[self.slice_index(soft)]
    }

    /// Gray label of a point: adjacent constellation points differ in one
    /// bit (ring-adjacent for PSK, grid-adjacent for QAM).
    pub fn symbol_bits(&self, index: usize) -> u8 {
        let gray = |x: usize| (x ^ (x >> 1)) as u8;
        match self.kind {
            ConstellationKind::Qam16 => {
                let (row, col) = (index / 4, index % 4);
                gray(row) << 2 | gray(col)
            }
            _ => gray(index),
        }
    }

    /// Inverse of [`Self::symbol_bits`].
    pub fn index_from_bits(&self, bits: u8) -> usize {
        let ungray = |mut g: usize| {
            let mut x = 0;
            while g != 0 {
                x ^= g;
                g >>= 1;
            }
            x
        };
        match self.kind {
            ConstellationKind::Qam16 => {
                ungray((bits >> 2) as usize) * 4 + ungray((bits & 0b11) as usize)
            }
            _ => ungray(bits as usize),
        }
    }
}
