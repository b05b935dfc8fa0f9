//! Iterative radix-2 FFT for power-of-two sizes.
//!
//! Both directions are unnormalized; callers apply their own scaling. The
//! plan precomputes the bit-reversal permutation and per-stage twiddles so
//! repeated transforms of the same size avoid trig calls.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods take over when std is enabled
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone)]
pub(crate) struct FftPlan {
    n: usize,
    bitrev: Vec<u32>,
    // Stage with half-size h occupies twiddles[h - 1..2 * h - 1]; entry j is
    // exp(-i*pi*j/h), the forward twiddle W_{2h}^j.
    twiddles: Vec<Complex64>,
}

impl FftPlan {
    pub(crate) fn new(n: usize) -> FftPlan {
        assert!(n.is_power_of_two() && n >= 2, "FFT size must be a power of two >= 2");
        let bits = n.trailing_zeros();
        let bitrev = (0..n as u32).map(|i| i.reverse_bits() >> (32 - bits)).collect();

        let mut twiddles = Vec::with_capacity(n - 1);
        let mut half = 1usize;
        while half < n {
            let step = -core::f64::consts::PI / half as f64;
            for j in 0..half {
                let angle = step * j as f64;
                twiddles.push(Complex64::new(angle.cos(), angle.sin()));
            }
            half *= 2;
        }

        FftPlan { n, bitrev, twiddles }
    }

    /// In-place transform of `buf`, which must have length `self.len()`.
    pub(crate) fn process(&self, buf: &mut [Complex64], dir: Direction) {
        assert_eq!(buf.len(), self.n);
        for (i, &r) in self.bitrev.iter().enumerate() {
            let r = r as usize;
            if i < r {
                buf.swap(i, r);
            }
        }

        let sign = match dir {
            Direction::Forward => 1.0,
            Direction::Inverse => -1.0,
        };
        let mut half = 1usize;
        while half < self.n {
            let stage = &self.twiddles[half - 1..2 * half - 1];
            for chunk in buf.chunks_exact_mut(2 * half) {
                let (lo, hi) = chunk.split_at_mut(half);
                for j in 0..half {
                    let w = Complex64::new(stage[j].re, sign * stage[j].im);
                    let t = hi[j] * w;
                    hi[j] = lo[j] - t;
                    lo[j] += t;
                }
            }
            half *= 2;
        }
    }
}
