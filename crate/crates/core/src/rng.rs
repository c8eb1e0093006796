//! Seeded random streams.
//!
//! Every random draw in the crate goes through [`SeededRng`], a ChaCha8 stream
//! keyed by `rand_core`'s `seed_from_u64` expansion. Gaussian samples use the
//! basic Box–Muller transform on two uniforms in (0, 1]; both outputs of each
//! transform are used. Neither algorithm depends on platform math beyond
//! `libm`, so a seed replays bit-identically across builds.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in (0, 1], 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n` (Lemire's multiply-shift with rejection).
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.inner.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let radius = libm::sqrt(-2.0 * libm::log(u1));
        let theta = TWO_PI * u2;
        self.spare = Some(radius * libm::sin(theta));
        radius * libm::cos(theta)
    }
}

/// Derives an independent seed for a sub-stream (cycle, trial, SNR, ...) by
/// folding each label through the SplitMix64 finalizer.
pub fn derive_seed(base: u64, labels: &[u64]) -> u64 {
    let mut state = splitmix(base ^ 0x6a09_e667_f3bc_c909);
    for &label in labels {
        state = splitmix(state ^ splitmix(label.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    state
}

/// Stable integer label for a dB value, resolution 1/1000 dB.
pub fn db_label(db: f64) -> u64 {
    libm::round(db * 1000.0) as i64 as u64
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
