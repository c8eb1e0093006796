//! Synthetic breath cycles.
//!
//! A cycle is a band-limited noise carrier with a 1/√f amplitude tilt inside
//! `[band_low, band_high]`, shaped by an inhale bump followed by a weaker
//! exhale bump. It stands in for recorded lung sounds when none are at hand.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::rng::SeededRng;
use crate::{fft, Error, Result, Signal};

/// Peak absolute amplitude of every generated cycle.
pub const PEAK_AMPLITUDE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct BreathSpec {
    pub cycle_seconds: f64,
    pub inhale_fraction: f64,
    pub band_low: f64,
    pub band_high: f64,
    pub exhale_gain: f64,
    pub seed: u64,
}

impl Default for BreathSpec {
    fn default() -> Self {
        Self {
            cycle_seconds: 5.0,
            inhale_fraction: 0.4,
            band_low: 100.0,
            band_high: 800.0,
            exhale_gain: 0.4,
            seed: 0,
        }
    }
}

impl BreathSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.cycle_seconds > 0.0) || !self.cycle_seconds.is_finite() {
            return Err(Error::param("cycle_seconds", "must be positive"));
        }
        if !(self.inhale_fraction > 0.0 && self.inhale_fraction < 1.0) {
            return Err(Error::param("inhale_fraction", "must lie in (0, 1)"));
        }
        if !(self.band_low >= 20.0 && self.band_low < self.band_high && self.band_high <= 2000.0) {
            return Err(Error::param("band", "need 20 <= band_low < band_high <= 2000 Hz"));
        }
        if !(self.exhale_gain > 0.0 && self.exhale_gain <= 1.0) {
            return Err(Error::param("exhale_gain", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Two-phase amplitude envelope over `len` samples: a sin² inhale bump of
/// height 1 spanning `inhale_fraction` of the cycle, then a sin² exhale bump of
/// height `exhale_gain`.
pub fn breath_envelope(len: usize, inhale_fraction: f64, exhale_gain: f64) -> Vec<f64> {
    if len < 2 {
        return alloc::vec![0.0; len];
    }
    let last = (len - 1) as f64;
    (0..len)
        .map(|i| {
            let u = i as f64 / last;
            if u <= inhale_fraction {
                let s = libm::sin(PI * u / inhale_fraction);
                s * s
            } else {
                let s = libm::sin(PI * (u - inhale_fraction) / (1.0 - inhale_fraction));
                exhale_gain * s * s
            }
        })
        .collect()
}

pub fn synth_breath_cycle(spec: &BreathSpec, sample_rate: u32) -> Result<Signal> {
    spec.validate()?;
    if (sample_rate as f64) < 2.0 * spec.band_high {
        return Err(Error::param("sample_rate", "must be at least twice band_high"));
    }
    let len = libm::round(spec.cycle_seconds * sample_rate as f64) as usize;
    if len < 2 {
        return Err(Error::TooShort { min: 2, actual: len });
    }

    let grid = fft::next_pow2(len);
    let mut rng = SeededRng::new(spec.seed);
    let mut spectrum = alloc::vec![Complex64::new(0.0, 0.0); grid];
    let bin_hz = sample_rate as f64 / grid as f64;
    for k in 1..grid / 2 {
        let re = rng.gaussian();
        let im = rng.gaussian();
        let f = k as f64 * bin_hz;
        if f >= spec.band_low && f <= spec.band_high {
            let amp = 1.0 / libm::sqrt(f);
            spectrum[k] = Complex64::new(re * amp, im * amp);
            spectrum[grid - k] = spectrum[k].conj();
        }
    }
    fft::inverse(&mut spectrum);

    let envelope = breath_envelope(len, spec.inhale_fraction, spec.exhale_gain);
    let mut samples: Vec<f64> = spectrum[..len]
        .iter()
        .zip(&envelope)
        .map(|(c, e)| c.re * e)
        .collect();
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::Degenerate("band holds no frequency bins at this length"));
    }
    let scale = PEAK_AMPLITUDE / peak;
    for v in &mut samples {
        *v *= scale;
    }
    Signal::new(samples, sample_rate)
}
