//! Sampled signals, min–max normalization and half-rate resampling.

use alloc::vec::Vec;

use crate::{Error, Result};

/// A mono sample sequence with its sampling rate in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if sample_rate == 0 {
            return Err(Error::ZeroSampleRate);
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Same rate, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.sample_rate)
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (f64, f64) {
        min_max(&self.samples)
    }
}

pub(crate) fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Bounds of a min–max map onto [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineParams {
    pub x_min: f64,
    pub x_max: f64,
}

impl AffineParams {
    pub fn new(x_min: f64, x_max: f64) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Degenerate("affine bounds need finite x_max > x_min"));
        }
        Ok(Self { x_min, x_max })
    }

    /// Identity map: bounds (-1, 1).
    pub fn identity() -> Self {
        Self { x_min: -1.0, x_max: 1.0 }
    }

    #[inline]
    pub fn forward(&self, v: f64) -> f64 {
        2.0 * ((v - self.x_min) / (self.x_max - self.x_min)) - 1.0
    }

    #[inline]
    pub fn inverse(&self, v: f64) -> f64 {
        (v + 1.0) / 2.0 * (self.x_max - self.x_min) + self.x_min
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| self.forward(v)).collect()
    }

    pub fn invert(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| self.inverse(v)).collect()
    }
}

/// Maps the signal onto [-1, 1] with its own min and max.
///
/// The extremes are pinned to exactly -1 and +1 so rounding in the affine map
/// cannot leave them a few ulps off.
pub fn normalize(signal: &Signal) -> Result<(Signal, AffineParams)> {
    let (lo, hi) = signal.min_max();
    if !(hi > lo) {
        return Err(Error::Degenerate("constant signal cannot be min-max normalized"));
    }
    let params = AffineParams::new(lo, hi)?;
    let out = signal
        .samples()
        .iter()
        .map(|&v| {
            if v == lo {
                -1.0
            } else if v == hi {
                1.0
            } else {
                params.forward(v)
            }
        })
        .collect();
    Ok((signal.with_samples(out)?, params))
}

pub fn denormalize(signal: &Signal, params: &AffineParams) -> Result<Signal> {
    AffineParams::new(params.x_min, params.x_max)?;
    signal.with_samples(params.invert(signal.samples()))
}

/// Half-band anti-alias filter used by [`resample_half`].
///
/// Kaiser-windowed sinc, cutoff 0.45 × output rate, designed for 70 dB of
/// stopband rejection from the output Nyquist frequency upwards and a
/// transition band of 0.05 × input rate. Taps sum to exactly one.
#[derive(Debug, Clone)]
pub struct DecimationFilter {
    taps: Vec<f64>,
}

impl DecimationFilter {
    pub const STOPBAND_DB: f64 = 70.0;

    pub fn new() -> Self {
        // Normalized to the input rate.
        let cutoff = 0.225;
        let transition = 0.05;
        let atten = Self::STOPBAND_DB;
        let beta = 0.1102 * (atten - 8.7);
        let estimate = (atten - 7.95) / (2.285 * 2.0 * core::f64::consts::PI * transition);
        let mut len = libm::ceil(estimate) as usize + 1;
        if len % 2 == 0 {
            len += 1;
        }
        let center = (len - 1) as f64 / 2.0;
        let i0_beta = bessel_i0(beta);
        let mut taps: Vec<f64> = (0..len)
            .map(|k| {
                let t = k as f64 - center;
                let sinc = if t == 0.0 {
                    2.0 * cutoff
                } else {
                    libm::sin(2.0 * core::f64::consts::PI * cutoff * t) / (core::f64::consts::PI * t)
                };
                let r = t / center;
                let window = bessel_i0(beta * libm::sqrt((1.0 - r * r).max(0.0))) / i0_beta;
                sinc * window
            })
            .collect();
        let sum: f64 = taps.iter().sum();
        for t in &mut taps {
            *t /= sum;
        }
        Self { taps }
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Zero-phase filtering: output index `i` is centred on input index `i`,
    /// samples beyond either end count as zero.
    pub fn filter_at(&self, x: &[f64], i: usize) -> f64 {
        let half = self.taps.len() / 2;
        let mut acc = 0.0;
        for (k, &h) in self.taps.iter().enumerate() {
            let j = i as isize + k as isize - half as isize;
            if j >= 0 && (j as usize) < x.len() {
                acc += h * x[j as usize];
            }
        }
        acc
    }
}

impl Default for DecimationFilter {
    fn default() -> Self {
        Self::new()
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-17 {
        term *= (half / k) * (half / k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Low-pass filters and keeps every second sample. Output length is
/// `ceil(n / 2)` and the rate halves.
pub fn resample_half(signal: &Signal) -> Result<Signal> {
    let rate = signal.sample_rate();
    if rate % 2 != 0 {
        return Err(Error::OddSampleRate(rate));
    }
    let filter = DecimationFilter::new();
    let x = signal.samples();
    let out: Vec<f64> = (0..x.len()).step_by(2).map(|i| filter.filter_at(x, i)).collect();
    Signal::new(out, rate / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use std::f64::consts::PI;

    fn sig(v: Vec<f64>) -> Signal {
        Signal::new(v, 4000).unwrap()
    }

    #[test]
    fn rejects_empty_and_zero_rate() {
        assert_eq!(Signal::new(vec![], 8000), Err(Error::EmptySignal));
        assert_eq!(Signal::new(vec![1.0], 0), Err(Error::ZeroSampleRate));
    }

    #[test]
    fn normalize_maps_onto_unit_range() {
        let (n, p) = normalize(&sig(vec![2.0, 4.0, 6.0])).unwrap();
        assert_eq!(n.samples(), &[-1.0, 0.0, 1.0]);
        assert_eq!(p, AffineParams { x_min: 2.0, x_max: 6.0 });
    }

    #[test]
    fn normalize_fixed_point() {
        let x = vec![-1.0, -0.25, 0.5, 1.0];
        let (n, _) = normalize(&sig(x.clone())).unwrap();
        assert_eq!(n.samples(), x.as_slice());
    }

    #[test]
    fn normalize_rejects_constant() {
        assert!(matches!(normalize(&sig(vec![5.0; 3])), Err(Error::Degenerate(_))));
    }

    #[test]
    fn denormalize_examples() {
        let p = AffineParams::new(0.0, 10.0).unwrap();
        assert_eq!(denormalize(&sig(vec![-1.0, 1.0]), &p).unwrap().samples(), &[0.0, 10.0]);
        let p = AffineParams::new(-3.0, 5.0).unwrap();
        assert_eq!(denormalize(&sig(vec![0.0]), &p).unwrap().samples(), &[1.0]);
    }

    #[test]
    fn affine_requires_strict_order() {
        assert!(AffineParams::new(1.0, 1.0).is_err());
        assert!(AffineParams::new(2.0, 1.0).is_err());
    }

    #[test]
    fn resample_rejects_odd_rate() {
        let s = Signal::new(vec![0.0; 10], 8001).unwrap();
        assert_eq!(resample_half(&s), Err(Error::OddSampleRate(8001)));
    }

    #[test]
    fn resample_length_and_rate() {
        for n in [1usize, 2, 7, 100, 101] {
            let s = Signal::new(vec![0.5; n], 8000).unwrap();
            let r = resample_half(&s).unwrap();
            assert_eq!(r.len(), n.div_ceil(2));
            assert_eq!(r.sample_rate(), 4000);
        }
    }

    #[test]
    fn constant_passes_away_from_edges() {
        let s = Signal::new(vec![0.7; 2000], 8000).unwrap();
        let r = resample_half(&s).unwrap();
        let taps = DecimationFilter::new().taps().len();
        let skip = taps.div_ceil(2);
        for &v in &r.samples()[skip..r.len() - skip] {
            assert!((v - 0.7).abs() < 1e-12, "{v}");
        }
    }

    /// Least-squares fit of a·sin + b·cos at a known frequency, scanned over a
    /// small frequency grid; returns (best frequency, amplitude).
    fn fit_sine(x: &[f64], rate: f64, f0: f64) -> (f64, f64) {
        let mut best = (f0, 0.0, f64::INFINITY);
        let mut f = f0 - 2.0;
        while f <= f0 + 2.0 {
            let (mut ss, mut cc, mut sc, mut xs, mut xc) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                let ph = 2.0 * PI * f * i as f64 / rate;
                let (s, c) = (ph.sin(), ph.cos());
                ss += s * s;
                cc += c * c;
                sc += s * c;
                xs += v * s;
                xc += v * c;
            }
            let det = ss * cc - sc * sc;
            let a = (xs * cc - xc * sc) / det;
            let b = (xc * ss - xs * sc) / det;
            let resid: f64 = x
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let ph = 2.0 * PI * f * i as f64 / rate;
                    let e = v - a * ph.sin() - b * ph.cos();
                    e * e
                })
                .sum();
            if resid < best.2 {
                best = (f, (a * a + b * b).sqrt(), resid);
            }
            f += 0.01;
        }
        (best.0, best.1)
    }

    #[test]
    fn passband_tone_keeps_amplitude_and_frequency() {
        let x: Vec<f64> = (0..8000).map(|i| 0.8 * (2.0 * PI * 100.0 * i as f64 / 8000.0).sin()).collect();
        let r = resample_half(&Signal::new(x, 8000).unwrap()).unwrap();
        let skip = DecimationFilter::new().taps().len();
        let interior = &r.samples()[skip..r.len() - skip];
        let (f, amp) = fit_sine(interior, 4000.0, 100.0);
        assert!((f - 100.0).abs() < 0.02, "frequency {f}");
        assert!((amp - 0.8).abs() / 0.8 < 0.01, "amplitude {amp}");
    }

    #[test]
    fn stopband_tone_is_attenuated_by_40db() {
        let n = 8000;
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * 3500.0 * i as f64 / 8000.0).sin()).collect();
        let r = resample_half(&Signal::new(x, 8000).unwrap()).unwrap();
        let skip = DecimationFilter::new().taps().len();
        let interior = &r.samples()[skip..r.len() - skip];
        // 3500 Hz folds to 500 Hz at a 4000 Hz rate; measure the DFT bin there.
        let m = interior.len() as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (i, &v) in interior.iter().enumerate() {
            let ph = 2.0 * PI * 500.0 * i as f64 / 4000.0;
            re += v * ph.cos();
            im -= v * ph.sin();
        }
        let amp = 2.0 * (re * re + im * im).sqrt() / m;
        let atten_db = -20.0 * amp.log10();
        assert!(atten_db >= 40.0, "attenuation {atten_db} dB");
    }

    #[test]
    fn filter_stopband_meets_design() {
        let taps = DecimationFilter::new();
        for k in 0..=200 {
            let f = 0.25 + 0.25 * k as f64 / 200.0;
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &h) in taps.taps().iter().enumerate() {
                re += h * (2.0 * PI * f * j as f64).cos();
                im += h * (2.0 * PI * f * j as f64).sin();
            }
            let gain_db = 20.0 * (re * re + im * im).sqrt().log10();
            assert!(gain_db < -60.0, "f={f} gain={gain_db}");
        }
    }
}
