use alloc::vec::Vec;

use super::extrema::{count_zero_crossings, find_extrema, Extrema, Extremum};
use super::spline::NaturalSpline;
use crate::{Error, Result, Signal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiftConfig {
    /// Sifting stops once `Σ(h_prev − h)² / Σ h_prev²` drops below this and
    /// the candidate satisfies the extrema / zero-crossing condition.
    pub sd_threshold: f64,
    pub max_sift_iters: usize,
    pub max_imfs: usize,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self { sd_threshold: 0.2, max_sift_iters: 100, max_imfs: 15 }
    }
}

impl SiftConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sd_threshold > 0.0) {
            return Err(Error::param("sd_threshold", "must be positive"));
        }
        if self.max_sift_iters == 0 {
            return Err(Error::param("max_sift_iters", "must be at least 1"));
        }
        if self.max_imfs == 0 {
            return Err(Error::param("max_imfs", "must be at least 1"));
        }
        Ok(())
    }
}

/// IMFs in extraction order (highest frequency first) and the final residue.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfStack {
    pub imfs: Vec<Vec<f64>>,
    pub residue: Vec<f64>,
    pub source_length: usize,
    /// Sifting iterations spent on each IMF.
    pub sift_iterations: Vec<usize>,
}

impl ImfStack {
    pub fn len(&self) -> usize {
        self.imfs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.imfs.is_empty()
    }

    /// Σ IMFs + residue.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residue.clone();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf) {
                *o += v;
            }
        }
        out
    }

    /// ‖reconstruct − source‖₂ / ‖source‖₂ (absolute error for a zero source).
    pub fn reconstruction_error(&self, source: &[f64]) -> f64 {
        let rec = self.reconstruct();
        let err: f64 = rec.iter().zip(source).map(|(a, b)| (a - b) * (a - b)).sum();
        let norm: f64 = source.iter().map(|v| v * v).sum();
        if norm > 0.0 {
            libm::sqrt(err / norm)
        } else {
            libm::sqrt(err)
        }
    }
}

/// Mirrors up to two extrema about each endpoint and returns spline knots.
fn knots(points: &[Extremum], len: usize) -> (Vec<f64>, Vec<f64>) {
    let last = (len - 1) as f64;
    let take = points.len().min(2);
    let mut xs = Vec::with_capacity(points.len() + 2 * take);
    let mut ys = Vec::with_capacity(points.len() + 2 * take);
    for p in points[..take].iter().rev() {
        xs.push(-(p.index as f64));
        ys.push(p.value);
    }
    for p in points {
        xs.push(p.index as f64);
        ys.push(p.value);
    }
    for p in points[points.len() - take..].iter().rev() {
        xs.push(2.0 * last - p.index as f64);
        ys.push(p.value);
    }
    (xs, ys)
}

fn envelopes_from(x: &[f64], ext: &Extrema) -> Result<(Vec<f64>, Vec<f64>)> {
    if ext.maxima.is_empty() || ext.minima.is_empty() {
        return Err(Error::MonotonicResidue);
    }
    let (ux, uy) = knots(&ext.maxima, x.len());
    let (lx, ly) = knots(&ext.minima, x.len());
    let upper = NaturalSpline::new(ux, uy)?.eval_grid(x.len());
    let lower = NaturalSpline::new(lx, ly)?.eval_grid(x.len());
    Ok((upper, lower))
}

/// Upper and lower cubic-spline envelopes through the local maxima and minima.
///
/// Fails with [`Error::MonotonicResidue`] when either set of extrema is empty.
pub fn envelopes(x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let ext = find_extrema(x)?;
    envelopes_from(x, &ext)
}

/// Sifts one IMF out of `x`; returns `(imf, x − imf)`.
pub fn extract_imf(x: &[f64], cfg: &SiftConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let (imf, _) = sift(x, cfg)?;
    let remainder = x.iter().zip(&imf).map(|(a, b)| a - b).collect();
    Ok((imf, remainder))
}

fn sift(x: &[f64], cfg: &SiftConfig) -> Result<(Vec<f64>, usize)> {
    cfg.validate()?;
    let mut h = x.to_vec();
    let mut last_sd = f64::INFINITY;
    let mut iterations = 0;
    loop {
        let ext = find_extrema(&h)?;
        if iterations > 0 {
            let imf_ok = ext.count().abs_diff(count_zero_crossings(&h)) <= 1;
            if (last_sd < cfg.sd_threshold && imf_ok) || iterations >= cfg.max_sift_iters {
                break;
            }
        }
        let (upper, lower) = match envelopes_from(&h, &ext) {
            Ok(env) => env,
            Err(Error::MonotonicResidue) if iterations > 0 => break,
            Err(e) => return Err(e),
        };
        let mut change = 0.0;
        let mut energy = 0.0;
        for ((v, u), l) in h.iter_mut().zip(&upper).zip(&lower) {
            let mean = 0.5 * (u + l);
            energy += *v * *v;
            change += mean * mean;
            *v -= mean;
        }
        last_sd = if energy > 0.0 { change / energy } else { 0.0 };
        iterations += 1;
    }
    Ok((h, iterations))
}

/// Residue swing, relative to the input's, below which sifting would only
/// pick apart rounding error.
pub const NEGLIGIBLE_RESIDUE: f64 = 1e-12;

/// Full decomposition: IMFs are peeled off the running residue until it has no
/// maxima or no minima left, its swing falls below [`NEGLIGIBLE_RESIDUE`] of
/// the input's, or `max_imfs` IMFs exist.
pub fn decompose(signal: &Signal, cfg: &SiftConfig) -> Result<ImfStack> {
    decompose_samples(signal.samples(), cfg)
}

pub(crate) fn decompose_samples(x: &[f64], cfg: &SiftConfig) -> Result<ImfStack> {
    cfg.validate()?;
    let (lo, hi) = crate::signal::min_max(x);
    if !(hi > lo) {
        return Err(Error::Degenerate("constant signal has no IMFs"));
    }
    let mut imfs = Vec::new();
    let mut sift_iterations = Vec::new();
    let mut residue = x.to_vec();
    while imfs.len() < cfg.max_imfs && residue.len() >= 3 {
        let (r_lo, r_hi) = crate::signal::min_max(&residue);
        if r_hi - r_lo <= NEGLIGIBLE_RESIDUE * (hi - lo) {
            break;
        }
        let (imf, iters) = match sift(&residue, cfg) {
            Ok(r) => r,
            Err(Error::MonotonicResidue) => break,
            Err(e) => return Err(e),
        };
        for (r, v) in residue.iter_mut().zip(&imf) {
            *r -= v;
        }
        imfs.push(imf);
        sift_iterations.push(iters);
    }
    Ok(ImfStack { imfs, residue, source_length: x.len(), sift_iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emd::is_imf;
    use std::f64::consts::PI;

    fn tone(n: usize, rate: f64, f: f64, amp: f64) -> Vec<f64> {
        (0..n).map(|i| amp * (2.0 * PI * f * i as f64 / rate).sin()).collect()
    }

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn sine_envelopes_hug_amplitude() {
        let x = tone(2000, 1000.0, 13.0, 1.7);
        let (upper, lower) = envelopes(&x).unwrap();
        for i in 100..1900 {
            assert!((upper[i] - 1.7).abs() < 0.02 * 1.7, "upper[{i}] = {}", upper[i]);
            assert!((lower[i] + 1.7).abs() < 0.02 * 1.7, "lower[{i}] = {}", lower[i]);
        }
    }

    #[test]
    fn envelopes_pass_through_extrema() {
        let x = tone(500, 100.0, 3.3, 1.0);
        let ext = find_extrema(&x).unwrap();
        let (upper, lower) = envelopes(&x).unwrap();
        for m in &ext.maxima {
            assert!((upper[m.index] - m.value).abs() < 1e-12);
        }
        for m in &ext.minima {
            assert!((lower[m.index] - m.value).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_vertices_are_knots() {
        let x: Vec<f64> = (0..200)
            .map(|i| {
                let p = (i % 20) as f64;
                if p < 10.0 { p } else { 20.0 - p }
            })
            .collect();
        let (upper, lower) = envelopes(&x).unwrap();
        for i in 1..199 {
            if i % 20 == 10 {
                assert!((upper[i] - 10.0).abs() < 1e-12);
            }
            if i % 20 == 0 {
                assert!(lower[i].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn monotone_has_no_envelopes() {
        let ramp: Vec<f64> = (0..50).map(|i| i as f64).collect();
        assert_eq!(envelopes(&ramp), Err(Error::MonotonicResidue));
        assert_eq!(extract_imf(&ramp, &SiftConfig::default()), Err(Error::MonotonicResidue));
    }

    #[test]
    fn pure_tone_is_its_own_imf() {
        let x = tone(4000, 4000.0, 50.0, 1.0);
        let (imf, rem) = extract_imf(&x, &SiftConfig::default()).unwrap();
        assert!(corr(&imf, &x) > 0.99);
        let e_rem: f64 = rem.iter().map(|v| v * v).sum();
        let e_x: f64 = x.iter().map(|v| v * v).sum();
        assert!(e_rem < 0.01 * e_x);
        for i in 0..x.len() {
            assert!((imf[i] + rem[i] - x[i]).abs() <= 1e-10 * x[i].abs().max(1.0));
        }
        assert!(is_imf(&imf));
    }

    #[test]
    fn ramp_decomposes_to_residue_only() {
        let ramp: Vec<f64> = (0..300).map(|i| 0.01 * i as f64).collect();
        let s = Signal::new(ramp.clone(), 1000).unwrap();
        let stack = decompose(&s, &SiftConfig::default()).unwrap();
        assert!(stack.imfs.is_empty());
        assert_eq!(stack.residue, ramp);
    }

    #[test]
    fn constant_is_rejected() {
        let s = Signal::new(alloc::vec![1.0; 64], 1000).unwrap();
        assert!(matches!(decompose(&s, &SiftConfig::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn separates_two_tones() {
        let low = tone(4000, 4000.0, 40.0, 1.0);
        let high = tone(4000, 4000.0, 400.0, 1.0);
        let x: Vec<f64> = low.iter().zip(&high).map(|(a, b)| a + b).collect();
        let s = Signal::new(x.clone(), 4000).unwrap();
        let stack = decompose(&s, &SiftConfig::default()).unwrap();
        assert!(stack.len() >= 2);
        assert!(corr(&stack.imfs[0], &high) > 0.95, "imf1 vs 400 Hz");
        assert!(corr(&stack.imfs[1], &low) > 0.95, "imf2 vs 40 Hz");
        assert!(stack.reconstruction_error(&x) < 1e-8);
        for imf in &stack.imfs {
            assert!(is_imf(imf));
        }
        let zc0 = count_zero_crossings(&stack.imfs[0]);
        let zc1 = count_zero_crossings(&stack.imfs[1]);
        assert!(zc0 >= zc1);
    }

    #[test]
    fn deterministic() {
        let x: Vec<f64> = (0..1500).map(|i| ((i * i) as f64 * 1e-4).sin() + 0.1 * (i as f64).cos()).collect();
        let s = Signal::new(x, 1000).unwrap();
        let a = decompose(&s, &SiftConfig::default()).unwrap();
        let b = decompose(&s, &SiftConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn max_imfs_caps_depth() {
        let x: Vec<f64> = (0..3000).map(|i| ((i * i) as f64 * 3e-5).sin()).collect();
        let cfg = SiftConfig { max_imfs: 1, ..Default::default() };
        let stack = decompose(&Signal::new(x.clone(), 1000).unwrap(), &cfg).unwrap();
        assert_eq!(stack.len(), 1);
        assert!(stack.reconstruction_error(&x) < 1e-12);
    }
}

