//! Short-time Fourier magnitudes and their text/PGM export.

use std::path::Path;

use emdenoise_core::Signal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::fsio::write_atomic;
use crate::{Error, Result};

pub const DEFAULT_WINDOW: usize = 256;
pub const DEFAULT_HOP: usize = 128;

/// Dynamic range mapped onto the 256 gray levels of a PGM export.
pub const PGM_RANGE_DB: f64 = 80.0;

/// Magnitude grid, one row per frame and `window / 2 + 1` bins per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub sample_rate: u32,
    pub window: usize,
    pub hop: usize,
    pub frames: Vec<Vec<f64>>,
}

/// Periodic Hann window.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect()
}

/// Number of frames and bins for a signal of `len` samples.
pub fn grid_dims(len: usize, window: usize, hop: usize) -> (usize, usize) {
    ((len - window) / hop + 1, window / 2 + 1)
}

pub fn spectrogram(signal: &Signal, window: usize, hop: usize) -> Result<Spectrogram> {
    let x = signal.samples();
    if window < 2 || hop == 0 || window > x.len() {
        return Err(Error::Config(format!(
            "spectrogram window {window} / hop {hop} invalid for {} samples",
            x.len()
        )));
    }
    let (n_frames, n_bins) = grid_dims(x.len(), window, hop);
    let w = hann(window);
    let fft = FftPlanner::new().plan_fft_forward(window);
    let mut buf = vec![Complex::new(0.0, 0.0); window];
    let frames = (0..n_frames)
        .map(|f| {
            let seg = &x[f * hop..f * hop + window];
            for ((b, &s), &wi) in buf.iter_mut().zip(seg).zip(&w) {
                *b = Complex::new(s * wi, 0.0);
            }
            fft.process(&mut buf);
            buf[..n_bins].iter().map(|c| c.norm()).collect()
        })
        .collect();
    Ok(Spectrogram { sample_rate: signal.sample_rate(), window, hop, frames })
}

impl Spectrogram {
    pub fn bin_hz(&self, bin: usize) -> f64 {
        bin as f64 * self.sample_rate as f64 / self.window as f64
    }

    /// One line per frame, bins separated by spaces, shortest round-trip floats.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for row in &self.frames {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Binary PGM (P5): frames run left to right, frequency rises upward.
    /// Gray level is `255 * (1 + dB / PGM_RANGE_DB)` relative to the grid
    /// maximum, clamped at 0; an all-zero grid is black.
    pub fn to_pgm(&self) -> Vec<u8> {
        let width = self.frames.len();
        let height = self.frames.first().map_or(0, |r| r.len());
        let peak = self.frames.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
        let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
        for bin in (0..height).rev() {
            for row in &self.frames {
                let v = row[bin];
                let level = if peak > 0.0 && v > 0.0 {
                    let db = 20.0 * (v / peak).log10();
                    (255.0 * (1.0 + db / PGM_RANGE_DB)).round().clamp(0.0, 255.0) as u8
                } else {
                    0
                };
                out.push(level);
            }
        }
        out
    }

    /// Writes PGM when the path ends in `.pgm`, text otherwise.
    pub fn export(&self, path: &Path) -> Result<()> {
        let is_pgm = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
        let bytes = if is_pgm { self.to_pgm() } else { self.to_text().into_bytes() };
        write_atomic(path, |w| w.write_all(&bytes).map_err(|e| Error::io(path, e)))
    }
}
