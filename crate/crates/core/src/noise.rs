//! White and 1/f^α noise, and mixing at an exact SNR.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::rng::SeededRng;
use crate::{fft, Error, Result, Signal};

/// Spectral exponent used for "pink" when nothing else is configured.
pub const DEFAULT_PINK_ALPHA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseKind {
    White,
    Pink,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 2] = [NoiseKind::White, NoiseKind::Pink];

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::White => "white",
            NoiseKind::Pink => "pink",
        }
    }

    pub fn label(self) -> u64 {
        match self {
            NoiseKind::White => 0,
            NoiseKind::Pink => 1,
        }
    }
}

impl core::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "white" => Ok(NoiseKind::White),
            "pink" => Ok(NoiseKind::Pink),
            _ => Err(Error::param("noise", "expected `white` or `pink`")),
        }
    }
}

/// One contamination: which noise, how loud, which realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub alpha: f64,
    pub target_snr_db: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn white(target_snr_db: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::White, alpha: 0.0, target_snr_db, seed }
    }

    pub fn pink(alpha: f64, target_snr_db: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::Pink, alpha, target_snr_db, seed }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::White if self.alpha != 0.0 => {
                Err(Error::param("alpha", "white noise has alpha = 0"))
            }
            NoiseKind::Pink if !(self.alpha > 0.0 && self.alpha < 2.0) => {
                Err(Error::param("alpha", "pink noise needs 0 < alpha < 2"))
            }
            _ if !self.target_snr_db.is_finite() => {
                Err(Error::param("target_snr_db", "must be finite"))
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self, len: usize) -> Result<Vec<f64>> {
        self.validate()?;
        match self.kind {
            NoiseKind::White => gen_white(len, self.seed),
            NoiseKind::Pink => gen_pink(len, self.alpha, self.seed),
        }
    }

    /// Generates this noise for `clean` and mixes it in at the target SNR.
    pub fn contaminate(&self, clean: &Signal) -> Result<(Signal, Vec<f64>)> {
        let noise = self.generate(clean.len())?;
        mix_at_snr(clean, &noise, self.target_snr_db)
    }
}

/// I.i.d. standard Gaussian samples.
pub fn gen_white(len: usize, seed: u64) -> Result<Vec<f64>> {
    if len < 2 {
        return Err(Error::TooShort { min: 2, actual: len });
    }
    let mut rng = SeededRng::new(seed);
    Ok((0..len).map(|_| rng.gaussian()).collect())
}

/// Noise with power spectral density ∝ 1/f^alpha, standardized to zero mean
/// and unit variance.
///
/// A white Gaussian spectrum on the next power-of-two grid is scaled by
/// `k^(-alpha/2)` per bin (DC zeroed), transformed back and truncated to `len`.
pub fn gen_pink(len: usize, alpha: f64, seed: u64) -> Result<Vec<f64>> {
    if len < 2 {
        return Err(Error::TooShort { min: 2, actual: len });
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::param("alpha", "pink noise needs 0 < alpha < 2"));
    }
    let grid = fft::next_pow2(len);
    let mut rng = SeededRng::new(seed);
    let mut spectrum = alloc::vec![Complex64::new(0.0, 0.0); grid];
    let nyquist = grid / 2;
    for k in 1..=nyquist {
        let gain = libm::pow(k as f64, -alpha / 2.0);
        let re = rng.gaussian() * gain;
        let im = rng.gaussian() * gain;
        if k == nyquist {
            spectrum[k] = Complex64::new(re * core::f64::consts::SQRT_2, 0.0);
        } else {
            spectrum[k] = Complex64::new(re, im);
            spectrum[grid - k] = Complex64::new(re, -im);
        }
    }
    fft::inverse(&mut spectrum);
    let mut out: Vec<f64> = spectrum[..len].iter().map(|c| c.re).collect();
    standardize(&mut out);
    Ok(out)
}

fn standardize(x: &mut [f64]) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let inv_std = if var > 0.0 { 1.0 / libm::sqrt(var) } else { 0.0 };
    for v in x.iter_mut() {
        *v = (*v - mean) * inv_std;
    }
}

/// Returns `(clean + k·noise, k·noise)` with `k` chosen so that
/// `10·log10(Σclean² / Σ(k·noise)²)` equals `target_snr_db`.
pub fn mix_at_snr(clean: &Signal, noise: &[f64], target_snr_db: f64) -> Result<(Signal, Vec<f64>)> {
    if noise.len() != clean.len() {
        return Err(Error::LengthMismatch { expected: clean.len(), actual: noise.len() });
    }
    if !target_snr_db.is_finite() {
        return Err(Error::param("target_snr_db", "must be finite"));
    }
    let clean_energy = clean.energy();
    let noise_energy: f64 = noise.iter().map(|v| v * v).sum();
    if clean_energy == 0.0 {
        return Err(Error::Degenerate("clean signal has zero energy"));
    }
    if noise_energy == 0.0 {
        return Err(Error::Degenerate("noise has zero energy"));
    }
    let k = libm::sqrt(clean_energy / (noise_energy * libm::pow(10.0, target_snr_db / 10.0)));
    let scaled: Vec<f64> = noise.iter().map(|v| v * k).collect();
    let noisy = clean.samples().iter().zip(&scaled).map(|(c, n)| c + n).collect();
    Ok((clean.with_samples(noisy)?, scaled))
}
