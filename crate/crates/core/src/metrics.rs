//! Output SNR and Fit scores.

use crate::{Error, Result};

/// `10·log10(Σ desired² / Σ (candidate − desired)²)` in dB.
///
/// A candidate identical to the desired signal scores `f64::INFINITY`.
pub fn snr_db(desired: &[f64], candidate: &[f64]) -> Result<f64> {
    check_lengths(desired, candidate)?;
    let signal: f64 = desired.iter().map(|v| v * v).sum();
    if signal == 0.0 {
        return Err(Error::Degenerate("desired signal has zero energy"));
    }
    let error = squared_error(desired, candidate);
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * libm::log10(signal / error))
}

/// Percent of desired-signal variance left unexplained by the error,
/// `100·(1 − Σ(y − x)² / Σ(x − mean x)²)`. 100 means a perfect copy; there is
/// no lower bound.
pub fn fit_pct(desired: &[f64], candidate: &[f64]) -> Result<f64> {
    check_lengths(desired, candidate)?;
    let n = desired.len() as f64;
    let mean = desired.iter().sum::<f64>() / n;
    let spread: f64 = desired.iter().map(|v| (v - mean) * (v - mean)).sum();
    if spread == 0.0 {
        return Err(Error::Degenerate("desired signal is constant"));
    }
    Ok(100.0 * (1.0 - squared_error(desired, candidate) / spread))
}

fn squared_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum()
}

fn check_lengths(desired: &[f64], candidate: &[f64]) -> Result<()> {
    if desired.is_empty() {
        return Err(Error::EmptySignal);
    }
    if desired.len() != candidate.len() {
        return Err(Error::LengthMismatch { expected: desired.len(), actual: candidate.len() });
    }
    Ok(())
}
