//! IMF thresholding with universal thresholds.
//!
//! The noise level is read off the first IMF with a median-absolute estimate,
//! extrapolated to deeper IMFs with a fixed geometric energy decay, and turned
//! into one threshold per IMF. Each IMF is then shrunk sample by sample and
//! the signal is rebuilt as Σ thresholded IMFs + residue.

use alloc::vec::Vec;

use crate::emd::{decompose, ImfStack, SiftConfig};
use crate::{Error, Result, Signal};

/// Default constant in the universal threshold.
pub const DEFAULT_C_CONST: f64 = 0.7;
/// Median of |N(0, 1)|.
pub const MAD_SCALE: f64 = 0.6745;
const ENERGY_NORM: f64 = 0.719;
const ENERGY_DECAY: f64 = 2.01;

/// Shape of the custom rule: `alpha` sets how much of τ is subtracted above
/// the threshold, `gamma_ratio` places the dead zone edge γ = gamma_ratio·τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CustomParams {
    pub alpha: f64,
    pub gamma_ratio: f64,
}

impl Default for CustomParams {
    fn default() -> Self {
        Self { alpha: 0.5, gamma_ratio: 0.5 }
    }
}

impl CustomParams {
    pub fn new(alpha: f64, gamma_ratio: f64) -> Result<Self> {
        let p = Self { alpha, gamma_ratio };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::param("alpha", "must lie in [0, 1]"));
        }
        if !(self.gamma_ratio > 0.0 && self.gamma_ratio < 1.0) {
            return Err(Error::param("gamma_ratio", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    Hard,
    Soft,
    Custom(CustomParams),
}

impl ThresholdRule {
    pub fn apply(&self, c: &[f64], tau: f64) -> Vec<f64> {
        match self {
            ThresholdRule::Hard => threshold_hard(c, tau),
            ThresholdRule::Soft => threshold_soft(c, tau),
            ThresholdRule::Custom(p) => threshold_custom(c, tau, p),
        }
    }
}

/// Per-IMF thresholds and the quantities they were derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPlan {
    pub taus: Vec<f64>,
    pub c_const: f64,
    pub energies: Vec<f64>,
    pub e1_sq: f64,
}

impl ThresholdPlan {
    /// Plans thresholds for every IMF of `stack`. An empty stack gets an empty
    /// plan.
    pub fn for_stack(stack: &ImfStack, c_const: f64) -> Result<Self> {
        let n = stack.source_length;
        let e1_sq = match stack.imfs.first() {
            Some(imf1) => estimate_e1(imf1)?,
            None => 0.0,
        };
        let energies = model_energies(e1_sq, stack.len())?;
        let taus = universal_thresholds(&energies, n, c_const)?;
        Ok(Self { taus, c_const, energies, e1_sq })
    }
}

/// `(median |imf1| / 0.6745)²`.
pub fn estimate_e1(imf1: &[f64]) -> Result<f64> {
    if imf1.is_empty() {
        return Err(Error::EmptySignal);
    }
    let mut mags: Vec<f64> = imf1.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(f64::total_cmp);
    let mid = mags.len() / 2;
    let median = if mags.len() % 2 == 1 { mags[mid] } else { 0.5 * (mags[mid - 1] + mags[mid]) };
    let sigma = median / MAD_SCALE;
    Ok(sigma * sigma)
}

/// Model energy per IMF: `Ê₁ = e1_sq`, `Ê_i = (e1_sq / 0.719)·2.01^(−i)` for
/// `i ≥ 2` (1-based).
pub fn model_energies(e1_sq: f64, n_imfs: usize) -> Result<Vec<f64>> {
    if !(e1_sq >= 0.0) {
        return Err(Error::param("e1_sq", "must be non-negative"));
    }
    Ok((1..=n_imfs)
        .map(|i| if i == 1 { e1_sq } else { e1_sq / ENERGY_NORM * libm::pow(ENERGY_DECAY, -(i as f64)) })
        .collect())
}

/// `τ_i = c_const·√(Ê_i·2·ln n)`.
pub fn universal_thresholds(energies: &[f64], n: usize, c_const: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::TooShort { min: 2, actual: n });
    }
    universal_thresholds_real(energies, n as f64, c_const)
}

/// [`universal_thresholds`] with a real-valued length.
pub fn universal_thresholds_real(energies: &[f64], n: f64, c_const: f64) -> Result<Vec<f64>> {
    if !(n >= 2.0) {
        return Err(Error::param("n", "signal length must be at least 2"));
    }
    if !(c_const >= 0.0) {
        return Err(Error::param("c_const", "must be non-negative"));
    }
    let log_term = 2.0 * libm::log(n);
    Ok(energies.iter().map(|&e| c_const * libm::sqrt(e * log_term)).collect())
}

/// Keep samples with `|c| > τ`, zero the rest.
pub fn threshold_hard(c: &[f64], tau: f64) -> Vec<f64> {
    c.iter().map(|&v| if v.abs() > tau { v } else { 0.0 }).collect()
}

/// Shrink toward zero by τ; samples inside (−τ, τ) become zero.
pub fn threshold_soft(c: &[f64], tau: f64) -> Vec<f64> {
    c.iter()
        .map(|&v| {
            if v >= tau {
                v - tau
            } else if v <= -tau {
                v + tau
            } else {
                0.0
            }
        })
        .collect()
}

/// Continuous hybrid of hard and soft thresholding.
///
/// * `|c| ≥ τ`: `c − sgn(c)·(1 − α)·τ`
/// * `|c| ≤ γ`: 0
/// * in between: a linear ramp from 0 at γ to `sgn(c)·α·τ` at τ, which joins
///   the outer branch continuously.
pub fn threshold_custom(c: &[f64], tau: f64, params: &CustomParams) -> Vec<f64> {
    let gamma = params.gamma_ratio * tau;
    let shrink = (1.0 - params.alpha) * tau;
    let edge = params.alpha * tau;
    c.iter()
        .map(|&v| {
            let mag = v.abs();
            if mag >= tau {
                v - libm::copysign(shrink, v)
            } else if mag <= gamma {
                0.0
            } else {
                libm::copysign(edge * (mag - gamma) / (tau - gamma), v)
            }
        })
        .collect()
}

/// Thresholds every IMF of an existing decomposition and rebuilds the signal.
pub fn denoise_stack(stack: &ImfStack, rule: &ThresholdRule, c_const: f64) -> Result<(Vec<f64>, ThresholdPlan)> {
    let plan = ThresholdPlan::for_stack(stack, c_const)?;
    let mut out = stack.residue.clone();
    for (imf, &tau) in stack.imfs.iter().zip(&plan.taus) {
        for (o, v) in out.iter_mut().zip(rule.apply(imf, tau)) {
            *o += v;
        }
    }
    Ok((out, plan))
}

/// Decompose, threshold each IMF with `rule`, reconstruct.
pub fn denoise_emd(noisy: &Signal, cfg: &SiftConfig, rule: &ThresholdRule, c_const: f64) -> Result<Signal> {
    if let ThresholdRule::Custom(p) = rule {
        p.validate()?;
    }
    let stack = decompose(noisy, cfg)?;
    let (out, _) = denoise_stack(&stack, rule, c_const)?;
    noisy.with_samples(out)
}

pub fn denoise_emd_custom(noisy: &Signal, cfg: &SiftConfig, params: &CustomParams, c_const: f64) -> Result<Signal> {
    denoise_emd(noisy, cfg, &ThresholdRule::Custom(*params), c_const)
}
