//! EMD-ANN denoising: decompose, map each 13-channel sample through the
//! network, undo the normalization.

use alloc::vec::Vec;

use crate::emd::{decompose, to_fixed_13, Imf13, SiftConfig};
use crate::mlp::{MlpModel, Workspace};
use crate::signal::normalize;
use crate::{Error, Result, Signal};

/// Network output for every row of `fixed`, still in the normalized domain.
pub fn apply_model(model: &MlpModel, fixed: &Imf13) -> Result<Vec<f64>> {
    if model.layers()[0].inputs != fixed.channels.len() {
        return Err(Error::LengthMismatch { expected: model.layers()[0].inputs, actual: fixed.channels.len() });
    }
    let mut ws = Workspace::new(model);
    Ok(fixed.rows().map(|r| model.forward_with(&r, &mut ws)).collect())
}

/// Denoised samples in the normalized domain together with the affine that
/// produced it.
pub fn denoise_ann_normalized(noisy: &Signal, model: &MlpModel, cfg: &SiftConfig) -> Result<(Vec<f64>, Imf13)> {
    let (norm, affine) = normalize(noisy)?;
    let stack = decompose(&norm, cfg)?;
    let fixed = to_fixed_13(&stack, affine);
    Ok((apply_model(model, &fixed)?, fixed))
}

pub fn denoise_ann(noisy: &Signal, model: &MlpModel, cfg: &SiftConfig) -> Result<Signal> {
    let (out, fixed) = denoise_ann_normalized(noisy, model, cfg)?;
    noisy.with_samples(fixed.affine.invert(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::{build_mlp, Structure};
    use crate::synth::{synth_breath_cycle, BreathSpec};
    use alloc::vec;

    fn noisy() -> Signal {
        let spec = BreathSpec { cycle_seconds: 0.5, seed: 8, ..BreathSpec::default() };
        let clean = synth_breath_cycle(&spec, 4000).unwrap();
        crate::noise::NoiseSpec::white(5.0, 1).contaminate(&clean).unwrap().0
    }

    #[test]
    fn constant_model_denormalizes_bias() {
        let x = noisy();
        let mut m = build_mlp(&Structure::Ann(1), 0).unwrap();
        let mut p = vec![0.0; m.num_params()];
        *p.last_mut().unwrap() = 0.25;
        m.set_params(&p).unwrap();
        let y = denoise_ann(&x, &m, &SiftConfig::default()).unwrap();
        assert_eq!(y.len(), x.len());
        let (_, affine) = normalize(&x).unwrap();
        let expected = affine.inverse(0.25);
        assert!(y.samples().iter().all(|v| (v - expected).abs() < 1e-12));
    }

    #[test]
    fn channel_count_checked() {
        let m = build_mlp(&Structure::Ann(1), 0).unwrap();
        let x = noisy();
        let (norm, affine) = normalize(&x).unwrap();
        let mut fixed = to_fixed_13(&decompose(&norm, &SiftConfig::default()).unwrap(), affine);
        fixed.channels.pop();
        assert!(apply_model(&m, &fixed).is_err());
    }
}
