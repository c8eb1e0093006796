//! TOML run configuration.
//!
//! Every key is optional; a missing key takes the default shown below.
//! Command-line flags override the file.
//!
//! ```toml
//! seed = 1
//! input = "noisy.wav"          # command input (WAV, model or directory)
//! output = "out"               # command output path
//! model = "model.json"         # model file for `denoise --method ann` and `eval`
//! reference = "clean.wav"      # clean reference for `eval` on WAV files
//!
//! [sift]
//! sd_threshold = 0.2
//! max_sift_iters = 100
//! max_imfs = 15
//!
//! [noise]
//! kind = "white"               # white | pink
//! snr_db = 10.0
//! alpha = 1.0                  # pink spectral exponent, 0 < alpha < 2
//! trial = 0                    # noise realization index
//!
//! [train]
//! structure = "ann5"           # ann1..ann9 or explicit sizes such as "13-25-20-1"
//! epochs = 200
//! optimizer = "lm"             # lm | gd
//! gd_step = 0.01
//! lm_lambda0 = 1e-3
//! lm_lambda_up = 10.0
//! lm_lambda_down = 0.1
//! lm_lambda_max = 1e10
//! lm_lambda_min = 1e-12
//! block_rows = 2048
//! noise_kinds = ["white"]
//! snr_set = [0.0, 5.0, 10.0, 15.0, 20.0]
//!
//! [denoise]
//! method = "ann"               # ann | custom | hard | soft
//!
//! [custom]
//! alpha = 0.5
//! gamma_ratio = 0.5
//! c_const = 0.7
//!
//! [breath]
//! cycle_seconds = 5.0
//! inhale_fraction = 0.4
//! band_low = 100.0
//! band_high = 800.0
//! exhale_gain = 0.4
//!
//! [corpus]
//! cycles = 16
//! train_cycles = 12
//! synth_rate = 8000
//!
//! [bench]
//! experiments = ["table3", "table4", "sweep"]
//! table_snrs = [0.0, 5.0, 10.0, 15.0, 20.0]
//! trials = 3
//!
//! [sweep]
//! snr_min = -2.0
//! snr_max = 20.0
//! step = 1.0
//! trials = 3
//! models = ["white:white", "pink:pink", "white-pink:white", "white-pink:pink"]
//!
//! [spectrogram]
//! window = 256
//! hop = 128
//! ```
//!
//! `noise.alpha` is also the pink exponent used by training and the bench.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use emdenoise_core::emd::SiftConfig;
use emdenoise_core::mlp::Structure;
use emdenoise_core::noise::{NoiseKind, NoiseSpec, DEFAULT_PINK_ALPHA};
use emdenoise_core::rng::{db_label, derive_seed};
use emdenoise_core::synth::BreathSpec;
use emdenoise_core::threshold::{CustomParams, ThresholdRule, DEFAULT_C_CONST};
use emdenoise_core::train::{Optimizer, TrainSpec};
use serde::{Deserialize, Serialize};

use crate::bench::{BenchConfig, CorpusSpec, Experiment, SweepSpec};
use crate::fsio::read_string;
use crate::spectrogram::{DEFAULT_HOP, DEFAULT_WINDOW};
use crate::{Error, Result};

const NOISE_STREAM: u64 = 0x6e6f_6973;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub sift: SiftSection,
    pub noise: NoiseSection,
    pub train: TrainSection,
    pub denoise: DenoiseSection,
    pub custom: CustomSection,
    pub breath: BreathSection,
    pub corpus: CorpusSection,
    pub bench: BenchSection,
    pub sweep: SweepSection,
    pub spectrogram: SpectrogramSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            input: None,
            output: None,
            model: None,
            reference: None,
            sift: SiftSection::default(),
            noise: NoiseSection::default(),
            train: TrainSection::default(),
            denoise: DenoiseSection::default(),
            custom: CustomSection::default(),
            breath: BreathSection::default(),
            corpus: CorpusSection::default(),
            bench: BenchSection::default(),
            sweep: SweepSection::default(),
            spectrogram: SpectrogramSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SiftSection {
    pub sd_threshold: f64,
    pub max_sift_iters: usize,
    pub max_imfs: usize,
}

impl Default for SiftSection {
    fn default() -> Self {
        let d = SiftConfig::default();
        Self { sd_threshold: d.sd_threshold, max_sift_iters: d.max_sift_iters, max_imfs: d.max_imfs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub kind: String,
    pub snr_db: f64,
    pub alpha: f64,
    pub trial: u64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self { kind: "white".into(), snr_db: 10.0, alpha: DEFAULT_PINK_ALPHA, trial: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub structure: String,
    pub epochs: usize,
    pub optimizer: String,
    pub gd_step: f64,
    pub lm_lambda0: f64,
    pub lm_lambda_up: f64,
    pub lm_lambda_down: f64,
    pub lm_lambda_max: f64,
    pub lm_lambda_min: f64,
    pub block_rows: usize,
    pub noise_kinds: Vec<String>,
    pub snr_set: Vec<f64>,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainSpec::default();
        Self {
            structure: "ann5".into(),
            epochs: d.epochs,
            optimizer: "lm".into(),
            gd_step: 0.01,
            lm_lambda0: d.lm_lambda0,
            lm_lambda_up: d.lm_lambda_up,
            lm_lambda_down: d.lm_lambda_down,
            lm_lambda_max: d.lm_lambda_max,
            lm_lambda_min: d.lm_lambda_min,
            block_rows: d.block_rows,
            noise_kinds: d.noise_kinds.iter().map(|k| k.as_str().to_string()).collect(),
            snr_set: d.snr_set,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenoiseSection {
    pub method: String,
}

impl Default for DenoiseSection {
    fn default() -> Self {
        Self { method: "ann".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CustomSection {
    pub alpha: f64,
    pub gamma_ratio: f64,
    pub c_const: f64,
}

impl Default for CustomSection {
    fn default() -> Self {
        let d = CustomParams::default();
        Self { alpha: d.alpha, gamma_ratio: d.gamma_ratio, c_const: DEFAULT_C_CONST }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BreathSection {
    pub cycle_seconds: f64,
    pub inhale_fraction: f64,
    pub band_low: f64,
    pub band_high: f64,
    pub exhale_gain: f64,
}

impl Default for BreathSection {
    fn default() -> Self {
        let d = BreathSpec::default();
        Self {
            cycle_seconds: d.cycle_seconds,
            inhale_fraction: d.inhale_fraction,
            band_low: d.band_low,
            band_high: d.band_high,
            exhale_gain: d.exhale_gain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub cycles: usize,
    pub train_cycles: usize,
    pub synth_rate: u32,
}

impl Default for CorpusSection {
    fn default() -> Self {
        let d = CorpusSpec::default();
        Self { cycles: d.cycles, train_cycles: d.train_cycles, synth_rate: d.synth_rate }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub experiments: Vec<String>,
    pub table_snrs: Vec<f64>,
    pub trials: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        let d = BenchConfig::default();
        Self {
            experiments: Experiment::ALL.iter().map(|e| e.as_str().to_string()).collect(),
            table_snrs: d.table_snrs,
            trials: d.trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub snr_min: f64,
    pub snr_max: f64,
    pub step: f64,
    pub trials: usize,
    /// `train-kinds:test-kind`, training kinds joined by `-`.
    pub models: Vec<String>,
}

impl Default for SweepSection {
    fn default() -> Self {
        let d = SweepSpec::default();
        Self {
            snr_min: d.snr_min,
            snr_max: d.snr_max,
            step: d.step,
            trials: d.trials,
            models: d
                .models
                .iter()
                .map(|(train, test)| format!("{}:{}", crate::bench::kinds_label(train), test.as_str()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrogramSection {
    pub window: usize,
    pub hop: usize,
}

impl Default for SpectrogramSection {
    fn default() -> Self {
        Self { window: DEFAULT_WINDOW, hop: DEFAULT_HOP }
    }
}

/// Denoising back end selected by `--method`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenoiseMethod {
    Ann,
    Custom,
    Hard,
    Soft,
}

impl FromStr for DenoiseMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ann" => Ok(Self::Ann),
            "custom" => Ok(Self::Custom),
            "hard" => Ok(Self::Hard),
            "soft" => Ok(Self::Soft),
            _ => Err(Error::Config(format!("unknown method {s:?}; expected ann, custom, hard or soft"))),
        }
    }
}

fn kind(s: &str) -> Result<NoiseKind> {
    s.parse().map_err(|_| Error::Config(format!("unknown noise kind {s:?}; expected white or pink")))
}

fn kinds(list: &[String]) -> Result<Vec<NoiseKind>> {
    list.iter().map(|s| kind(s)).collect()
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn sift(&self) -> Result<SiftConfig> {
        let s = SiftConfig {
            sd_threshold: self.sift.sd_threshold,
            max_sift_iters: self.sift.max_sift_iters,
            max_imfs: self.sift.max_imfs,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn noise_kind(&self) -> Result<NoiseKind> {
        kind(&self.noise.kind)
    }

    /// Noise for the `noise` command; the realization is fixed by seed and
    /// `noise.trial`.
    pub fn noise_spec(&self) -> Result<NoiseSpec> {
        let k = self.noise_kind()?;
        let seed = derive_seed(self.seed, &[NOISE_STREAM, k.label(), db_label(self.noise.snr_db), self.noise.trial]);
        let spec = match k {
            NoiseKind::White => NoiseSpec::white(self.noise.snr_db, seed),
            NoiseKind::Pink => NoiseSpec::pink(self.noise.alpha, self.noise.snr_db, seed),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn structure(&self) -> Result<Structure> {
        self.train.structure.parse().map_err(|e: emdenoise_core::Error| Error::Config(e.to_string()))
    }

    pub fn train_spec(&self) -> Result<TrainSpec> {
        let t = &self.train;
        let optimizer = match t.optimizer.as_str() {
            "lm" => Optimizer::LevenbergMarquardt,
            "gd" => Optimizer::GradientDescent { step: t.gd_step },
            o => return Err(Error::Config(format!("unknown optimizer {o:?}; expected lm or gd"))),
        };
        let spec = TrainSpec {
            structure: self.structure()?,
            epochs: t.epochs,
            lm_lambda0: t.lm_lambda0,
            lm_lambda_up: t.lm_lambda_up,
            lm_lambda_down: t.lm_lambda_down,
            lm_lambda_max: t.lm_lambda_max,
            lm_lambda_min: t.lm_lambda_min,
            block_rows: t.block_rows,
            optimizer,
            snr_set: t.snr_set.clone(),
            noise_kinds: kinds(&t.noise_kinds)?,
            pink_alpha: self.noise.alpha,
            seed: self.seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn method(&self) -> Result<DenoiseMethod> {
        self.denoise.method.parse()
    }

    pub fn custom_params(&self) -> Result<CustomParams> {
        Ok(CustomParams::new(self.custom.alpha, self.custom.gamma_ratio)?)
    }

    pub fn threshold_rule(&self, method: DenoiseMethod) -> Result<Option<ThresholdRule>> {
        Ok(match method {
            DenoiseMethod::Ann => None,
            DenoiseMethod::Custom => Some(ThresholdRule::Custom(self.custom_params()?)),
            DenoiseMethod::Hard => Some(ThresholdRule::Hard),
            DenoiseMethod::Soft => Some(ThresholdRule::Soft),
        })
    }

    pub fn breath(&self) -> BreathSpec {
        let b = &self.breath;
        BreathSpec {
            cycle_seconds: b.cycle_seconds,
            inhale_fraction: b.inhale_fraction,
            band_low: b.band_low,
            band_high: b.band_high,
            exhale_gain: b.exhale_gain,
            seed: 0,
        }
    }

    pub fn corpus(&self) -> Result<CorpusSpec> {
        let breath = self.breath();
        breath.validate()?;
        let c = &self.corpus;
        Ok(CorpusSpec { cycles: c.cycles, train_cycles: c.train_cycles, synth_rate: c.synth_rate, breath })
    }

    pub fn sweep(&self) -> Result<SweepSpec> {
        let s = &self.sweep;
        let models = s
            .models
            .iter()
            .map(|m| {
                let (train, test) = m
                    .split_once(':')
                    .ok_or_else(|| Error::Config(format!("sweep model {m:?} must look like `white-pink:white`")))?;
                let train: Vec<String> = train.split('-').map(str::to_string).collect();
                Ok((kinds(&train)?, kind(test)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = SweepSpec { snr_min: s.snr_min, snr_max: s.snr_max, step: s.step, models, trials: s.trials };
        spec.validate()?;
        Ok(spec)
    }

    pub fn experiments(&self) -> Result<Vec<Experiment>> {
        self.bench
            .experiments
            .iter()
            .map(|e| Experiment::parse(e).ok_or_else(|| Error::Config(format!("unknown experiment {e:?}"))))
            .collect()
    }

    /// The bench configuration; `train` and `denoise` build their models and
    /// scores from the same values.
    pub fn bench_config(&self) -> Result<BenchConfig> {
        Ok(BenchConfig {
            seed: self.seed,
            corpus: self.corpus()?,
            sift: self.sift()?,
            train: self.train_spec()?,
            custom: self.custom_params()?,
            c_const: self.custom.c_const,
            pink_alpha: self.noise.alpha,
            table_snrs: self.bench.table_snrs.clone(),
            trials: self.bench.trials,
            sweep: self.sweep()?,
        })
    }
}
