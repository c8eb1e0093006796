//! Experiment runners on a synthetic breath corpus: individual vs combined
//! models, EMD-ANN vs EMD-Custom, and the input-SNR sweep.

use std::collections::BTreeMap;
use std::time::Instant;

use emdenoise_core::ann::apply_model;
use emdenoise_core::dataset::{make_dataset, Prepared};
use emdenoise_core::emd::SiftConfig;
use emdenoise_core::metrics::{fit_pct, snr_db};
use emdenoise_core::mlp::MlpModel;
use emdenoise_core::noise::{NoiseKind, NoiseSpec, DEFAULT_PINK_ALPHA};
use emdenoise_core::rng::{db_label, derive_seed};
use emdenoise_core::signal::resample_half;
use emdenoise_core::synth::{synth_breath_cycle, BreathSpec};
use emdenoise_core::threshold::{denoise_stack, CustomParams, ThresholdRule, DEFAULT_C_CONST};
use emdenoise_core::train::{fit, EpochRecord, TrainSpec};
use emdenoise_core::Signal;

use crate::report::{EvalReport, EvalRow, DOMAIN};
use crate::{Error, Result};

const CORPUS_STREAM: u64 = 0x636f_7270;
const EVAL_STREAM: u64 = 0x6576_616c;

/// Breath cycles are synthesized at `synth_rate` and halved to the working
/// rate, mirroring an 8 kHz recording downsampled to 4 kHz.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub cycles: usize,
    pub train_cycles: usize,
    pub synth_rate: u32,
    pub breath: BreathSpec,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self { cycles: 16, train_cycles: 12, synth_rate: 8000, breath: BreathSpec::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub train: Vec<Signal>,
    pub test: Vec<Signal>,
}

pub fn cycle_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, &[CORPUS_STREAM, index as u64])
}

/// One corpus cycle at the working rate.
pub fn corpus_cycle(spec: &CorpusSpec, seed: u64, index: usize) -> Result<Signal> {
    let breath = BreathSpec { seed: cycle_seed(seed, index), ..spec.breath.clone() };
    let raw = synth_breath_cycle(&breath, spec.synth_rate)?;
    Ok(resample_half(&raw)?)
}

pub fn make_corpus(spec: &CorpusSpec, seed: u64) -> Result<Corpus> {
    if spec.train_cycles == 0 || spec.train_cycles >= spec.cycles {
        return Err(Error::Config("corpus needs at least one training and one test cycle".into()));
    }
    let all = (0..spec.cycles).map(|i| corpus_cycle(spec, seed, i)).collect::<Result<Vec<_>>>()?;
    let test = all[spec.train_cycles..].to_vec();
    let mut train = all;
    train.truncate(spec.train_cycles);
    Ok(Corpus { train, test })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub snr_min: f64,
    pub snr_max: f64,
    pub step: f64,
    /// (training noise kinds, test noise kind) pairs.
    pub models: Vec<(Vec<NoiseKind>, NoiseKind)>,
    pub trials: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        use NoiseKind::{Pink, White};
        Self {
            snr_min: -2.0,
            snr_max: 20.0,
            step: 1.0,
            models: vec![(vec![White], White), (vec![Pink], Pink), (vec![White, Pink], White), (vec![White, Pink], Pink)],
            trials: 3,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.snr_min <= self.snr_max) {
            return Err(Error::Config("sweep snr_min must not exceed snr_max".into()));
        }
        if !(self.step > 0.0) {
            return Err(Error::Config("sweep step must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("sweep trials must be at least 1".into()));
        }
        if self.models.iter().any(|(k, _)| k.is_empty()) {
            return Err(Error::Config("every sweep model needs a training noise kind".into()));
        }
        Ok(())
    }

    pub fn snrs(&self) -> Vec<f64> {
        let n = ((self.snr_max - self.snr_min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.snr_min + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub seed: u64,
    pub corpus: CorpusSpec,
    pub sift: SiftConfig,
    /// Training template; `snr_set`, `noise_kinds` and `seed` are set per model.
    pub train: TrainSpec,
    pub custom: CustomParams,
    pub c_const: f64,
    pub pink_alpha: f64,
    pub table_snrs: Vec<f64>,
    pub trials: usize,
    pub sweep: SweepSpec,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            corpus: CorpusSpec::default(),
            sift: SiftConfig::default(),
            train: TrainSpec::default(),
            custom: CustomParams::default(),
            c_const: DEFAULT_C_CONST,
            pink_alpha: DEFAULT_PINK_ALPHA,
            table_snrs: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            trials: 3,
            sweep: SweepSpec::default(),
        }
    }
}

impl BenchConfig {
    /// Training spec for a model over `kinds` and `snrs`.
    pub fn train_spec(&self, kinds: &[NoiseKind], snrs: &[f64]) -> TrainSpec {
        TrainSpec {
            snr_set: snrs.to_vec(),
            noise_kinds: kinds.to_vec(),
            pink_alpha: self.pink_alpha,
            seed: self.seed,
            ..self.train.clone()
        }
    }

    /// Noise used for trial `trial` of test cycle `cycle`.
    pub fn eval_noise(&self, cycle: usize, kind: NoiseKind, snr: f64, trial: usize) -> NoiseSpec {
        let seed = derive_seed(self.seed, &[EVAL_STREAM, cycle as u64, kind.label(), db_label(snr), trial as u64]);
        match kind {
            NoiseKind::White => NoiseSpec::white(snr, seed),
            NoiseKind::Pink => NoiseSpec::pink(self.pink_alpha, snr, seed),
        }
    }
}

/// A denoiser scored on prepared examples.
#[derive(Debug, Clone)]
pub enum Method {
    Ann(MlpModel),
    Threshold(ThresholdRule),
}

impl Method {
    /// Denoised output in the normalized domain.
    pub fn apply(&self, p: &Prepared, c_const: f64) -> Result<Vec<f64>> {
        Ok(match self {
            Method::Ann(m) => apply_model(m, &p.fixed())?,
            Method::Threshold(rule) => denoise_stack(&p.stack, rule, c_const)?.0,
        })
    }
}

/// Scores averaged over test cycles and trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellScore {
    pub in_snr: f64,
    pub out_snr: f64,
    pub fit_pct: f64,
}

/// Scores every method on the same contaminated test signals, decomposing
/// each signal once.
pub fn eval_cell(
    cfg: &BenchConfig,
    test: &[Signal],
    kind: NoiseKind,
    snr: f64,
    trials: usize,
    methods: &[&Method],
) -> Result<Vec<CellScore>> {
    let mut in_sum = 0.0;
    let mut sums = vec![(0.0, 0.0); methods.len()];
    for (c, clean) in test.iter().enumerate() {
        for t in 0..trials {
            let p = Prepared::new(clean, &cfg.eval_noise(c, kind, snr, t), &cfg.sift)?;
            in_sum += snr_db(&p.clean, p.noisy.samples())?;
            for (m, s) in methods.iter().zip(sums.iter_mut()) {
                let out = m.apply(&p, cfg.c_const)?;
                s.0 += snr_db(&p.clean, &out)?;
                s.1 += fit_pct(&p.clean, &out)?;
            }
        }
    }
    let n = (test.len() * trials) as f64;
    Ok(sums
        .into_iter()
        .map(|(o, f)| CellScore { in_snr: in_sum / n, out_snr: o / n, fit_pct: f / n })
        .collect())
}

pub fn kinds_label(kinds: &[NoiseKind]) -> String {
    kinds.iter().map(|k| k.as_str()).collect::<Vec<_>>().join("-")
}

pub fn snrs_label(snrs: &[f64]) -> String {
    snrs.iter().map(|s| format!("{s}")).collect::<Vec<_>>().join(";")
}

/// Trains one model the way every runner does.
pub fn train_model(
    cfg: &BenchConfig,
    train: &[Signal],
    kinds: &[NoiseKind],
    snrs: &[f64],
) -> Result<(MlpModel, Vec<EpochRecord>)> {
    let spec = cfg.train_spec(kinds, snrs);
    let start = Instant::now();
    let data = make_dataset(train, &spec, &cfg.sift)?;
    for s in &data.skipped {
        log::warn!("skipped training cycle {} ({} noise, {} dB): {}", s.cycle, s.kind, s.snr_db, s.error);
    }
    log::info!("dataset {} @ [{}]: {} rows in {:.1?}", kinds_label(kinds), snrs_label(snrs), data.len(), start.elapsed());
    let start = Instant::now();
    let (model, history) = fit(&data, &spec)?;
    if let Some(last) = history.last() {
        log::info!("trained {} epochs in {:.1?}, final block loss {:.3e}", history.len(), start.elapsed(), last.loss_after);
    }
    Ok((model, history))
}

type CellKey = (String, NoiseKind, u64, usize);

/// Runs the experiments, training each distinct model once and scoring each
/// (method, noise, SNR) cell once.
pub struct Bench {
    pub cfg: BenchConfig,
    pub corpus: Corpus,
    models: BTreeMap<String, MlpModel>,
    cells: BTreeMap<CellKey, CellScore>,
}

impl Bench {
    pub fn new(cfg: BenchConfig) -> Result<Self> {
        cfg.train.validate()?;
        cfg.sweep.validate()?;
        cfg.custom.validate()?;
        if cfg.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if cfg.table_snrs.is_empty() {
            return Err(Error::Config("table_snrs must not be empty".into()));
        }
        let corpus = make_corpus(&cfg.corpus, cfg.seed)?;
        Ok(Self { cfg, corpus, models: BTreeMap::new(), cells: BTreeMap::new() })
    }

    fn model_key(kinds: &[NoiseKind], snrs: &[f64]) -> String {
        format!("ann:{}:{}", kinds_label(kinds), snrs_label(snrs))
    }

    pub fn model(&mut self, kinds: &[NoiseKind], snrs: &[f64]) -> Result<MlpModel> {
        let key = Self::model_key(kinds, snrs);
        if let Some(m) = self.models.get(&key) {
            return Ok(m.clone());
        }
        let (m, _) = train_model(&self.cfg, &self.corpus.train, kinds, snrs)?;
        self.models.insert(key, m.clone());
        Ok(m)
    }

    /// Scores `methods` (keyed for caching) at one (noise, SNR) cell.
    fn cells(&mut self, kind: NoiseKind, snr: f64, trials: usize, methods: &[(String, Method)]) -> Result<Vec<CellScore>> {
        let key = |name: &str| (name.to_string(), kind, db_label(snr), trials);
        let missing: Vec<&(String, Method)> =
            methods.iter().filter(|(name, _)| !self.cells.contains_key(&key(name))).collect();
        if !missing.is_empty() {
            let ms: Vec<&Method> = missing.iter().map(|(_, m)| m).collect();
            let scores = eval_cell(&self.cfg, &self.corpus.test, kind, snr, trials, &ms)?;
            for ((name, _), s) in missing.iter().zip(scores) {
                self.cells.insert(key(name), s);
            }
        }
        Ok(methods.iter().map(|(name, _)| self.cells[&key(name)]).collect())
    }

    fn row(&self, experiment: &str, method: &str, train: (&str, &str), kind: NoiseKind, snr: f64, trials: usize, s: CellScore) -> EvalRow {
        let (reference_out_snr, reference_fit_pct) = reference(experiment, method, kind, snr);
        EvalRow {
            experiment: experiment.into(),
            method: method.into(),
            train_noise: train.0.into(),
            test_noise: kind.as_str().into(),
            train_snrs: train.1.into(),
            test_snr: snr,
            in_snr: s.in_snr,
            out_snr: s.out_snr,
            gain: s.out_snr - s.in_snr,
            fit_pct: s.fit_pct,
            seed: self.cfg.seed,
            cycles: self.corpus.test.len(),
            trials,
            domain: DOMAIN.into(),
            reference_out_snr,
            reference_fit_pct,
        }
    }

    /// Individual models (one per SNR) against the combined model.
    pub fn run_table3(&mut self) -> Result<EvalReport> {
        let snrs = self.cfg.table_snrs.clone();
        let trials = self.cfg.trials;
        let all = snrs_label(&snrs);
        let mut rows = Vec::new();
        for kind in NoiseKind::ALL {
            let com = self.model(&[kind], &snrs)?;
            for &snr in &snrs {
                let ind = self.model(&[kind], &[snr])?;
                let methods = [
                    (Self::model_key(&[kind], &[snr]), Method::Ann(ind)),
                    (Self::model_key(&[kind], &snrs), Method::Ann(com.clone())),
                ];
                let s = self.cells(kind, snr, trials, &methods)?;
                rows.push(self.row("table3", "IND-M", (kind.as_str(), &snrs_label(&[snr])), kind, snr, trials, s[0]));
                rows.push(self.row("table3", "COM-M", (kind.as_str(), &all), kind, snr, trials, s[1]));
            }
        }
        Ok(EvalReport::new(rows))
    }

    /// Combined EMD-ANN against EMD-Custom thresholding.
    pub fn run_table4(&mut self) -> Result<EvalReport> {
        let snrs = self.cfg.table_snrs.clone();
        let trials = self.cfg.trials;
        let all = snrs_label(&snrs);
        let mut rows = Vec::new();
        for kind in NoiseKind::ALL {
            let com = self.model(&[kind], &snrs)?;
            for &snr in &snrs {
                let methods = [
                    (Self::model_key(&[kind], &snrs), Method::Ann(com.clone())),
                    ("custom".to_string(), Method::Threshold(ThresholdRule::Custom(self.cfg.custom))),
                ];
                let s = self.cells(kind, snr, trials, &methods)?;
                rows.push(self.row("table4", "EMD-ANN", (kind.as_str(), &all), kind, snr, trials, s[0]));
                rows.push(self.row("table4", "EMD-Custom", ("none", ""), kind, snr, trials, s[1]));
            }
        }
        Ok(EvalReport::new(rows))
    }

    /// Combined models scored over the sweep's SNR grid. Models tested on
    /// the same noise kind share each decomposition.
    pub fn run_sweep(&mut self) -> Result<EvalReport> {
        let snrs = self.cfg.table_snrs.clone();
        let all = snrs_label(&snrs);
        let sweep = self.cfg.sweep.clone();
        let mut by_kind: Vec<(NoiseKind, Vec<(Vec<NoiseKind>, (String, Method))>)> = Vec::new();
        for (kinds, test_kind) in &sweep.models {
            let entry = (kinds.clone(), (Self::model_key(kinds, &snrs), Method::Ann(self.model(kinds, &snrs)?)));
            match by_kind.iter_mut().find(|(k, _)| k == test_kind) {
                Some((_, v)) => v.push(entry),
                None => by_kind.push((*test_kind, vec![entry])),
            }
        }
        let mut rows = Vec::new();
        for snr in sweep.snrs() {
            for (test_kind, models) in &by_kind {
                let methods: Vec<(String, Method)> = models.iter().map(|(_, m)| m.clone()).collect();
                let scores = self.cells(*test_kind, snr, sweep.trials, &methods)?;
                for ((kinds, _), s) in models.iter().zip(scores) {
                    rows.push(self.row("sweep", "EMD-ANN", (&kinds_label(kinds), &all), *test_kind, snr, sweep.trials, s));
                }
            }
        }
        Ok(EvalReport::new(rows))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Table3,
    Table4,
    Sweep,
}

impl Experiment {
    pub const ALL: [Experiment; 3] = [Experiment::Table3, Experiment::Table4, Experiment::Sweep];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Table3 => "table3",
            Experiment::Table4 => "table4",
            Experiment::Sweep => "sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.as_str() == s)
    }
}

/// Runs the requested experiments in a fixed order, sharing models and cells.
pub fn run_bench(cfg: BenchConfig, experiments: &[Experiment]) -> Result<Vec<(Experiment, EvalReport)>> {
    let mut bench = Bench::new(cfg)?;
    let mut out = Vec::new();
    for e in Experiment::ALL {
        if !experiments.contains(&e) {
            continue;
        }
        let start = Instant::now();
        let report = match e {
            Experiment::Table3 => bench.run_table3()?,
            Experiment::Table4 => bench.run_table4()?,
            Experiment::Sweep => bench.run_sweep()?,
        };
        log::info!("{} done in {:.1?}", e.as_str(), start.elapsed());
        out.push((e, report));
    }
    Ok(out)
}

/// Published SNR/Fit for a table cell, when one exists.
pub fn reference(experiment: &str, method: &str, kind: NoiseKind, snr: f64) -> (Option<f64>, Option<f64>) {
    // Rows for input SNR 0, 5, 10, 15, 20 dB.
    // (white IND, white COM, pink IND, pink COM) SNR and Fit.
    const T3_SNR: [[f64; 4]; 5] = [
        [10.22, 9.41, 8.74, 8.23],
        [13.80, 13.23, 12.18, 11.31],
        [17.64, 16.76, 15.81, 14.63],
        [21.53, 19.53, 17.22, 17.19],
        [24.86, 21.01, 20.67, 20.45],
    ];
    const T3_FIT: [[f64; 4]; 5] = [
        [89.45, 87.22, 85.49, 83.53],
        [95.32, 94.67, 93.35, 91.86],
        [98.04, 97.63, 97.11, 96.36],
        [99.20, 98.71, 97.99, 98.03],
        [99.63, 98.86, 98.87, 99.06],
    ];
    // (white ANN, white Custom, pink ANN, pink Custom).
    const T4_SNR: [[f64; 4]; 5] = [
        [9.41, 5.89, 8.23, 4.31],
        [13.23, 9.97, 11.31, 8.56],
        [16.76, 13.00, 14.63, 11.89],
        [19.53, 15.93, 17.19, 14.20],
        [21.01, 16.28, 20.45, 15.16],
    ];
    const T4_FIT: [[f64; 4]; 5] = [
        [87.22, 74.25, 83.53, 62.96],
        [94.67, 89.92, 91.86, 86.08],
        [97.63, 94.99, 96.36, 93.53],
        [98.71, 96.78, 98.03, 96.20],
        [98.86, 97.04, 99.06, 96.95],
    ];
    let row = match [0.0, 5.0, 10.0, 15.0, 20.0].iter().position(|&s| s == snr) {
        Some(r) => r,
        None => return (None, None),
    };
    let base = match kind {
        NoiseKind::White => 0,
        NoiseKind::Pink => 2,
    };
    let (snr_t, fit_t, col) = match (experiment, method) {
        ("table3", "IND-M") => (&T3_SNR, &T3_FIT, 0),
        ("table3", "COM-M") => (&T3_SNR, &T3_FIT, 1),
        ("table4", "EMD-ANN") => (&T4_SNR, &T4_FIT, 0),
        ("table4", "EMD-Custom") => (&T4_SNR, &T4_FIT, 1),
        _ => return (None, None),
    };
    (Some(snr_t[row][base + col]), Some(fit_t[row][base + col]))
}
