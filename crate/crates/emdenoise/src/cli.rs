//! Subcommands of the `emdenoise` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use emdenoise_core::ann::denoise_ann;
use emdenoise_core::dataset::make_dataset;
use emdenoise_core::emd::decompose;
use emdenoise_core::metrics::{fit_pct, snr_db};
use emdenoise_core::noise::NoiseKind;
use emdenoise_core::threshold::denoise_emd;
use emdenoise_core::train::fit;
use emdenoise_core::Signal;
use serde::Serialize;

use crate::bench::{self, eval_cell, make_corpus, Method};
use crate::config::{DenoiseMethod, RunConfig};
use crate::fsio::write_string;
use crate::imf_dump::{summarize, write_dump};
use crate::model_io::{load_model, save_model, TrainingMeta};
use crate::report::{export_report, EvalReport, EvalRow, ReportFormat, DOMAIN};
use crate::spectrogram::spectrogram;
use crate::wav::{load_wav, write_wav};
use crate::{Error, Result};

/// Environment variable holding the log filter, e.g. `info` or `debug`.
pub const LOG_ENV: &str = "EMDENOISE_LOG";

#[derive(Debug, Parser)]
#[command(name = "emdenoise", version, about = "EMD-based lung sound denoising")]
#[command(after_help = "Log verbosity is read from EMDENOISE_LOG (default: warn).")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write synthetic breath cycles as WAV files plus a manifest.
    Synth(Flags),
    /// Add white or pink noise to a WAV at a target SNR.
    Noise(Flags),
    /// Decompose a WAV into IMFs and write a columnar dump and summary.
    Decompose(Flags),
    /// Train an EMD-ANN model and save it as JSON.
    Train(Flags),
    /// Denoise a WAV with a trained model or IMF thresholding.
    Denoise(Flags),
    /// Score a denoiser on the held-out corpus, or a WAV against a reference.
    Eval(Flags),
    /// Run the table and sweep experiments and write CSV reports.
    Bench(Flags),
    /// Write a Hann-windowed STFT magnitude grid as text or PGM.
    Spectrogram(Flags),
}

/// Flags shared by every subcommand. A flag overrides the config file,
/// which overrides the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Input path: a WAV file, or a directory of WAVs for `train` [default: none]
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output file or directory [default: none]
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// TOML run configuration [default: none]
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Denoising method [default: ann]
    #[arg(long, value_parser = ["ann", "custom", "hard", "soft"])]
    pub method: Option<String>,
    /// Noise kind [default: white]
    #[arg(long, value_parser = ["white", "pink"])]
    pub noise: Option<String>,
    /// Target SNR in dB [default: 10]
    #[arg(long, value_name = "DB", allow_hyphen_values = true)]
    pub snr: Option<f64>,
    /// Network structure, ann1..ann9 or sizes such as 13-25-20-1 [default: ann5]
    #[arg(long)]
    pub structure: Option<String>,
    /// Training epochs [default: 200]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Pink noise spectral exponent, 0 < alpha < 2 [default: 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Shape parameter of the custom threshold, in [0, 1] [default: 0.5]
    #[arg(long)]
    pub custom_alpha: Option<f64>,
    /// Custom threshold dead-zone edge as a fraction of the threshold [default: 0.5]
    #[arg(long)]
    pub gamma_ratio: Option<f64>,
    /// Universal threshold constant [default: 0.7]
    #[arg(long)]
    pub c_const: Option<f64>,
    /// Model file for `denoise --method ann` and `eval` [default: none]
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Clean reference WAV; makes `eval` score --input against it [default: none]
    #[arg(long, value_name = "PATH")]
    pub reference: Option<PathBuf>,
}

impl Flags {
    /// Config file (if any) with these flags applied on top.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($flag:ident => $($dst:tt)+) => {
                if let Some(v) = &self.$flag {
                    c.$($dst)+ = v.clone().into();
                }
            };
        }
        set!(input => input);
        set!(output => output);
        set!(seed => seed);
        set!(method => denoise.method);
        set!(noise => noise.kind);
        set!(snr => noise.snr_db);
        set!(structure => train.structure);
        set!(epochs => train.epochs);
        set!(alpha => noise.alpha);
        set!(custom_alpha => custom.alpha);
        set!(gamma_ratio => custom.gamma_ratio);
        set!(c_const => custom.c_const);
        set!(model => model);
        set!(reference => reference);
        if let Some(n) = &self.noise {
            c.train.noise_kinds = vec![n.clone()];
        }
        Ok(c)
    }
}

fn required<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Config(format!("missing {what}; pass --{what} or set it in the config")))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(f) => synth(&f.resolve()?),
        Command::Noise(f) => noise(&f.resolve()?),
        Command::Decompose(f) => decompose_cmd(&f.resolve()?),
        Command::Train(f) => train(&f.resolve()?),
        Command::Denoise(f) => denoise(&f.resolve()?),
        Command::Eval(f) => eval(&f.resolve()?),
        Command::Bench(f) => bench_cmd(&f.resolve()?),
        Command::Spectrogram(f) => spectrogram_cmd(&f.resolve()?),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_string(path, &s)
}

/// `foo.wav` becomes `foo<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    index: usize,
    seed: u64,
    samples: usize,
    sample_rate: u32,
}

#[derive(Serialize)]
struct Manifest {
    master_seed: u64,
    cycles: Vec<ManifestEntry>,
}

fn synth(c: &RunConfig) -> Result<()> {
    let dir = required(&c.output, "output")?;
    let spec = c.corpus()?;
    let mut entries = Vec::new();
    for i in 0..spec.cycles {
        let s = bench::corpus_cycle(&spec, c.seed, i)?;
        let file = format!("cycle_{i:03}.wav");
        write_wav(&s, &dir.join(&file))?;
        entries.push(ManifestEntry {
            file,
            index: i,
            seed: bench::cycle_seed(c.seed, i),
            samples: s.len(),
            sample_rate: s.sample_rate(),
        });
    }
    write_json(&dir.join("manifest.json"), &Manifest { master_seed: c.seed, cycles: entries })?;
    log::info!("wrote {} cycles to {}", spec.cycles, dir.display());
    Ok(())
}

#[derive(Serialize)]
struct NoiseSidecar {
    kind: String,
    alpha: f64,
    target_snr_db: f64,
    seed: u64,
    /// Gain applied to both files so the noisy one fits 16-bit full scale.
    gain: f64,
    clean: String,
}

/// Writes the noisy WAV and `<stem>.clean.wav`, the input scaled by the same
/// gain, so the pair keeps the target SNR.
fn noise(c: &RunConfig) -> Result<()> {
    let input = required(&c.input, "input")?;
    let output = required(&c.output, "output")?;
    let clean = load_wav(input)?;
    let spec = c.noise_spec()?;
    let (noisy, _) = spec.contaminate(&clean)?;
    let gain = 1.0f64.min(1.0 / noisy.peak());
    let scale = |s: &Signal| s.with_samples(s.samples().iter().map(|v| v * gain).collect());
    let clean_path = sibling(output, ".clean.wav");
    write_wav(&scale(&noisy)?, output)?;
    write_wav(&scale(&clean)?, &clean_path)?;
    write_json(
        &sibling(output, ".noise.json"),
        &NoiseSidecar {
            kind: spec.kind.as_str().into(),
            alpha: spec.alpha,
            target_snr_db: spec.target_snr_db,
            seed: spec.seed,
            gain,
            clean: clean_path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        },
    )
}

fn decompose_cmd(c: &RunConfig) -> Result<()> {
    let input = required(&c.input, "input")?;
    let output = required(&c.output, "output")?;
    let s = load_wav(input)?;
    let stack = decompose(&s, &c.sift()?)?;
    let summary = summarize(&stack, s.samples(), s.sample_rate());
    write_dump(&stack, &summary, output, &sibling(output, ".summary.json"))?;
    println!("imfs {} reconstruction_error {:e}", summary.imf_count, summary.reconstruction_error);
    Ok(())
}

fn load_dir(dir: &Path) -> Result<Vec<Signal>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")))
        .collect();
    paths.sort();
    paths.iter().map(|p| load_wav(p)).collect()
}

/// Trains on the WAVs in `--input` when given, else on the training split of
/// the synthetic corpus exactly as `bench` does.
fn train(c: &RunConfig) -> Result<()> {
    let output = required(&c.output, "output")?;
    let spec = c.train_spec()?;
    let cfg = c.bench_config()?;
    let (model, history) = match &c.input {
        Some(dir) if !dir.exists() => return Err(Error::MissingFile(dir.clone())),
        Some(dir) => {
            let cycles = load_dir(dir)?;
            let data = make_dataset(&cycles, &spec, &cfg.sift)?;
            for s in &data.skipped {
                log::warn!("skipped cycle {} ({} noise, {} dB): {}", s.cycle, s.kind, s.snr_db, s.error);
            }
            fit(&data, &spec)?
        }
        None => {
            let corpus = make_corpus(&cfg.corpus, cfg.seed)?;
            bench::train_model(&cfg, &corpus.train, &spec.noise_kinds, &spec.snr_set)?
        }
    };
    let meta = TrainingMeta {
        structure: c.train.structure.clone(),
        noise_kinds: spec.noise_kinds.iter().map(|k| k.as_str().into()).collect(),
        snr_set: spec.snr_set.clone(),
        pink_alpha: spec.pink_alpha,
        block_rows: spec.block_rows,
        final_block_loss: history.last().map(|h| h.loss_after),
    };
    save_model(&model, Some(&meta), output)
}

fn denoise(c: &RunConfig) -> Result<()> {
    let input = required(&c.input, "input")?;
    let output = required(&c.output, "output")?;
    let noisy = load_wav(input)?;
    let sift = c.sift()?;
    let method = c.method()?;
    let out = match c.threshold_rule(method)? {
        Some(rule) => denoise_emd(&noisy, &sift, &rule, c.custom.c_const)?,
        None => denoise_ann(&noisy, &load_model(required(&c.model, "model")?)?, &sift)?,
    };
    write_wav(&out, output)
}

fn method_label(m: DenoiseMethod) -> &'static str {
    match m {
        DenoiseMethod::Ann => "EMD-ANN",
        DenoiseMethod::Custom => "EMD-Custom",
        DenoiseMethod::Hard => "EMD-Hard",
        DenoiseMethod::Soft => "EMD-Soft",
    }
}

#[derive(Serialize)]
struct WavScore {
    snr_db: f64,
    fit_pct: f64,
}

/// With `reference`, scores `--input` against it in the raw sample domain.
/// Otherwise scores the method on the held-out corpus cycles at the
/// configured noise and SNR, the same cell `bench` computes.
fn eval(c: &RunConfig) -> Result<()> {
    if let Some(reference) = &c.reference {
        let cand = load_wav(required(&c.input, "input")?)?;
        let refr = load_wav(reference)?;
        let score = WavScore { snr_db: snr_db(refr.samples(), cand.samples())?, fit_pct: fit_pct(refr.samples(), cand.samples())? };
        let text = serde_json::to_string(&score)?;
        return match &c.output {
            Some(p) => write_string(p, &(text + "\n")),
            None => {
                println!("{text}");
                Ok(())
            }
        };
    }
    let cfg = c.bench_config()?;
    let method_kind = c.method()?;
    let kind: NoiseKind = c.noise_kind()?;
    let snr = c.noise.snr_db;
    let (method, train) = match c.threshold_rule(method_kind)? {
        Some(rule) => (Method::Threshold(rule), ("none".to_string(), String::new())),
        None => {
            let path = required(&c.model, "model")?;
            let (model, meta) = crate::model_io::load_model_with_meta(path)?;
            let train = meta
                .map(|m| (m.noise_kinds.join("-"), bench::snrs_label(&m.snr_set)))
                .unwrap_or_else(|| ("unknown".into(), String::new()));
            (Method::Ann(model), train)
        }
    };
    let corpus = make_corpus(&cfg.corpus, cfg.seed)?;
    let s = eval_cell(&cfg, &corpus.test, kind, snr, cfg.trials, &[&method])?[0];
    let row = EvalRow {
        experiment: "eval".into(),
        method: method_label(method_kind).into(),
        train_noise: train.0,
        test_noise: kind.as_str().into(),
        train_snrs: train.1,
        test_snr: snr,
        in_snr: s.in_snr,
        out_snr: s.out_snr,
        gain: s.out_snr - s.in_snr,
        fit_pct: s.fit_pct,
        seed: cfg.seed,
        cycles: corpus.test.len(),
        trials: cfg.trials,
        domain: DOMAIN.into(),
        reference_out_snr: None,
        reference_fit_pct: None,
    };
    let report = EvalReport::new(vec![row]);
    match &c.output {
        Some(p) => export_report(&report, p, ReportFormat::from_path(p)),
        None => {
            print!("{}", report.to_csv()?);
            Ok(())
        }
    }
}

fn bench_cmd(c: &RunConfig) -> Result<()> {
    let dir = required(&c.output, "output")?;
    let reports = bench::run_bench(c.bench_config()?, &c.experiments()?)?;
    for (e, r) in reports {
        export_report(&r, &dir.join(format!("{}.csv", e.as_str())), ReportFormat::Csv)?;
    }
    Ok(())
}

fn spectrogram_cmd(c: &RunConfig) -> Result<()> {
    let input = required(&c.input, "input")?;
    let output = required(&c.output, "output")?;
    let s = load_wav(input)?;
    spectrogram(&s, c.spectrogram.window, c.spectrogram.hop)?.export(output)
}
