//! Training rows for the EMD-ANN denoiser.

use alloc::vec::Vec;

use crate::emd::{decompose, to_fixed_13, Imf13, ImfStack, SiftConfig, CHANNELS};
use crate::noise::{NoiseKind, NoiseSpec};
use crate::rng::{db_label, derive_seed};
use crate::signal::normalize;
use crate::train::TrainSpec;
use crate::{AffineParams, Error, Result, Signal};

const DATASET_STREAM: u64 = 0x6461_7461;

/// A clean signal contaminated, normalized and decomposed.
///
/// The clean signal is mapped with the noisy signal's affine so that input
/// and target share one scale.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub noisy: Signal,
    pub clean: Vec<f64>,
    pub affine: AffineParams,
    pub stack: ImfStack,
}

impl Prepared {
    pub fn new(clean: &Signal, noise: &NoiseSpec, cfg: &SiftConfig) -> Result<Self> {
        let (noisy, _) = noise.contaminate(clean)?;
        let (noisy, affine) = normalize(&noisy)?;
        let stack = decompose(&noisy, cfg)?;
        Ok(Self { clean: affine.apply(clean.samples()), noisy, affine, stack })
    }

    pub fn fixed(&self) -> Imf13 {
        to_fixed_13(&self.stack, self.affine)
    }
}

/// Rows contributed by one (cycle, noise kind, SNR) combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
    pub cycle: usize,
    pub kind: NoiseKind,
    pub snr_db: f64,
}

/// A combination that failed to decompose and contributed no rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub cycle: usize,
    pub kind: NoiseKind,
    pub snr_db: f64,
    pub error: Error,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleDataset {
    pub inputs: Vec<[f64; CHANNELS]>,
    pub targets: Vec<f64>,
    pub segments: Vec<Segment>,
    pub skipped: Vec<Skipped>,
}

impl SampleDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Appends the rows of one decomposed example.
    pub fn push(&mut self, prepared: &Prepared, cycle: usize, kind: NoiseKind, snr_db: f64) {
        let fixed = prepared.fixed();
        let start = self.len();
        self.inputs.extend(fixed.rows());
        self.targets.extend_from_slice(&prepared.clean);
        self.segments.push(Segment { start, len: fixed.len(), cycle, kind, snr_db });
    }

    /// Appends `other`, shifting its segment offsets.
    pub fn extend(&mut self, other: SampleDataset) {
        let offset = self.len();
        self.inputs.extend(other.inputs);
        self.targets.extend(other.targets);
        self.segments
            .extend(other.segments.into_iter().map(|s| Segment { start: s.start + offset, ..s }));
        self.skipped.extend(other.skipped);
    }

    /// The segment that produced row `row`.
    pub fn provenance(&self, row: usize) -> Option<&Segment> {
        let i = self.segments.partition_point(|s| s.start + s.len <= row);
        self.segments.get(i).filter(|s| s.start <= row)
    }
}

/// Seed of the noise realization used for one training combination.
pub fn training_noise_seed(seed: u64, cycle: usize, kind: NoiseKind, snr_db: f64) -> u64 {
    derive_seed(seed, &[DATASET_STREAM, cycle as u64, kind.label(), db_label(snr_db)])
}

/// Builds training rows for every (noise kind, cycle, SNR) combination, in
/// that nesting order.
///
/// A combination whose decomposition fails is recorded in
/// [`SampleDataset::skipped`]; the call only fails when nothing succeeds.
pub fn make_dataset(cycles: &[Signal], spec: &TrainSpec, cfg: &SiftConfig) -> Result<SampleDataset> {
    if cycles.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if spec.snr_set.is_empty() {
        return Err(Error::param("snr_set", "must not be empty"));
    }
    if spec.noise_kinds.is_empty() {
        return Err(Error::param("noise_kinds", "must not be empty"));
    }
    cfg.validate()?;
    let mut data = SampleDataset::default();
    for &kind in &spec.noise_kinds {
        for (c, clean) in cycles.iter().enumerate() {
            for &snr in &spec.snr_set {
                let seed = training_noise_seed(spec.seed, c, kind, snr);
                let noise = match kind {
                    NoiseKind::White => NoiseSpec::white(snr, seed),
                    NoiseKind::Pink => NoiseSpec::pink(spec.pink_alpha, snr, seed),
                };
                match Prepared::new(clean, &noise, cfg) {
                    Ok(p) => data.push(&p, c, kind, snr),
                    Err(error) => data.skipped.push(Skipped { cycle: c, kind, snr_db: snr, error }),
                }
            }
        }
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(data)
}
