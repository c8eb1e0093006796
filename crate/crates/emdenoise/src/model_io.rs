//! Versioned JSON model files.
//!
//! ```json
//! {
//!   "magic": "emdenoise-mlp",
//!   "version": 1,
//!   "layer_sizes": [13, 25, 20, 1],
//!   "hidden_activation": "tanh",
//!   "output_activation": "linear",
//!   "seed": 42,
//!   "epochs_trained": 200,
//!   "layers": [{ "weights": [...], "biases": [...] }, ...],
//!   "training": { ... }
//! }
//! ```
//!
//! `weights` is row-major `[outputs][inputs]`. Floats are written in shortest
//! round-trip form and parsed exactly, so a reload is bit-identical.
//! `training` is optional metadata and never affects the network.

use std::path::Path;

use emdenoise_core::mlp::{Activation, Layer, MlpModel};
use serde::{Deserialize, Serialize};

use crate::fsio::{read_string, write_string};
use crate::{Error, Result};

pub const MAGIC: &str = "emdenoise-mlp";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub structure: String,
    pub noise_kinds: Vec<String>,
    pub snr_set: Vec<f64>,
    pub pink_alpha: f64,
    pub block_rows: usize,
    pub final_block_loss: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LayerRecord {
    weights: Vec<f64>,
    biases: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelRecord {
    magic: String,
    version: u32,
    layer_sizes: Vec<usize>,
    hidden_activation: String,
    output_activation: String,
    seed: u64,
    epochs_trained: usize,
    layers: Vec<LayerRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    training: Option<TrainingMeta>,
}

pub fn model_to_json(model: &MlpModel, meta: Option<&TrainingMeta>) -> Result<String> {
    let layers = model.layers();
    if layers.iter().any(|l| l.weights.iter().chain(&l.biases).any(|v| !v.is_finite())) {
        return Err(Error::Config("model has non-finite parameters".into()));
    }
    let record = ModelRecord {
        magic: MAGIC.into(),
        version: VERSION,
        layer_sizes: model.layer_sizes(),
        hidden_activation: Activation::Tanh.as_str().into(),
        output_activation: Activation::Linear.as_str().into(),
        seed: model.seed,
        epochs_trained: model.epochs_trained,
        layers: layers
            .iter()
            .map(|l| LayerRecord { weights: l.weights.clone(), biases: l.biases.clone() })
            .collect(),
        training: meta.cloned(),
    };
    let mut text = serde_json::to_string_pretty(&record)?;
    text.push('\n');
    Ok(text)
}

pub fn model_from_json(text: &str, path: &Path) -> Result<(MlpModel, Option<TrainingMeta>)> {
    let corrupt = |detail: String| Error::Corrupt { path: path.into(), detail };
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    let magic = value.get("magic").and_then(|m| m.as_str()).unwrap_or("");
    if magic != MAGIC {
        return Err(Error::ModelMagic { path: path.into(), found: magic.into() });
    }
    let version = value.get("version").and_then(|v| v.as_u64()).unwrap_or(0);
    if version != VERSION as u64 {
        return Err(Error::ModelVersion { path: path.into(), found: version as u32, expected: VERSION });
    }
    // Re-parse from text rather than from `value` so floats keep their exact
    // round-trip parse.
    let record: ModelRecord = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    let hidden = Activation::parse(&record.hidden_activation)
        .ok_or_else(|| corrupt(format!("unknown activation {:?}", record.hidden_activation)))?;
    let output = Activation::parse(&record.output_activation)
        .ok_or_else(|| corrupt(format!("unknown activation {:?}", record.output_activation)))?;
    let sizes = &record.layer_sizes;
    if sizes.len() != record.layers.len() + 1 {
        return Err(corrupt("layer_sizes does not match the number of layers".into()));
    }
    let n = record.layers.len();
    let layers = record
        .layers
        .into_iter()
        .enumerate()
        .map(|(i, l)| Layer {
            inputs: sizes[i],
            outputs: sizes[i + 1],
            weights: l.weights,
            biases: l.biases,
            activation: if i + 1 == n { output } else { hidden },
        })
        .collect();
    let model = MlpModel::from_layers(layers, record.seed, record.epochs_trained)
        .map_err(|e| corrupt(e.to_string()))?;
    Ok((model, record.training))
}

pub fn save_model(model: &MlpModel, meta: Option<&TrainingMeta>, path: &Path) -> Result<()> {
    write_string(path, &model_to_json(model, meta)?)
}

pub fn load_model(path: &Path) -> Result<MlpModel> {
    Ok(load_model_with_meta(path)?.0)
}

pub fn load_model_with_meta(path: &Path) -> Result<(MlpModel, Option<TrainingMeta>)> {
    model_from_json(&read_string(path)?, path)
}
