//! Feed-forward network: 13 IMF inputs, tanh hidden layers, one linear output.

use alloc::vec::Vec;

use crate::emd::CHANNELS;
use crate::rng::SeededRng;
use crate::{Error, Result};

/// Hidden layer widths of the nine candidate structures ANN1..ANN9.
pub const ANN_HIDDEN: [&[usize]; 9] = [
    &[35],
    &[65],
    &[95],
    &[25, 15],
    &[25, 20],
    &[25, 25],
    &[35, 15],
    &[35, 20],
    &[45, 10],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Linear,
}

impl Activation {
    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tanh" => Some(Activation::Tanh),
            "linear" => Some(Activation::Linear),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    /// One of the nine tabulated structures, 1-based.
    Ann(u8),
    /// Explicit layer sizes including input and output.
    Sizes(Vec<usize>),
}

impl Structure {
    pub fn layer_sizes(&self) -> Result<Vec<usize>> {
        let sizes = match self {
            Structure::Ann(id) => {
                let hidden = ANN_HIDDEN
                    .get((*id as usize).wrapping_sub(1))
                    .ok_or(Error::MalformedNetwork("structure id must be 1..=9"))?;
                let mut s = alloc::vec![CHANNELS];
                s.extend_from_slice(hidden);
                s.push(1);
                s
            }
            Structure::Sizes(s) => s.clone(),
        };
        check_sizes(&sizes)?;
        Ok(sizes)
    }
}

impl core::str::FromStr for Structure {
    type Err = Error;

    /// Accepts `ann1`..`ann9` (any case) or a dash-separated size list such as
    /// `13-25-20-1`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(id) = lower.strip_prefix("ann") {
            let id: u8 = id.parse().map_err(|_| Error::MalformedNetwork("unknown structure"))?;
            let st = Structure::Ann(id);
            st.layer_sizes()?;
            return Ok(st);
        }
        let sizes = lower
            .split('-')
            .map(|p| p.parse::<usize>())
            .collect::<core::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::MalformedNetwork("unknown structure"))?;
        check_sizes(&sizes)?;
        Ok(Structure::Sizes(sizes))
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::MalformedNetwork("need at least an input and an output layer"));
    }
    if sizes[0] != CHANNELS {
        return Err(Error::MalformedNetwork("input layer must have 13 units"));
    }
    if *sizes.last().unwrap() != 1 {
        return Err(Error::MalformedNetwork("output layer must have 1 unit"));
    }
    if sizes.contains(&0) {
        return Err(Error::MalformedNetwork("empty layer"));
    }
    Ok(())
}

/// Dense layer, `weights` row-major `[outputs][inputs]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl Layer {
    fn num_params(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layers: Vec<Layer>,
    pub seed: u64,
    pub epochs_trained: usize,
}

/// Scratch buffers for forward/backward passes.
#[derive(Debug, Clone)]
pub struct Workspace {
    acts: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl Workspace {
    pub fn new(model: &MlpModel) -> Self {
        let sizes = model.layer_sizes();
        Self {
            acts: sizes.iter().map(|&n| alloc::vec![0.0; n]).collect(),
            deltas: sizes.iter().map(|&n| alloc::vec![0.0; n]).collect(),
        }
    }
}

/// Builds a network with Glorot-uniform weights, `U(−s, s)` with
/// `s = √(6 / (fan_in + fan_out))`, and zero biases.
pub fn build_mlp(structure: &Structure, seed: u64) -> Result<MlpModel> {
    let sizes = structure.layer_sizes()?;
    let mut rng = SeededRng::new(seed);
    let last = sizes.len() - 2;
    let layers = sizes
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let (inputs, outputs) = (w[0], w[1]);
            let s = libm::sqrt(6.0 / (inputs + outputs) as f64);
            Layer {
                inputs,
                outputs,
                weights: (0..inputs * outputs).map(|_| rng.uniform_range(-s, s)).collect(),
                biases: alloc::vec![0.0; outputs],
                activation: if i == last { Activation::Linear } else { Activation::Tanh },
            }
        })
        .collect();
    Ok(MlpModel { layers, seed, epochs_trained: 0 })
}

impl MlpModel {
    /// Assembles a model from stored parts, checking every shape.
    pub fn from_layers(layers: Vec<Layer>, seed: u64, epochs_trained: usize) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::MalformedNetwork("no layers"));
        }
        let mut sizes = alloc::vec![layers[0].inputs];
        for (i, l) in layers.iter().enumerate() {
            if l.inputs != *sizes.last().unwrap() {
                return Err(Error::MalformedNetwork("layer widths do not chain"));
            }
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::MalformedNetwork("weight shape does not match layer sizes"));
            }
            let expected = if i + 1 == layers.len() { Activation::Linear } else { Activation::Tanh };
            if l.activation != expected {
                return Err(Error::MalformedNetwork("hidden layers are tanh, the output is linear"));
            }
            sizes.push(l.outputs);
        }
        check_sizes(&sizes)?;
        Ok(Self { layers, seed, epochs_trained })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut s = alloc::vec![self.layers[0].inputs];
        s.extend(self.layers.iter().map(|l| l.outputs));
        s
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Layer::num_params).sum()
    }

    /// Flat parameters: per layer, weights row-major then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            p.extend_from_slice(&l.weights);
            p.extend_from_slice(&l.biases);
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.num_params() {
            return Err(Error::LengthMismatch { expected: self.num_params(), actual: p.len() });
        }
        let mut at = 0;
        for l in &mut self.layers {
            let w = l.weights.len();
            l.weights.copy_from_slice(&p[at..at + w]);
            at += w;
            let b = l.biases.len();
            l.biases.copy_from_slice(&p[at..at + b]);
            at += b;
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        if input.len() != self.layers[0].inputs {
            return Err(Error::LengthMismatch { expected: self.layers[0].inputs, actual: input.len() });
        }
        let mut ws = Workspace::new(self);
        Ok(self.forward_with(input, &mut ws))
    }

    /// Forward pass into caller-owned scratch; `input` must have 13 values.
    pub fn forward_with(&self, input: &[f64], ws: &mut Workspace) -> f64 {
        ws.acts[0].copy_from_slice(input);
        for (li, layer) in self.layers.iter().enumerate() {
            let (before, after) = ws.acts.split_at_mut(li + 1);
            let x = &before[li];
            let y = &mut after[0];
            for (o, out) in y.iter_mut().enumerate() {
                let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                let z = layer.biases[o] + dot(row, x);
                *out = match layer.activation {
                    Activation::Tanh => libm::tanh(z),
                    Activation::Linear => z,
                };
            }
        }
        ws.acts.last().unwrap()[0]
    }

    /// Output for one row plus ∂output/∂params written into `grad` (same
    /// layout as [`MlpModel::params`]).
    pub fn output_gradient(&self, input: &[f64], ws: &mut Workspace, grad: &mut [f64]) -> f64 {
        let y = self.forward_with(input, ws);
        let last = self.layers.len() - 1;
        ws.deltas[last + 1][0] = 1.0;

        let offsets = self.param_offsets();
        for li in (0..self.layers.len()).rev() {
            let layer = &self.layers[li];
            let (lo, hi) = ws.deltas.split_at_mut(li + 1);
            let delta = &hi[0];
            let x = &ws.acts[li];
            let base = offsets[li];
            for o in 0..layer.outputs {
                let d = delta[o];
                let row = &mut grad[base + o * layer.inputs..base + (o + 1) * layer.inputs];
                for (g, &xi) in row.iter_mut().zip(x) {
                    *g = d * xi;
                }
                grad[base + layer.weights.len() + o] = d;
            }
            if li > 0 {
                let prev = &mut lo[li];
                let act = &ws.acts[li];
                for (i, p) in prev.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for o in 0..layer.outputs {
                        acc += layer.weights[o * layer.inputs + i] * delta[o];
                    }
                    // All layers below the output are tanh.
                    *p = acc * (1.0 - act[i] * act[i]);
                }
            }
        }
        y
    }

    fn param_offsets(&self) -> Vec<usize> {
        let mut at = 0;
        self.layers
            .iter()
            .map(|l| {
                let o = at;
                at += l.num_params();
                o
            })
            .collect()
    }

    pub fn predict(&self, rows: &[[f64; CHANNELS]]) -> Result<Vec<f64>> {
        if self.layers[0].inputs != CHANNELS {
            return Err(Error::LengthMismatch { expected: self.layers[0].inputs, actual: CHANNELS });
        }
        let mut ws = Workspace::new(self);
        Ok(rows.iter().map(|r| self.forward_with(r, &mut ws)).collect())
    }

    /// Mean squared error over `rows`.
    pub fn mse(&self, rows: &[[f64; CHANNELS]], targets: &[f64]) -> Result<f64> {
        if rows.len() != targets.len() {
            return Err(Error::LengthMismatch { expected: rows.len(), actual: targets.len() });
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let pred = self.predict(rows)?;
        Ok(pred.iter().zip(targets).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / rows.len() as f64)
    }

    /// Mean squared error and its gradient by backpropagation.
    pub fn mse_gradient(&self, rows: &[[f64; CHANNELS]], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
        if rows.len() != targets.len() {
            return Err(Error::LengthMismatch { expected: rows.len(), actual: targets.len() });
        }
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let p = self.num_params();
        let mut ws = Workspace::new(self);
        let mut g_row = alloc::vec![0.0; p];
        let mut grad = alloc::vec![0.0; p];
        let mut loss = 0.0;
        for (row, &t) in rows.iter().zip(targets) {
            let y = self.output_gradient(row, &mut ws, &mut g_row);
            let r = y - t;
            loss += r * r;
            for (g, &gr) in grad.iter_mut().zip(&g_row) {
                *g += r * gr;
            }
        }
        let n = rows.len() as f64;
        for g in &mut grad {
            *g *= 2.0 / n;
        }
        Ok((loss / n, grad))
    }
}

/// Dot product with four independent accumulators in a fixed order.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in chunks * 4..n {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
