//! Levenberg-Marquardt training on random row blocks, with a plain
//! gradient-descent fallback.

use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::SampleDataset;
use crate::emd::CHANNELS;
use crate::mlp::{build_mlp, dot, MlpModel, Structure, Workspace};
use crate::noise::{NoiseKind, DEFAULT_PINK_ALPHA};
use crate::rng::{derive_seed, SeededRng};
use crate::{Error, Result};

const BLOCK_STREAM: u64 = 0x626c_6f63;
const INIT_STREAM: u64 = 0x696e_6974;

/// Row band height when forming the normal matrix.
const NORMAL_BAND: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    LevenbergMarquardt,
    /// Fixed-step descent on the block MSE.
    GradientDescent { step: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSpec {
    pub structure: Structure,
    pub epochs: usize,
    pub lm_lambda0: f64,
    pub lm_lambda_up: f64,
    pub lm_lambda_down: f64,
    pub lm_lambda_max: f64,
    /// Floor the damping decays to after accepted steps.
    pub lm_lambda_min: f64,
    /// Rows drawn per epoch; the whole dataset when it is smaller.
    pub block_rows: usize,
    pub optimizer: Optimizer,
    pub snr_set: Vec<f64>,
    pub noise_kinds: Vec<NoiseKind>,
    pub pink_alpha: f64,
    pub seed: u64,
}

impl Default for TrainSpec {
    fn default() -> Self {
        Self {
            structure: Structure::Ann(5),
            epochs: 200,
            lm_lambda0: 1e-3,
            lm_lambda_up: 10.0,
            lm_lambda_down: 0.1,
            lm_lambda_max: 1e10,
            lm_lambda_min: 1e-12,
            block_rows: 2048,
            optimizer: Optimizer::LevenbergMarquardt,
            snr_set: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            noise_kinds: vec![NoiseKind::White],
            pink_alpha: DEFAULT_PINK_ALPHA,
            seed: 0,
        }
    }
}

impl TrainSpec {
    pub fn validate(&self) -> Result<()> {
        self.structure.layer_sizes()?;
        if self.epochs == 0 {
            return Err(Error::param("epochs", "must be at least 1"));
        }
        if !(self.lm_lambda0 > 0.0 && self.lm_lambda0.is_finite()) {
            return Err(Error::param("lm_lambda0", "must be positive"));
        }
        if !(self.lm_lambda_up > 1.0 && self.lm_lambda_up.is_finite()) {
            return Err(Error::param("lm_lambda_up", "must exceed 1"));
        }
        if !(self.lm_lambda_down > 0.0 && self.lm_lambda_down < 1.0) {
            return Err(Error::param("lm_lambda_down", "must lie in (0, 1)"));
        }
        if !(self.lm_lambda_max >= self.lm_lambda0) {
            return Err(Error::param("lm_lambda_max", "must be at least lm_lambda0"));
        }
        if !(self.lm_lambda_min >= 0.0 && self.lm_lambda_min <= self.lm_lambda0) {
            return Err(Error::param("lm_lambda_min", "must lie in [0, lm_lambda0]"));
        }
        if self.block_rows == 0 {
            return Err(Error::param("block_rows", "must be at least 1"));
        }
        if let Optimizer::GradientDescent { step } = self.optimizer {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::param("step", "must be positive"));
            }
        }
        if !(self.pink_alpha > 0.0 && self.pink_alpha < 2.0) {
            return Err(Error::param("pink_alpha", "must lie in (0, 2)"));
        }
        Ok(())
    }

    /// Seed used to initialize the network weights.
    pub fn init_seed(&self) -> u64 {
        derive_seed(self.seed, &[INIT_STREAM])
    }
}

/// Outcome of one epoch. Losses are block MSEs before and after the step;
/// a rejected epoch leaves the parameters unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss_before: f64,
    pub loss_after: f64,
    pub lambda: f64,
    pub accepted: bool,
}

/// Builds the network named by `spec` and trains it on `data`.
pub fn fit(data: &SampleDataset, spec: &TrainSpec) -> Result<(MlpModel, Vec<EpochRecord>)> {
    spec.validate()?;
    let model = build_mlp(&spec.structure, spec.init_seed())?;
    train_lm(model, data, spec)
}

/// Runs `spec.epochs` epochs of the configured optimizer on `data`.
pub fn train_lm(
    model: MlpModel,
    data: &SampleDataset,
    spec: &TrainSpec,
) -> Result<(MlpModel, Vec<EpochRecord>)> {
    train_rows(model, &data.inputs, &data.targets, spec)
}

/// [`train_lm`] on bare rows and targets.
pub fn train_rows(
    mut model: MlpModel,
    inputs: &[[f64; CHANNELS]],
    targets: &[f64],
    spec: &TrainSpec,
) -> Result<(MlpModel, Vec<EpochRecord>)> {
    spec.validate()?;
    if inputs.len() != targets.len() {
        return Err(Error::LengthMismatch { expected: inputs.len(), actual: targets.len() });
    }
    if inputs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if model.layers()[0].inputs != CHANNELS {
        return Err(Error::MalformedNetwork("input layer must have 13 units"));
    }

    let mut trainer = Trainer::new(&model, inputs.len(), spec);
    let mut history = Vec::with_capacity(spec.epochs);
    for epoch in 0..spec.epochs {
        let block = trainer.next_block();
        let record = match spec.optimizer {
            Optimizer::LevenbergMarquardt => trainer.lm_epoch(&mut model, inputs, targets, &block)?,
            Optimizer::GradientDescent { step } => trainer.gd_epoch(&mut model, inputs, targets, &block, step)?,
        };
        history.push(EpochRecord { epoch, ..record });
        model.epochs_trained += 1;
    }
    Ok((model, history))
}

struct Trainer {
    rng: SeededRng,
    order: Vec<usize>,
    block: usize,
    lambda: f64,
    lambda0: f64,
    up: f64,
    down: f64,
    lambda_max: f64,
    lambda_min: f64,
    ws: Workspace,
    grad_row: Vec<f64>,
    /// Block Jacobian stored transposed, `[params][rows]`.
    jt: Vec<f64>,
    residuals: Vec<f64>,
    normal: Vec<f64>,
    factor: Vec<f64>,
    rhs: Vec<f64>,
}

impl Trainer {
    fn new(model: &MlpModel, rows: usize, spec: &TrainSpec) -> Self {
        let p = model.num_params();
        let block = spec.block_rows.min(rows);
        Self {
            rng: SeededRng::new(derive_seed(spec.seed, &[BLOCK_STREAM])),
            order: (0..rows).collect(),
            block,
            lambda: spec.lm_lambda0,
            lambda0: spec.lm_lambda0,
            up: spec.lm_lambda_up,
            down: spec.lm_lambda_down,
            lambda_max: spec.lm_lambda_max,
            lambda_min: spec.lm_lambda_min,
            ws: Workspace::new(model),
            grad_row: vec![0.0; p],
            jt: Vec::new(),
            residuals: vec![0.0; block],
            normal: Vec::new(),
            factor: Vec::new(),
            rhs: vec![0.0; p],
        }
    }

    /// Draws the next block by a partial Fisher-Yates shuffle of the
    /// persistent row order. Uses every row, unshuffled, when they all fit.
    fn next_block(&mut self) -> Vec<usize> {
        let n = self.order.len();
        if self.block == n {
            return self.order.clone();
        }
        for i in 0..self.block {
            let j = i + self.rng.below(n - i);
            self.order.swap(i, j);
        }
        self.order[..self.block].to_vec()
    }

    fn block_loss(&mut self, model: &MlpModel, inputs: &[[f64; CHANNELS]], targets: &[f64], block: &[usize]) -> f64 {
        let mut acc = 0.0;
        for &k in block {
            let e = targets[k] - model.forward_with(&inputs[k], &mut self.ws);
            acc += e * e;
        }
        acc / block.len() as f64
    }

    fn lm_epoch(
        &mut self,
        model: &mut MlpModel,
        inputs: &[[f64; CHANNELS]],
        targets: &[f64],
        block: &[usize],
    ) -> Result<EpochRecord> {
        let p = model.num_params();
        let b = block.len();
        self.jt.resize(p * b, 0.0);
        let mut loss_before = 0.0;
        for (col, &k) in block.iter().enumerate() {
            let y = model.output_gradient(&inputs[k], &mut self.ws, &mut self.grad_row);
            let r = targets[k] - y;
            self.residuals[col] = r;
            loss_before += r * r;
            for (i, &g) in self.grad_row.iter().enumerate() {
                self.jt[i * b + col] = g;
            }
        }
        loss_before /= b as f64;

        // Lower triangle of JᵀJ, one GEMM per row band. The kernel's
        // summation order is fixed, so the product is reproducible.
        self.normal.resize(p * p, 0.0);
        let mut i0 = 0;
        while i0 < p {
            let i1 = (i0 + NORMAL_BAND).min(p);
            // SAFETY: all slices are in bounds for the given shapes and strides.
            unsafe {
                matrixmultiply::dgemm(
                    i1 - i0,
                    b,
                    i1,
                    1.0,
                    self.jt.as_ptr().add(i0 * b),
                    b as isize,
                    1,
                    self.jt.as_ptr(),
                    1,
                    b as isize,
                    0.0,
                    self.normal.as_mut_ptr().add(i0 * p),
                    p as isize,
                    1,
                );
            }
            i0 = i1;
        }
        for i in 0..p {
            self.rhs[i] = dot(&self.jt[i * b..(i + 1) * b], &self.residuals[..b]);
        }

        let theta = model.params();
        let mut trial = vec![0.0; p];
        let mut factored_once = false;
        loop {
            if self.lambda > self.lambda_max {
                if !factored_once {
                    return Err(Error::SingularNormalEquations { lambda: self.lambda });
                }
                let lambda = self.lambda;
                self.lambda = self.lambda0;
                return Ok(EpochRecord { epoch: 0, loss_before, loss_after: loss_before, lambda, accepted: false });
            }
            self.factor.clear();
            self.factor.extend_from_slice(&self.normal);
            for i in 0..p {
                self.factor[i * p + i] += self.lambda;
            }
            if !cholesky(&mut self.factor, p) {
                self.lambda *= self.up;
                continue;
            }
            factored_once = true;
            let mut delta = self.rhs.clone();
            cholesky_solve(&self.factor, p, &mut delta);
            for ((t, th), d) in trial.iter_mut().zip(&theta).zip(&delta) {
                *t = th + d;
            }
            model.set_params(&trial)?;
            let loss_after = self.block_loss(model, inputs, targets, block);
            if loss_after < loss_before {
                let lambda = self.lambda;
                self.lambda = (self.lambda * self.down).max(self.lambda_min);
                return Ok(EpochRecord { epoch: 0, loss_before, loss_after, lambda, accepted: true });
            }
            model.set_params(&theta)?;
            self.lambda *= self.up;
        }
    }

    fn gd_epoch(
        &mut self,
        model: &mut MlpModel,
        inputs: &[[f64; CHANNELS]],
        targets: &[f64],
        block: &[usize],
        step: f64,
    ) -> Result<EpochRecord> {
        let rows: Vec<[f64; CHANNELS]> = block.iter().map(|&k| inputs[k]).collect();
        let t: Vec<f64> = block.iter().map(|&k| targets[k]).collect();
        let (loss_before, grad) = model.mse_gradient(&rows, &t)?;
        let theta: Vec<f64> = model.params().iter().zip(&grad).map(|(p, g)| p - step * g).collect();
        model.set_params(&theta)?;
        let loss_after = self.block_loss(model, inputs, targets, block);
        Ok(EpochRecord { epoch: 0, loss_before, loss_after, lambda: 0.0, accepted: true })
    }
}

/// Column block width of the Cholesky factorization.
const CHOL_BLOCK: usize = 48;

/// In-place lower Cholesky factor of a row-major `n × n` matrix. Returns
/// false when the matrix is not numerically positive definite. Only the lower
/// triangle of the result is meaningful.
///
/// Right-looking blocked form: each diagonal block and its panel are factored
/// directly, then the trailing matrix is updated with one GEMM.
pub(crate) fn cholesky(a: &mut [f64], n: usize) -> bool {
    assert_eq!(a.len(), n * n);
    let mut k0 = 0;
    while k0 < n {
        let kb = CHOL_BLOCK.min(n - k0);
        let k1 = k0 + kb;
        for j in k0..k1 {
            let row_j = &a[j * n + k0..j * n + j];
            let d = a[j * n + j] - dot(row_j, row_j);
            if !(d > 0.0 && d.is_finite()) {
                return false;
            }
            let d = libm::sqrt(d);
            a[j * n + j] = d;
            for i in (j + 1)..n {
                let (head, tail) = a.split_at_mut(i * n);
                let row_i = &mut tail[..n];
                row_i[j] = (row_i[j] - dot(&row_i[k0..j], &head[j * n + k0..j * n + j])) / d;
            }
        }
        let m = n - k1;
        if m > 0 {
            let base = a.as_mut_ptr();
            // SAFETY: the panel (rows k1.., columns k0..k1) and the trailing
            // block (rows k1.., columns k1..) are disjoint regions of `a`.
            unsafe {
                let panel = base.add(k1 * n + k0) as *const f64;
                matrixmultiply::dgemm(
                    m,
                    kb,
                    m,
                    -1.0,
                    panel,
                    n as isize,
                    1,
                    panel,
                    1,
                    n as isize,
                    1.0,
                    base.add(k1 * n + k1),
                    n as isize,
                    1,
                );
            }
        }
        k0 = k1;
    }
    true
}

/// Solves `L Lᵀ x = b` in place given the factor from [`cholesky`].
pub(crate) fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let s = dot(&l[i * n..i * n + i], &b[..i]);
        b[i] = (b[i] - s) / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}
