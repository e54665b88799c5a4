//! Median ensemble of logistic-regression members trained with Adam.
//!
//! Every member starts from zero weights and sees the training set in its own
//! seeded batch order. The learning rate decays linearly to zero across epochs
//! and an L2 weight-decay term is added to the weight gradient (not to the
//! bias gradient) before the Adam update.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledTrainSet;
use crate::error::{Error, Result};

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub member_count: usize,
    pub epochs: usize,
    pub initial_learning_rate: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            member_count: 10,
            epochs: 50,
            initial_learning_rate: 1e-3,
            weight_decay: 0.1,
            batch_size: 64,
            seed: 0,
        }
    }
}

impl TrainingConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.member_count == 0 {
            return Err(Error::invalid("member count must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epoch count must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch size must be positive"));
        }
        if !(self.initial_learning_rate.is_finite() && self.initial_learning_rate > 0.0) {
            return Err(Error::invalid("learning rate must be finite and positive"));
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return Err(Error::invalid(
                "weight decay must be finite and nonnegative",
            ));
        }
        Ok(())
    }

    /// Learning rate used during `epoch` (0-based).
    pub fn learning_rate(&self, epoch: usize) -> f64 {
        self.initial_learning_rate * (1.0 - epoch as f64 / self.epochs as f64)
    }
}

/// One linear classifier: `sigmoid(w . x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMember {
    pub w: Vec<f64>,
    pub b: f64,
}

impl LinearMember {
    pub fn zeros(dim: usize) -> Self {
        LinearMember {
            w: vec![0.0; dim],
            b: 0.0,
        }
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.b
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub members: Vec<LinearMember>,
    pub config: TrainingConfig,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Binary cross-entropy of one sample plus `weight_decay / 2 * |w|^2`.
pub fn sample_loss(member: &LinearMember, x: &[f64], target: f64, weight_decay: f64) -> f64 {
    let z = member.logit(x);
    let l2: f64 = member.w.iter().map(|w| w * w).sum();
    softplus(z) - target * z + 0.5 * weight_decay * l2
}

/// Gradient of [`sample_loss`] with respect to `(w, b)`.
pub fn sample_gradient(
    member: &LinearMember,
    x: &[f64],
    target: f64,
    weight_decay: f64,
) -> (Vec<f64>, f64) {
    let residual = member.score(x) - target;
    let gw = member
        .w
        .iter()
        .zip(x)
        .map(|(w, x)| residual * x + weight_decay * w)
        .collect();
    (gw, residual)
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl Adam {
    fn new(len: usize) -> Self {
        Adam {
            m: vec![0.0; len],
            v: vec![0.0; len],
            step: 0,
        }
    }

    /// Applies one update; `params` and `grad` are laid out as `[w..., b]`.
    fn update(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.step += 1;
        let c1 = 1.0 - ADAM_BETA1.powi(self.step);
        let c2 = 1.0 - ADAM_BETA2.powi(self.step);
        for i in 0..params.len() {
            self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * grad[i];
            self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

/// Random stream for ensemble member `index`. Stream 0 stays free for the
/// train/test split.
pub(crate) fn member_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1 + index as u64);
    rng
}

fn train_member(data: &LabeledTrainSet, config: &TrainingConfig, index: usize) -> LinearMember {
    let dim = data.cols();
    let n = data.len();
    let mut rng = member_rng(config.seed, index);
    // params = [w..., b]
    let mut params = vec![0.0; dim + 1];
    let mut grad = vec![0.0; dim + 1];
    let mut adam = Adam::new(dim + 1);
    let mut order: Vec<usize> = (0..n).collect();

    for epoch in 0..config.epochs {
        let lr = config.learning_rate(epoch);
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let (w, b) = params.split_at(dim);
            for &i in batch {
                let x = data.row(i);
                let z = w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + b[0];
                let residual = sigmoid(z) - f64::from(data.targets()[i]);
                grad[..dim]
                    .iter_mut()
                    .zip(x)
                    .for_each(|(g, x)| *g += residual * x);
                grad[dim] += residual;
            }
            let scale = 1.0 / batch.len() as f64;
            for j in 0..dim {
                grad[j] = grad[j] * scale + config.weight_decay * params[j];
            }
            grad[dim] *= scale;
            adam.update(&mut params, &grad, lr);
        }
    }

    let b = params.pop().unwrap_or(0.0);
    LinearMember { w: params, b }
}

/// Trains `config.member_count` members independently.
pub fn train(data: &LabeledTrainSet, config: &TrainingConfig) -> Result<EnsembleModel> {
    config.validate()?;
    if data.count_of(1) == 0 || data.count_of(0) == 0 {
        return Err(Error::SingleClass(
            "training data must contain both origins".into(),
        ));
    }
    let members = (0..config.member_count)
        .into_par_iter()
        .map(|j| train_member(data, config, j))
        .collect();
    Ok(EnsembleModel {
        members,
        config: config.clone(),
    })
}

impl EnsembleModel {
    pub fn dim(&self) -> usize {
        self.members.first().map_or(0, |m| m.w.len())
    }

    /// Median of the member scores on one sample.
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut scores: Vec<f64> = self.members.iter().map(|m| m.score(x)).collect();
        median(&mut scores)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: EnsembleModel = serde_json::from_str(text)?;
        let dim = model.dim();
        if model.members.is_empty() {
            return Err(Error::invalid("model has no members"));
        }
        if model
            .members
            .iter()
            .any(|m| m.w.len() != dim || !m.b.is_finite() || m.w.iter().any(|w| !w.is_finite()))
        {
            return Err(Error::invalid(
                "model members must share a dimension and be finite",
            ));
        }
        Ok(model)
    }
}

/// Row-wise median ensemble score over a row-major `features` matrix.
pub fn predict(model: &EnsembleModel, features: &[f64], cols: usize) -> Result<Vec<f64>> {
    if cols != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: cols,
        });
    }
    if cols == 0 || !features.len().is_multiple_of(cols) {
        return Err(Error::invalid(
            "feature matrix is not a whole number of rows",
        ));
    }
    Ok(features
        .par_chunks_exact(cols)
        .map(|row| model.score(row))
        .collect())
}

/// Median; an even count averages the two central order statistics.
pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
