use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrainConfig;
use crate::corpus::{fisher_yates, Label};
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::{sigmoid, softplus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearKind {
    LogisticRegression,
    SupportVectorMachine,
}

/// Hyperplane `w . x + b`; positive scores mean Fake.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub kind: LinearKind,
}

impl LinearModel {
    pub fn zeros(dim: usize, kind: LinearKind) -> Self {
        LinearModel {
            weights: vec![0.0; dim],
            bias: 0.0,
            kind,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    /// `sigmoid(score)` for both kinds; the SVM margin is squashed as-is.
    pub fn predict_proba(&self, x: &SparseVector) -> f64 {
        sigmoid(self.score(x))
    }

    pub fn predict(&self, x: &SparseVector) -> Label {
        Label::from_score(self.score(x))
    }
}

/// Mean loss plus `l2/2 * |w|^2`, with its (sub)gradient. The bias is not regularized.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub loss: f64,
    pub grad_weights: Vec<f64>,
    pub grad_bias: f64,
}

/// Mean binary cross-entropy objective of `model` on the given documents.
pub fn logistic_objective(
    model: &LinearModel,
    vectors: &[SparseVector],
    labels: &[Label],
    l2_lambda: f64,
) -> Objective {
    let all: Vec<usize> = (0..vectors.len()).collect();
    batch_objective(
        LinearKind::LogisticRegression,
        model,
        vectors,
        labels,
        &all,
        l2_lambda,
    )
}

/// Mean hinge-loss objective; points with `y * s == 1` contribute no subgradient.
pub fn svm_objective(
    model: &LinearModel,
    vectors: &[SparseVector],
    labels: &[Label],
    l2_lambda: f64,
) -> Objective {
    let all: Vec<usize> = (0..vectors.len()).collect();
    batch_objective(
        LinearKind::SupportVectorMachine,
        model,
        vectors,
        labels,
        &all,
        l2_lambda,
    )
}

fn batch_objective(
    kind: LinearKind,
    model: &LinearModel,
    vectors: &[SparseVector],
    labels: &[Label],
    batch: &[usize],
    l2_lambda: f64,
) -> Objective {
    let n = batch.len() as f64;
    let mut loss = 0.0;
    let mut grad_weights: Vec<f64> = model.weights.iter().map(|w| l2_lambda * w).collect();
    let mut grad_bias = 0.0;
    for &i in batch {
        let x = &vectors[i];
        let s = model.score(x);
        let (example_loss, coeff) = match kind {
            LinearKind::LogisticRegression => {
                let y = labels[i].target();
                (softplus(s) - y * s, sigmoid(s) - y)
            }
            LinearKind::SupportVectorMachine => {
                let y = labels[i].sign();
                let margin = 1.0 - y * s;
                if margin > 0.0 {
                    (margin, -y)
                } else {
                    (0.0, 0.0)
                }
            }
        };
        loss += example_loss / n;
        if coeff != 0.0 {
            for &(j, w) in x.entries() {
                grad_weights[j] += coeff * w / n;
            }
            grad_bias += coeff / n;
        }
    }
    let sq_norm: f64 = model.weights.iter().map(|w| w * w).sum();
    Objective {
        loss: loss + 0.5 * l2_lambda * sq_norm,
        grad_weights,
        grad_bias,
    }
}

/// Mini-batch SGD on the mean cross-entropy objective.
pub fn train_lr(
    vectors: &[SparseVector],
    labels: &[Label],
    dim: usize,
    cfg: &TrainConfig,
) -> Result<LinearModel> {
    train_lr_with_history(vectors, labels, dim, cfg).map(|(m, _)| m)
}

/// Like [`train_lr`], also returning the full-data objective after each epoch.
pub fn train_lr_with_history(
    vectors: &[SparseVector],
    labels: &[Label],
    dim: usize,
    cfg: &TrainConfig,
) -> Result<(LinearModel, Vec<f64>)> {
    fit(LinearKind::LogisticRegression, vectors, labels, dim, cfg)
}

/// Pegasos-style SGD on the regularized hinge objective.
///
/// The step size decays as `lr / (1 + lr * l2 * t)` and the weights are
/// projected back onto the ball of radius `1 / sqrt(l2)` after each step.
pub fn train_svm(
    vectors: &[SparseVector],
    labels: &[Label],
    dim: usize,
    cfg: &TrainConfig,
) -> Result<LinearModel> {
    train_svm_with_history(vectors, labels, dim, cfg).map(|(m, _)| m)
}

pub fn train_svm_with_history(
    vectors: &[SparseVector],
    labels: &[Label],
    dim: usize,
    cfg: &TrainConfig,
) -> Result<(LinearModel, Vec<f64>)> {
    fit(LinearKind::SupportVectorMachine, vectors, labels, dim, cfg)
}

fn fit(
    kind: LinearKind,
    vectors: &[SparseVector],
    labels: &[Label],
    dim: usize,
    cfg: &TrainConfig,
) -> Result<(LinearModel, Vec<f64>)> {
    cfg.validate()?;
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            what: "vectors and labels",
            left: vectors.len(),
            right: labels.len(),
        });
    }
    if vectors.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if let Some(x) = vectors.iter().find(|x| x.dim_hint() > dim) {
        return Err(Error::DimensionMismatch(format!(
            "feature index {} outside dimension {dim}",
            x.dim_hint() - 1
        )));
    }

    let lambda = cfg.l2_lambda;
    let radius = (lambda > 0.0).then(|| 1.0 / lambda.sqrt());
    let mut model = LinearModel::zeros(dim, kind);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut step = 0usize;

    for epoch in 1..=cfg.epochs {
        fisher_yates(&mut order, &mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let obj = batch_objective(kind, &model, vectors, labels, batch, lambda);
            let eta = match kind {
                LinearKind::LogisticRegression => cfg.learning_rate,
                LinearKind::SupportVectorMachine => {
                    cfg.learning_rate / (1.0 + cfg.learning_rate * lambda * step as f64)
                }
            };
            for (w, g) in model.weights.iter_mut().zip(&obj.grad_weights) {
                *w -= eta * g;
            }
            model.bias -= eta * obj.grad_bias;
            if let (LinearKind::SupportVectorMachine, Some(radius)) = (kind, radius) {
                let norm = model.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
                if norm > radius {
                    let shrink = radius / norm;
                    model.weights.iter_mut().for_each(|w| *w *= shrink);
                }
            }
            step += 1;
        }
        let all: Vec<usize> = (0..vectors.len()).collect();
        let loss = batch_objective(kind, &model, vectors, labels, &all, lambda).loss;
        if !loss.is_finite() || model.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Diverged { epoch });
        }
        history.push(loss);
    }
    Ok((model, history))
}
