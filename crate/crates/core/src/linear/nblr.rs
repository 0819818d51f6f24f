use serde::{Deserialize, Serialize};

use super::{LinearKind, LinearModel, NaiveBayesModel};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::sigmoid;

/// Naive Bayes and logistic regression blended in log-odds space.
///
/// Without a gate the score is `beta * s_lr + (1 - beta) * s_nb`. With
/// `gate = Some(t)` the model instead trusts naive Bayes unless the logistic
/// regression is at least `t` confident (`max(p, 1 - p) >= t`), in which case
/// the LR score is used on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbLrModel {
    nb: NaiveBayesModel,
    lr: LinearModel,
    beta: f64,
    gate: Option<f64>,
}

impl NbLrModel {
    pub fn new(nb: NaiveBayesModel, lr: LinearModel, beta: f64, gate: Option<f64>) -> Result<Self> {
        if lr.kind != LinearKind::LogisticRegression {
            return Err(Error::InvalidConfig(
                "NB+LR needs a logistic-regression submodel".into(),
            ));
        }
        if nb.vocab_size() != lr.dim() {
            return Err(Error::DimensionMismatch(format!(
                "naive Bayes vocabulary {} vs logistic regression {}",
                nb.vocab_size(),
                lr.dim()
            )));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidConfig(format!("beta {beta} outside [0, 1]")));
        }
        if let Some(t) = gate {
            if !(0.5..=1.0).contains(&t) {
                return Err(Error::InvalidConfig(format!(
                    "gate threshold {t} outside [0.5, 1]"
                )));
            }
        }
        Ok(NbLrModel { nb, lr, beta, gate })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gate(&self) -> Option<f64> {
        self.gate
    }

    pub fn naive_bayes(&self) -> &NaiveBayesModel {
        &self.nb
    }

    pub fn logistic(&self) -> &LinearModel {
        &self.lr
    }

    pub fn score(&self, x: &SparseVector) -> f64 {
        let s_lr = self.lr.score(x);
        let s_nb = self.nb.log_odds(x);
        combine(s_lr, s_nb, self.beta, self.gate)
    }

    pub fn predict_proba(&self, x: &SparseVector) -> f64 {
        sigmoid(self.score(x))
    }

    pub fn predict(&self, x: &SparseVector) -> Label {
        Label::from_score(self.score(x))
    }
}

fn combine(s_lr: f64, s_nb: f64, beta: f64, gate: Option<f64>) -> f64 {
    match gate {
        Some(threshold) => {
            let p = sigmoid(s_lr);
            if p.max(1.0 - p) >= threshold {
                s_lr
            } else {
                s_nb
            }
        }
        None if beta == 1.0 => s_lr,
        None if beta == 0.0 => s_nb,
        None => beta * s_lr + (1.0 - beta) * s_nb,
    }
}
