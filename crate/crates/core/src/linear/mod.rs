//! Linear classifiers over TF-IDF vectors: multinomial naive Bayes, logistic
//! regression, a linear SVM and the NB/LR interpolation.
//!
//! Every model reports a real-valued decision score (positive means Fake)
//! and `P(Fake) = sigmoid(score)`.

mod naive_bayes;
mod nblr;
mod sgd;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use naive_bayes::{train_nb, NaiveBayesModel};
pub use nblr::NbLrModel;
pub use sgd::{
    logistic_objective, svm_objective, train_lr, train_lr_with_history, train_svm,
    train_svm_with_history, LinearKind, LinearModel, Objective,
};

/// Mini-batch optimisation settings shared by the linear and neural trainers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            l2_lambda: 1e-4,
            epochs: 20,
            batch_size: 32,
            seed: 13,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if !(self.l2_lambda.is_finite() && self.l2_lambda >= 0.0) {
            return Err(Error::InvalidConfig("l2_lambda must be >= 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_invariants() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig {
                learning_rate: 0.0,
                ..Default::default()
            },
            TrainConfig {
                l2_lambda: -1.0,
                ..Default::default()
            },
            TrainConfig {
                epochs: 0,
                ..Default::default()
            },
            TrainConfig {
                batch_size: 0,
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }
}
