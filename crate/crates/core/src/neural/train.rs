use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::AdamState;
use super::classifier::{Architecture, LstmClassifier};
use crate::corpus::{fisher_yates, Label};
use crate::error::{Error, Result};
use crate::features::{SequenceEncoding, PAD_INDEX};
use crate::linear::TrainConfig;

const INIT_SCALE: f64 = 0.05;

/// Layer sizes plus optimiser settings for one recurrent classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuralConfig {
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub train: TrainConfig,
}

impl Default for NeuralConfig {
    fn default() -> Self {
        NeuralConfig {
            embed_dim: 64,
            hidden_dim: 64,
            train: TrainConfig {
                learning_rate: 1e-3,
                l2_lambda: 0.0,
                epochs: 10,
                batch_size: 32,
                seed: 13,
            },
        }
    }
}

impl NeuralConfig {
    pub fn validate(&self) -> Result<()> {
        if self.embed_dim == 0 || self.hidden_dim == 0 {
            return Err(Error::InvalidConfig(
                "embed_dim and hidden_dim must be >= 1".into(),
            ));
        }
        self.train.validate()
    }
}

/// Trains with mini-batch Adam on the mean cross-entropy.
///
/// `vocab_slots` is the embedding table height (vocabulary size plus the
/// padding and unknown slots).
pub fn train_neural(
    sequences: &[SequenceEncoding],
    labels: &[Label],
    vocab_slots: usize,
    arch: Architecture,
    cfg: &NeuralConfig,
) -> Result<LstmClassifier> {
    train_neural_with_history(sequences, labels, vocab_slots, arch, cfg).map(|(m, _)| m)
}

/// Like [`train_neural`], also returning the mean training loss of each epoch.
pub fn train_neural_with_history(
    sequences: &[SequenceEncoding],
    labels: &[Label],
    vocab_slots: usize,
    arch: Architecture,
    cfg: &NeuralConfig,
) -> Result<(LstmClassifier, Vec<f64>)> {
    cfg.validate()?;
    if sequences.len() != labels.len() {
        return Err(Error::LengthMismatch {
            what: "sequences and labels",
            left: sequences.len(),
            right: labels.len(),
        });
    }
    if sequences.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let max_len = sequences
        .iter()
        .map(SequenceEncoding::max_len)
        .max()
        .unwrap_or(0);
    let tc = cfg.train;
    let mut rng = ChaCha8Rng::seed_from_u64(tc.seed);
    let mut model = LstmClassifier::uniform(
        vocab_slots,
        cfg.embed_dim,
        cfg.hidden_dim,
        max_len,
        arch,
        INIT_SCALE,
        &mut rng,
    );
    let mut adam = AdamState::new(tc.learning_rate);
    let mut order: Vec<usize> = (0..sequences.len()).collect();
    let mut history = Vec::with_capacity(tc.epochs);

    for epoch in 1..=tc.epochs {
        fisher_yates(&mut order, &mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(tc.batch_size) {
            let scale = 1.0 / batch.len() as f64;
            let mut acc = model.zeros_like();
            for &i in batch {
                let bp = model.bptt_gradients(&sequences[i], labels[i])?;
                epoch_loss += bp.loss;
                acc.accumulate(&bp.grads, scale);
            }
            if tc.l2_lambda > 0.0 {
                for (g, p) in acc.parameters_mut().into_iter().zip(model.parameters()) {
                    for (gk, pk) in g.iter_mut().zip(p) {
                        *gk += tc.l2_lambda * pk;
                    }
                }
                acc.embedding.row_mut(PAD_INDEX).fill(0.0);
            }
            if !epoch_loss.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            adam.step(&mut model.parameters_mut(), &acc.parameters())
                .map_err(|e| match e {
                    Error::NonFiniteGradient => Error::Diverged { epoch },
                    other => other,
                })?;
        }
        if !model.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        history.push(epoch_loss / sequences.len() as f64);
    }
    Ok((model, history))
}
