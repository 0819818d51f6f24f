use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lstm::{LstmParams, Matrix, StepCache};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::{SequenceEncoding, PAD_INDEX};
use crate::{sigmoid, softplus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Unidirectional,
    Bidirectional,
}

/// Embedding layer, one or two LSTM cells and a logistic output head.
///
/// The unidirectional feature is the last unmasked hidden state; the
/// bidirectional feature concatenates that with the final state of the
/// backward cell run over the reversed unmasked sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmClassifier {
    /// `(vocab + 2) x embed_dim`; row 0 is padding and stays zero.
    pub embedding: Matrix,
    pub forward_cell: LstmParams,
    pub backward_cell: Option<LstmParams>,
    pub head: Vec<f64>,
    pub head_bias: f64,
    pub max_len: usize,
}

/// Loss, prediction and exact gradients for one labeled sequence.
#[derive(Debug, Clone)]
pub struct Backprop {
    pub loss: f64,
    pub p_fake: f64,
    pub grads: LstmGradients,
}

/// Gradients shaped like an [`LstmClassifier`], with embedding gradients
/// kept only for rows the sequence touched.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmGradients {
    pub embedding_rows: BTreeMap<usize, Vec<f64>>,
    pub forward_cell: LstmParams,
    pub backward_cell: Option<LstmParams>,
    pub head: Vec<f64>,
    pub head_bias: f64,
}

struct ForwardPass {
    tokens: Vec<usize>,
    forward: Vec<StepCache>,
    backward: Option<Vec<StepCache>>,
    feature: Vec<f64>,
    logit: f64,
}

impl LstmClassifier {
    pub fn zeros(
        vocab_slots: usize,
        embed_dim: usize,
        hidden_dim: usize,
        max_len: usize,
        arch: Architecture,
    ) -> Self {
        let feature_dim = match arch {
            Architecture::Unidirectional => hidden_dim,
            Architecture::Bidirectional => 2 * hidden_dim,
        };
        LstmClassifier {
            embedding: Matrix::zeros(vocab_slots, embed_dim),
            forward_cell: LstmParams::zeros(embed_dim, hidden_dim),
            backward_cell: (arch == Architecture::Bidirectional)
                .then(|| LstmParams::zeros(embed_dim, hidden_dim)),
            head: vec![0.0; feature_dim],
            head_bias: 0.0,
            max_len,
        }
    }

    /// Every parameter drawn from `uniform(-scale, scale)`, padding row zeroed.
    pub fn uniform<R: Rng>(
        vocab_slots: usize,
        embed_dim: usize,
        hidden_dim: usize,
        max_len: usize,
        arch: Architecture,
        scale: f64,
        rng: &mut R,
    ) -> Self {
        let mut embedding = Matrix::uniform(vocab_slots, embed_dim, scale, rng);
        if vocab_slots > 0 {
            embedding.row_mut(PAD_INDEX).fill(0.0);
        }
        let forward_cell = LstmParams::uniform(embed_dim, hidden_dim, scale, rng);
        let backward_cell = (arch == Architecture::Bidirectional)
            .then(|| LstmParams::uniform(embed_dim, hidden_dim, scale, rng));
        let feature_dim = hidden_dim * if backward_cell.is_some() { 2 } else { 1 };
        let head = (0..feature_dim)
            .map(|_| rng.gen_range(-scale..scale))
            .collect();
        let head_bias = rng.gen_range(-scale..scale);
        LstmClassifier {
            embedding,
            forward_cell,
            backward_cell,
            head,
            head_bias,
            max_len,
        }
    }

    pub fn architecture(&self) -> Architecture {
        if self.backward_cell.is_some() {
            Architecture::Bidirectional
        } else {
            Architecture::Unidirectional
        }
    }

    pub fn embed_dim(&self) -> usize {
        self.embedding.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.forward_cell.hidden_dim
    }

    pub fn vocab_slots(&self) -> usize {
        self.embedding.rows()
    }

    fn effective_tokens(&self, seq: &SequenceEncoding) -> Result<Vec<usize>> {
        let tokens = seq.unmasked();
        if tokens.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(&t) = tokens.iter().find(|&&t| t >= self.vocab_slots()) {
            return Err(Error::DimensionMismatch(format!(
                "token index {t} outside embedding table of {} rows",
                self.vocab_slots()
            )));
        }
        Ok(tokens)
    }

    fn run(&self, seq: &SequenceEncoding) -> Result<ForwardPass> {
        let tokens = self.effective_tokens(seq)?;
        let inputs: Vec<&[f64]> = tokens.iter().map(|&t| self.embedding.row(t)).collect();
        let forward = self.forward_cell.forward_cached(&inputs)?;
        let mut feature = forward.last().expect("non-empty").h.clone();
        let backward = match &self.backward_cell {
            Some(cell) => {
                let reversed: Vec<&[f64]> = inputs.iter().rev().copied().collect();
                let steps = cell.forward_cached(&reversed)?;
                feature.extend_from_slice(&steps.last().expect("non-empty").h);
                Some(steps)
            }
            None => None,
        };
        if feature.len() != self.head.len() {
            return Err(Error::DimensionMismatch(format!(
                "head of length {} for a feature of length {}",
                self.head.len(),
                feature.len()
            )));
        }
        let logit = self.head_bias
            + self
                .head
                .iter()
                .zip(&feature)
                .map(|(w, f)| w * f)
                .sum::<f64>();
        Ok(ForwardPass {
            tokens,
            forward,
            backward,
            feature,
            logit,
        })
    }

    /// The pooled recurrent feature vector fed to the head.
    pub fn feature(&self, seq: &SequenceEncoding) -> Result<Vec<f64>> {
        Ok(self.run(seq)?.feature)
    }

    pub fn logit(&self, seq: &SequenceEncoding) -> Result<f64> {
        Ok(self.run(seq)?.logit)
    }

    /// `P(Fake)` for one encoded document. Padding positions are skipped.
    pub fn classify_forward(&self, seq: &SequenceEncoding) -> Result<f64> {
        Ok(sigmoid(self.logit(seq)?))
    }

    pub fn predict(&self, seq: &SequenceEncoding) -> Result<Label> {
        Ok(Label::from_score(self.logit(seq)?))
    }

    /// Binary cross-entropy of the prediction against `label`.
    pub fn loss(&self, seq: &SequenceEncoding, label: Label) -> Result<f64> {
        let s = self.logit(seq)?;
        Ok(softplus(s) - label.target() * s)
    }

    /// Exact gradients of the cross-entropy loss via backprop through time.
    pub fn bptt_gradients(&self, seq: &SequenceEncoding, label: Label) -> Result<Backprop> {
        let pass = self.run(seq)?;
        let y = label.target();
        let p_fake = sigmoid(pass.logit);
        let loss = softplus(pass.logit) - y * pass.logit;
        let dlogit = p_fake - y;

        let hd = self.hidden_dim();
        let head: Vec<f64> = pass.feature.iter().map(|f| dlogit * f).collect();
        let dfeature: Vec<f64> = self.head.iter().map(|w| dlogit * w).collect();

        let mut forward_grads = LstmParams::zeros(self.embed_dim(), hd);
        let dx_forward =
            self.forward_cell
                .backward(&pass.forward, &dfeature[..hd], &mut forward_grads);

        let mut embedding_rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let mut add_row = |token: usize, dx: &[f64]| {
            let row = embedding_rows
                .entry(token)
                .or_insert_with(|| vec![0.0; dx.len()]);
            for (r, d) in row.iter_mut().zip(dx) {
                *r += d;
            }
        };
        for (&token, dx) in pass.tokens.iter().zip(&dx_forward) {
            add_row(token, dx);
        }

        let backward_cell = match (&self.backward_cell, &pass.backward) {
            (Some(cell), Some(steps)) => {
                let mut grads = LstmParams::zeros(self.embed_dim(), hd);
                let dx_backward = cell.backward(steps, &dfeature[hd..], &mut grads);
                // Step t of the backward cell read token T-1-t.
                for (&token, dx) in pass.tokens.iter().rev().zip(&dx_backward) {
                    add_row(token, dx);
                }
                Some(grads)
            }
            _ => None,
        };

        Ok(Backprop {
            loss,
            p_fake,
            grads: LstmGradients {
                embedding_rows,
                forward_cell: forward_grads,
                backward_cell,
                head,
                head_bias: dlogit,
            },
        })
    }

    /// Same shape, all zeros.
    pub fn zeros_like(&self) -> Self {
        LstmClassifier::zeros(
            self.vocab_slots(),
            self.embed_dim(),
            self.hidden_dim(),
            self.max_len,
            self.architecture(),
        )
    }

    /// Adds `scale * grads` into this parameter set.
    pub fn accumulate(&mut self, grads: &LstmGradients, scale: f64) {
        for (&row, values) in &grads.embedding_rows {
            for (e, g) in self.embedding.row_mut(row).iter_mut().zip(values) {
                *e += scale * g;
            }
        }
        add_scaled(&mut self.forward_cell, &grads.forward_cell, scale);
        if let (Some(dst), Some(src)) = (&mut self.backward_cell, &grads.backward_cell) {
            add_scaled(dst, src, scale);
        }
        for (h, g) in self.head.iter_mut().zip(&grads.head) {
            *h += scale * g;
        }
        self.head_bias += scale * grads.head_bias;
    }

    /// Every parameter tensor, in a fixed order shared with [`Self::parameters`].
    pub fn parameters_mut(&mut self) -> Vec<&mut [f64]> {
        let LstmClassifier {
            embedding,
            forward_cell,
            backward_cell,
            head,
            head_bias,
            ..
        } = self;
        let mut out = vec![embedding.as_mut_slice()];
        out.extend(forward_cell.slices_mut());
        if let Some(cell) = backward_cell {
            out.extend(cell.slices_mut());
        }
        out.push(head.as_mut_slice());
        out.push(std::slice::from_mut(head_bias));
        out
    }

    pub fn parameters(&self) -> Vec<&[f64]> {
        let mut out = vec![self.embedding.as_slice()];
        out.extend(self.forward_cell.slices());
        if let Some(cell) = &self.backward_cell {
            out.extend(cell.slices());
        }
        out.push(self.head.as_slice());
        out.push(std::slice::from_ref(&self.head_bias));
        out
    }

    pub fn is_finite(&self) -> bool {
        self.parameters()
            .iter()
            .all(|s| s.iter().all(|v| v.is_finite()))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.embed_dim() != self.forward_cell.input_dim {
            return Err(Error::DimensionMismatch(
                "embedding and cell widths differ".into(),
            ));
        }
        if let Some(cell) = &self.backward_cell {
            if cell.input_dim != self.embed_dim() || cell.hidden_dim != self.hidden_dim() {
                return Err(Error::DimensionMismatch(
                    "backward cell shape differs".into(),
                ));
            }
        }
        let expect = self.hidden_dim() * if self.backward_cell.is_some() { 2 } else { 1 };
        if self.head.len() != expect {
            return Err(Error::DimensionMismatch(
                "head width does not match cells".into(),
            ));
        }
        Ok(())
    }
}

impl LstmGradients {
    /// Dense gradient tensors in [`LstmClassifier::parameters`] order.
    pub fn to_dense(&self, model: &LstmClassifier) -> LstmClassifier {
        let mut dense = model.zeros_like();
        dense.accumulate(self, 1.0);
        dense
    }
}

fn add_scaled(dst: &mut LstmParams, src: &LstmParams, scale: f64) {
    for (d, s) in dst.slices_mut().into_iter().zip(src.slices()) {
        for (a, b) in d.iter_mut().zip(s) {
            *a += scale * b;
        }
    }
}
