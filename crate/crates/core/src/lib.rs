//! Binary fake/real text classification for short social-media posts.
//!
//! The crate covers the whole pipeline: loading challenge-format TSV corpora,
//! lowercasing/tokenizing (plus Porter stemming for the recurrent models),
//! TF-IDF and padded index-sequence features, four linear classifiers
//! (multinomial naive Bayes, logistic regression, linear SVM and an NB/LR
//! interpolation), embedding + LSTM / biLSTM classifiers trained with BPTT
//! and Adam, soft- and majority-vote ensembles, metrics, model archives and
//! an experiment driver used by the `fakenews` binary.
//!
//! Everything is computed in `f64` and every stochastic step is driven by a
//! seeded generator, so identical inputs give bit-identical models.

pub mod archive;
pub mod config;
pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod features;
pub mod linear;
pub mod metrics;
pub mod neural;
pub mod preprocess;
pub mod toy;

pub use corpus::{Corpus, Label, LabeledDocument};
pub use error::{Error, Result};
pub use features::{SequenceEncoding, SparseVector, Vocabulary};
pub use preprocess::{preprocess, PipelineKind, TokenStream};

/// Logistic function, evaluated without overflow for large |x|.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}
