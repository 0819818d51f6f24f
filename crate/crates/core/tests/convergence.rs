mod common;

use fakenews::archive::neural_sequence;
use fakenews::linear::{train_lr, train_nb, train_svm, TrainConfig};
use fakenews::neural::{train_neural, Architecture, NeuralConfig};
use fakenews::toy::{hoax_corpus, HOAX_HELD_OUT};
use fakenews::{preprocess, PipelineKind, Vocabulary};

#[test]
fn default_configs_fit_the_separable_corpus() {
    common::convergence().expect_pass();
}

// Eight documents give the neural defaults only ten optimiser steps, so this
// runs longer at a higher rate.
#[test]
fn recurrent_models_learn_the_hoax_cue() {
    let corpus = hoax_corpus();
    let labels = corpus.labels().unwrap();
    let vocab = Vocabulary::fit(&corpus, PipelineKind::Neural, 1).unwrap();
    let seqs: Vec<_> = corpus
        .texts()
        .map(|t| neural_sequence(&vocab, t, 16))
        .collect();
    let mut cfg = NeuralConfig {
        embed_dim: 16,
        hidden_dim: 16,
        ..NeuralConfig::default()
    };
    cfg.train.learning_rate = 1e-2;
    cfg.train.epochs = 50;
    for arch in [Architecture::Unidirectional, Architecture::Bidirectional] {
        let model = train_neural(&seqs, &labels, vocab.sequence_vocab_size(), arch, &cfg).unwrap();
        let p = model
            .classify_forward(&neural_sequence(&vocab, HOAX_HELD_OUT, 16))
            .unwrap();
        assert!(p > 0.5, "{arch:?}: P(Fake) = {p}");
    }
}

#[test]
fn linear_models_learn_the_hoax_cue() {
    let corpus = hoax_corpus();
    let labels = corpus.labels().unwrap();
    let vocab = Vocabulary::fit(&corpus, PipelineKind::Classical, 1).unwrap();
    let xs: Vec<_> = corpus
        .texts()
        .map(|t| vocab.tfidf(&preprocess(t, PipelineKind::Classical)))
        .collect();
    let held_out = vocab.tfidf(&preprocess(HOAX_HELD_OUT, PipelineKind::Classical));
    let cfg = TrainConfig {
        epochs: 200,
        ..TrainConfig::default()
    };
    let nb = train_nb(&xs, &labels, vocab.len(), 1.0).unwrap();
    let lr = train_lr(&xs, &labels, vocab.len(), &cfg).unwrap();
    let svm = train_svm(&xs, &labels, vocab.len(), &cfg).unwrap();
    assert!(nb.predict_proba(&held_out) > 0.5);
    assert!(lr.predict_proba(&held_out) > 0.5);
    assert!(svm.predict_proba(&held_out) > 0.5);
}
