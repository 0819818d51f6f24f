//! Small synthetic corpora used by tests, the acceptance suite and the README.
//!
//! Every document in [`separable_corpus`] carries exactly one class cue word
//! ("hoax", "fabricated", ... for Fake; "confirmed", "official", ... for Real)
//! among shared filler words, so a bag-of-words or recurrent model can
//! separate the classes perfectly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Label, LabeledDocument};

pub const FAKE_CUES: [&str; 4] = ["hoax", "fabricated", "conspiracy", "miracle"];
pub const REAL_CUES: [&str; 4] = ["confirmed", "official", "ministry", "tested"];
pub const FILLER: [&str; 16] = [
    "covid", "vaccine", "people", "cases", "today", "new", "health", "report", "virus", "says",
    "state", "week", "news", "data", "city", "update",
];

fn doc(id: String, text: String, label: Label) -> LabeledDocument {
    LabeledDocument {
        id,
        text,
        label: Some(label),
    }
}

/// The two-document corpus `["a b", "a c"]`.
pub fn tfidf_fixture() -> Corpus {
    Corpus::new(
        "tfidf-fixture",
        vec![
            doc("1".into(), "a b".into(), Label::Fake),
            doc("2".into(), "a c".into(), Label::Real),
        ],
    )
    .expect("static fixture is valid")
}

/// `per_class` Fake and `per_class` Real documents, interleaved. Each has
/// 3–7 filler words with one cue word inserted at a random position.
pub fn separable_corpus(per_class: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut documents = Vec::with_capacity(2 * per_class);
    for i in 0..per_class {
        for (label, cues) in [(Label::Fake, &FAKE_CUES), (Label::Real, &REAL_CUES)] {
            let len = rng.gen_range(3..=7);
            let mut words: Vec<&str> = (0..len)
                .map(|_| *FILLER.choose(&mut rng).unwrap())
                .collect();
            let at = rng.gen_range(0..=words.len());
            words.insert(at, cues.choose(&mut rng).unwrap());
            documents.push(doc(
                format!("{}-{i}", label.as_str()),
                words.join(" "),
                label,
            ));
        }
    }
    Corpus::new("separable", documents).expect("generated corpus is valid")
}

pub const CONVERGENCE_PER_CLASS: usize = 200;
pub const CONVERGENCE_SEED: u64 = 7;

/// The corpus on which every trainable model, with its default settings,
/// reaches 100% training accuracy: `separable_corpus(200, 7)`, 400 posts.
/// It is sized so that the neural defaults (10 epochs of batch 32 at
/// learning rate 1e-3) take enough optimiser steps.
pub fn convergence_corpus() -> Corpus {
    separable_corpus(CONVERGENCE_PER_CLASS, CONVERGENCE_SEED)
}

/// Eight short posts in which "hoax" occurs only in the Fake ones.
pub fn hoax_corpus() -> Corpus {
    let rows = [
        ("f1", "the vaccine is a hoax", Label::Fake),
        ("f2", "hoax spreading about masks", Label::Fake),
        ("f3", "another hoax from the news", Label::Fake),
        ("f4", "they say the virus is a hoax", Label::Fake),
        ("r1", "the vaccine trial results are out", Label::Real),
        ("r2", "masks reduce spread in the city", Label::Real),
        ("r3", "news from the health ministry", Label::Real),
        ("r4", "the virus cases fell this week", Label::Real),
    ];
    Corpus::new(
        "hoax",
        rows.iter()
            .map(|&(id, text, label)| doc(id.into(), text.into(), label))
            .collect(),
    )
    .expect("static fixture is valid")
}

/// Held-out text for [`hoax_corpus`]; a model that learned the cue calls it Fake.
pub const HOAX_HELD_OUT: &str = "this is a hoax";
