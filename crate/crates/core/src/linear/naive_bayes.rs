use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::sigmoid;

/// Multinomial naive Bayes with Laplace smoothing.
///
/// Feature values are used as (possibly fractional) counts, so it accepts
/// TF-IDF weights as well as raw term counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    /// `[fake, real]`
    log_prior: [f64; 2],
    /// `[fake, real]`, each of vocabulary length.
    log_likelihood: [Vec<f64>; 2],
    alpha: f64,
}

fn class_slot(label: Label) -> usize {
    match label {
        Label::Fake => 0,
        Label::Real => 1,
    }
}

pub fn train_nb(
    vectors: &[SparseVector],
    labels: &[Label],
    vocab_size: usize,
    alpha: f64,
) -> Result<NaiveBayesModel> {
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            what: "vectors and labels",
            left: vectors.len(),
            right: labels.len(),
        });
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidConfig("naive Bayes alpha must be > 0".into()));
    }
    let mut doc_counts = [0usize; 2];
    let mut mass = [vec![0.0; vocab_size], vec![0.0; vocab_size]];
    for (x, &label) in vectors.iter().zip(labels) {
        let c = class_slot(label);
        doc_counts[c] += 1;
        for &(i, w) in x.entries() {
            if i >= vocab_size {
                return Err(Error::DimensionMismatch(format!(
                    "feature index {i} outside vocabulary of {vocab_size}"
                )));
            }
            mass[c][i] += w;
        }
    }
    for label in Label::ALL {
        if doc_counts[class_slot(label)] == 0 {
            return Err(Error::MissingClass(label));
        }
    }
    let total = vectors.len() as f64;
    let log_prior = doc_counts.map(|n| (n as f64 / total).ln());
    let log_likelihood = mass.map(|m| {
        let denom = (m.iter().sum::<f64>() + alpha * vocab_size as f64).ln();
        m.iter().map(|&v| (v + alpha).ln() - denom).collect()
    });
    Ok(NaiveBayesModel {
        log_prior,
        log_likelihood,
        alpha,
    })
}

impl NaiveBayesModel {
    pub fn vocab_size(&self) -> usize {
        self.log_likelihood[0].len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn log_prior(&self, label: Label) -> f64 {
        self.log_prior[class_slot(label)]
    }

    pub fn log_likelihood(&self, label: Label) -> &[f64] {
        &self.log_likelihood[class_slot(label)]
    }

    /// Joint log-score of Fake minus that of Real.
    pub fn log_odds(&self, x: &SparseVector) -> f64 {
        let [fake, real] = &self.log_likelihood;
        let evidence: f64 = x
            .entries()
            .iter()
            .map(|&(i, w)| w * (fake[i] - real[i]))
            .sum();
        self.log_prior[0] - self.log_prior[1] + evidence
    }

    pub fn predict_proba(&self, x: &SparseVector) -> f64 {
        sigmoid(self.log_odds(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(pairs: &[(usize, f64)]) -> SparseVector {
        SparseVector::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn closed_form_likelihoods() {
        // fake: "w1 w1", real: "w2 w2" as raw counts over {w1, w2}.
        let model = train_nb(
            &[counts(&[(0, 2.0)]), counts(&[(1, 2.0)])],
            &[Label::Fake, Label::Real],
            2,
            1.0,
        )
        .unwrap();
        let fake = model.log_likelihood(Label::Fake);
        assert!((fake[0].exp() - 0.75).abs() < 1e-12);
        assert!((fake[1].exp() - 0.25).abs() < 1e-12);

        let lo = model.log_odds(&counts(&[(0, 1.0)]));
        assert!((lo - 3f64.ln()).abs() < 1e-12);
        assert!((model.predict_proba(&counts(&[(0, 1.0)])) - 0.75).abs() < 1e-12);
        // No evidence: prior difference only, which is zero here.
        assert_eq!(model.log_odds(&SparseVector::default()), 0.0);
    }

    #[test]
    fn priors_follow_counts() {
        let x = counts(&[(0, 1.0)]);
        let model = train_nb(
            &[x.clone(), x.clone(), x.clone(), x],
            &[Label::Fake, Label::Fake, Label::Fake, Label::Real],
            1,
            1.0,
        )
        .unwrap();
        assert!((model.log_prior(Label::Fake) - 0.75f64.ln()).abs() < 1e-15);
        let total: f64 = Label::ALL.iter().map(|&l| model.log_prior(l).exp()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_model_is_undecided() {
        let model = train_nb(
            &[counts(&[(0, 1.0), (1, 1.0)]), counts(&[(0, 1.0), (1, 1.0)])],
            &[Label::Fake, Label::Real],
            2,
            0.5,
        )
        .unwrap();
        let p = model.predict_proba(&counts(&[(0, 0.3), (1, 0.3)]));
        assert_eq!(p, 0.5);
    }

    #[test]
    fn one_class_only_is_an_error() {
        let err = train_nb(&[counts(&[(0, 1.0)])], &[Label::Fake], 1, 1.0).unwrap_err();
        assert!(matches!(err, Error::MissingClass(Label::Real)));
    }

    #[test]
    fn likelihoods_normalize() {
        let model = train_nb(
            &[counts(&[(0, 0.4), (2, 0.9)]), counts(&[(1, 0.7)])],
            &[Label::Fake, Label::Real],
            3,
            1.0,
        )
        .unwrap();
        for label in Label::ALL {
            let s: f64 = model.log_likelihood(label).iter().map(|l| l.exp()).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}
