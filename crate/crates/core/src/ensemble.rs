//! Combining member classifiers by averaging probabilities or by majority vote.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::{SequenceEncoding, SparseVector};
use crate::linear::{LinearModel, NaiveBayesModel, NbLrModel};
use crate::neural::LstmClassifier;
use crate::preprocess::PipelineKind;

/// A member's `P(Fake)` and the label it implies (Fake iff `p_fake > 0.5`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub p_fake: f64,
    pub label: Label,
}

impl Prediction {
    pub fn new(p_fake: f64) -> Self {
        Prediction {
            p_fake,
            label: Label::from_probability(p_fake),
        }
    }
}

/// Arithmetic mean of the members' `P(Fake)`.
pub fn soft_vote(predictions: &[Prediction]) -> Result<Prediction> {
    if predictions.is_empty() {
        return Err(Error::NoPredictions);
    }
    let ps: Vec<f64> = predictions.iter().map(|p| p.p_fake).collect();
    Ok(Prediction::new(order_free_mean(ps)))
}

// Summing in sorted order makes the result independent of member order.
fn order_free_mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Label held by more than half of an odd number of members. The reported
/// probability is the mean `P(Fake)` of the members on the winning side.
pub fn majority_vote(predictions: &[Prediction]) -> Result<Prediction> {
    if predictions.is_empty() {
        return Err(Error::NoPredictions);
    }
    if predictions.len().is_multiple_of(2) {
        return Err(Error::EvenVoterCount(predictions.len()));
    }
    let fake_votes = predictions
        .iter()
        .filter(|p| p.label == Label::Fake)
        .count();
    let label = if 2 * fake_votes > predictions.len() {
        Label::Fake
    } else {
        Label::Real
    };
    let winners: Vec<f64> = predictions
        .iter()
        .filter(|p| p.label == label)
        .map(|p| p.p_fake)
        .collect();
    Ok(Prediction {
        p_fake: order_free_mean(winners),
        label,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Nb,
    Lr,
    Svm,
    Nblr,
    Lstm,
    Bilstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Nb,
        ModelKind::Lr,
        ModelKind::Svm,
        ModelKind::Nblr,
        ModelKind::Lstm,
        ModelKind::Bilstm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Nb => "nb",
            ModelKind::Lr => "lr",
            ModelKind::Svm => "svm",
            ModelKind::Nblr => "nblr",
            ModelKind::Lstm => "lstm",
            ModelKind::Bilstm => "bilstm",
        }
    }

    pub fn pipeline(self) -> PipelineKind {
        match self {
            ModelKind::Lstm | ModelKind::Bilstm => PipelineKind::Neural,
            _ => PipelineKind::Classical,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    SoftVote,
    MajorityVote,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    members: Vec<ModelKind>,
    strategy: Strategy,
}

impl EnsembleConfig {
    /// Members must be distinct and non-empty; majority voting needs an odd count.
    pub fn new(members: Vec<ModelKind>, strategy: Strategy) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidConfig("ensemble has no members".into()));
        }
        for (i, m) in members.iter().enumerate() {
            if members[..i].contains(m) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate ensemble member {m}"
                )));
            }
        }
        if strategy == Strategy::MajorityVote && members.len().is_multiple_of(2) {
            return Err(Error::EvenVoterCount(members.len()));
        }
        Ok(EnsembleConfig { members, strategy })
    }

    pub fn members(&self) -> &[ModelKind] {
        &self.members
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// The five-member ensemble: SVM, LR, NB, NB+LR and biLSTM under majority vote.
    pub fn five_member_majority() -> Self {
        EnsembleConfig {
            members: vec![
                ModelKind::Svm,
                ModelKind::Lr,
                ModelKind::Nb,
                ModelKind::Nblr,
                ModelKind::Bilstm,
            ],
            strategy: Strategy::MajorityVote,
        }
    }

    /// The classical trio: SVM, NB and NB+LR, averaged.
    pub fn classical_soft_vote() -> Self {
        EnsembleConfig {
            members: vec![ModelKind::Svm, ModelKind::Nb, ModelKind::Nblr],
            strategy: Strategy::SoftVote,
        }
    }

    pub fn needs(&self, pipeline: PipelineKind) -> bool {
        self.members.iter().any(|m| m.pipeline() == pipeline)
    }

    pub fn combine(&self, predictions: &[Prediction]) -> Result<Prediction> {
        match self.strategy {
            Strategy::SoftVote => soft_vote(predictions),
            Strategy::MajorityVote => majority_vote(predictions),
        }
    }
}

/// Features of one document in the form each model family consumes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocumentFeatures {
    pub tfidf: Option<SparseVector>,
    pub sequence: Option<SequenceEncoding>,
}

/// Any fitted single model.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TrainedModel {
    NaiveBayes(NaiveBayesModel),
    Linear(LinearModel),
    NbLr(NbLrModel),
    Neural(LstmClassifier),
}

impl TrainedModel {
    pub fn pipeline(&self) -> PipelineKind {
        match self {
            TrainedModel::Neural(_) => PipelineKind::Neural,
            _ => PipelineKind::Classical,
        }
    }

    pub fn predict(&self, features: &DocumentFeatures) -> Result<Prediction> {
        let missing = |what: &str| Error::InvalidConfig(format!("document has no {what} features"));
        let p = match self {
            TrainedModel::NaiveBayes(m) => {
                m.predict_proba(features.tfidf.as_ref().ok_or_else(|| missing("TF-IDF"))?)
            }
            TrainedModel::Linear(m) => {
                m.predict_proba(features.tfidf.as_ref().ok_or_else(|| missing("TF-IDF"))?)
            }
            TrainedModel::NbLr(m) => {
                m.predict_proba(features.tfidf.as_ref().ok_or_else(|| missing("TF-IDF"))?)
            }
            TrainedModel::Neural(m) => m.classify_forward(
                features
                    .sequence
                    .as_ref()
                    .ok_or_else(|| missing("sequence"))?,
            )?,
        };
        Ok(Prediction::new(p))
    }
}

/// Routes each member its features, collects predictions in config order,
/// then applies the configured strategy.
pub fn classify(
    config: &EnsembleConfig,
    members: &BTreeMap<ModelKind, TrainedModel>,
    features: &DocumentFeatures,
) -> Result<Prediction> {
    let predictions = member_predictions(config, members, features)?;
    config.combine(&predictions)
}

pub fn member_predictions(
    config: &EnsembleConfig,
    members: &BTreeMap<ModelKind, TrainedModel>,
    features: &DocumentFeatures,
) -> Result<Vec<Prediction>> {
    config
        .members()
        .iter()
        .map(|kind| {
            members
                .get(kind)
                .ok_or_else(|| Error::MissingMember(kind.to_string()))?
                .predict(features)
        })
        .collect()
}
