//! Binary classification metrics with Fake as the positive class.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub fake: ClassMetrics,
    pub real: ClassMetrics,
    pub macro_f1: f64,
    /// Support-weighted mean of the per-class F1 scores.
    pub weighted_f1: f64,
    pub confusion: Confusion,
}

impl MetricsReport {
    pub fn class(&self, label: Label) -> &ClassMetrics {
        match label {
            Label::Fake => &self.fake,
            Label::Real => &self.real,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn class_metrics(tp: usize, fp: usize, fn_: usize) -> ClassMetrics {
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    ClassMetrics {
        precision,
        recall,
        f1,
        support: tp + fn_,
    }
}

/// Accuracy, per-class precision/recall/F1 (0/0 counts as 0) and weighted F1.
pub fn compute_metrics(truth: &[Label], predicted: &[Label]) -> Result<MetricsReport> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            what: "truth and predicted labels",
            left: truth.len(),
            right: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::NoPredictions);
    }
    let mut c = Confusion {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t, p) {
            (Label::Fake, Label::Fake) => c.tp += 1,
            (Label::Real, Label::Fake) => c.fp += 1,
            (Label::Real, Label::Real) => c.tn += 1,
            (Label::Fake, Label::Real) => c.fn_ += 1,
        }
    }
    let n = truth.len();
    let fake = class_metrics(c.tp, c.fp, c.fn_);
    let real = class_metrics(c.tn, c.fn_, c.fp);
    let weighted_f1 = (fake.support as f64 * fake.f1 + real.support as f64 * real.f1) / n as f64;
    Ok(MetricsReport {
        accuracy: ratio(c.tp + c.tn, n),
        fake,
        real,
        macro_f1: (fake.f1 + real.f1) / 2.0,
        weighted_f1,
        confusion: c,
    })
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "acc {:.4}  weighted-F1 {:.4}  F1(fake) {:.4}  F1(real) {:.4}",
            self.accuracy, self.weighted_f1, self.fake.f1, self.real.f1
        )
    }
}
