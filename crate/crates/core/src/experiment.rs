//! Train / evaluate driver behind `fakenews train`.
//!
//! Members are trained one after another in a fixed order (nb, lr, svm,
//! nblr, lstm, bilstm), each from its own seed, so a run is a pure function
//! of the config and the data files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::archive::{
    neural_sequence, ArchivedModel, ClassicalFeatures, FeaturePipeline, ModelArchive,
    NeuralFeatures,
};
use crate::config::ExperimentConfig;
use crate::corpus::{Corpus, Label};
use crate::ensemble::{self, DocumentFeatures, ModelKind, TrainedModel};
use crate::error::{Error, Result};
use crate::features::{SequenceEncoding, SparseVector, Vocabulary};
use crate::linear::{train_lr, train_nb, train_svm, NbLrModel};
use crate::metrics::{compute_metrics, MetricsReport};
use crate::neural::{train_neural, Architecture};
use crate::preprocess::PipelineKind;

pub const REPORT_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";
pub const MODELS_DIR: &str = "models";
pub const ARCHIVE_EXTENSION: &str = "model";

/// Machine-readable results: `results[split][model]` is a [`MetricsReport`].
///
/// The `train` split is the training-fit score; `validation` and `test`
/// appear when the config names those files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    pub seed: u64,
    pub splits: Vec<String>,
    pub models: Vec<String>,
    pub results: BTreeMap<String, BTreeMap<String, MetricsReport>>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn weighted_f1(&self, split: &str, model: &str) -> Option<f64> {
        self.results.get(split)?.get(model).map(|m| m.weighted_f1)
    }

    /// Weighted F1 per model (rows) and split (columns).
    pub fn table(&self) -> String {
        let width = self
            .models
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(5)
            .max(5);
        let mut out = format!("{:width$}", "model");
        for split in &self.splits {
            let _ = write!(out, "  {split:>10}");
        }
        out.push('\n');
        for model in &self.models {
            let _ = write!(out, "{model:width$}");
            for split in &self.splits {
                match self.weighted_f1(split, model) {
                    Some(f1) => {
                        let _ = write!(out, "  {f1:>10.4}");
                    }
                    None => {
                        let _ = write!(out, "  {:>10}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

pub struct ExperimentOutcome {
    pub report: ExperimentReport,
    /// One archive per trained model and per ensemble, in report order.
    pub archives: Vec<ModelArchive>,
}

impl ExperimentOutcome {
    /// Writes `report.json` and `models/<name>.model` under `out`.
    pub fn write(&self, out: impl AsRef<Path>) -> Result<()> {
        let out = out.as_ref();
        let models = out.join(MODELS_DIR);
        fs::create_dir_all(&models).map_err(|e| Error::io(&models, e))?;
        let report = out.join(REPORT_FILE);
        fs::write(&report, self.report.to_json()).map_err(|e| Error::io(&report, e))?;
        for archive in &self.archives {
            archive.save(models.join(format!("{}.{ARCHIVE_EXTENSION}", archive.name)))?;
        }
        Ok(())
    }
}

struct Split {
    name: &'static str,
    labels: Vec<Label>,
    features: Vec<DocumentFeatures>,
}

/// Features for every document of `corpus` under `pipeline`.
pub fn corpus_features(pipeline: &FeaturePipeline, corpus: &Corpus) -> Vec<DocumentFeatures> {
    corpus.texts().map(|t| pipeline.features(t)).collect()
}

/// Fits the vocabularies the configured models need on the training corpus.
pub fn fit_pipeline(
    train: &Corpus,
    classical: bool,
    neural: bool,
    min_df: usize,
    max_len: usize,
) -> Result<FeaturePipeline> {
    Ok(FeaturePipeline {
        classical: if classical {
            Some(ClassicalFeatures {
                vocabulary: Vocabulary::fit(train, PipelineKind::Classical, min_df)?,
            })
        } else {
            None
        },
        neural: if neural {
            Some(NeuralFeatures {
                vocabulary: Vocabulary::fit(train, PipelineKind::Neural, min_df)?,
                max_len,
            })
        } else {
            None
        },
    })
}

fn load_split(name: &'static str, path: &Path, pipeline: &FeaturePipeline) -> Result<Split> {
    let corpus = Corpus::load_tsv(path, true)?;
    Ok(Split {
        name,
        labels: corpus.labels()?,
        features: corpus_features(pipeline, &corpus),
    })
}

fn member<T>(kind: ModelKind, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::MemberTraining {
        member: kind.to_string(),
        source: Box::new(e),
    })
}

/// Trains every configured model on the training split.
fn train_members(
    cfg: &ExperimentConfig,
    pipeline: &FeaturePipeline,
    train_corpus: &Corpus,
    train: &Split,
) -> Result<BTreeMap<ModelKind, TrainedModel>> {
    let m = &cfg.models;
    let mut trained = BTreeMap::new();
    let tfidf: Vec<SparseVector> = train
        .features
        .iter()
        .filter_map(|f| f.tfidf.clone())
        .collect();
    let dim = pipeline
        .classical
        .as_ref()
        .map_or(0, |c| c.vocabulary.len());

    let mut nb_model = None;
    let mut lr_model = None;
    if let Some(nb) = &m.nb {
        let model = member(
            ModelKind::Nb,
            train_nb(&tfidf, &train.labels, dim, nb.alpha),
        )?;
        nb_model = Some(model.clone());
        trained.insert(ModelKind::Nb, TrainedModel::NaiveBayes(model));
    }
    if let Some(lr) = &m.lr {
        let model = member(
            ModelKind::Lr,
            train_lr(&tfidf, &train.labels, dim, &lr.config),
        )?;
        lr_model = Some(model.clone());
        trained.insert(ModelKind::Lr, TrainedModel::Linear(model));
    }
    if let Some(svm) = &m.svm {
        let model = member(
            ModelKind::Svm,
            train_svm(&tfidf, &train.labels, dim, &svm.config),
        )?;
        trained.insert(ModelKind::Svm, TrainedModel::Linear(model));
    }
    if let (Some(opts), Some(nb), Some(lr)) = (&m.nblr, nb_model, lr_model) {
        let model = member(
            ModelKind::Nblr,
            NbLrModel::new(nb, lr, opts.beta, opts.gate),
        )?;
        trained.insert(ModelKind::Nblr, TrainedModel::NbLr(model));
    }

    if let Some(neural) = &pipeline.neural {
        let seqs: Vec<SequenceEncoding> = train_corpus
            .texts()
            .map(|t| neural_sequence(&neural.vocabulary, t, neural.max_len))
            .collect();
        let slots = neural.vocabulary.sequence_vocab_size();
        for (kind, block, arch) in [
            (ModelKind::Lstm, &m.lstm, Architecture::Unidirectional),
            (ModelKind::Bilstm, &m.bilstm, Architecture::Bidirectional),
        ] {
            if let Some(block) = block {
                let model = member(
                    kind,
                    train_neural(&seqs, &train.labels, slots, arch, &block.config),
                )?;
                trained.insert(kind, TrainedModel::Neural(model));
            }
        }
    }
    Ok(trained)
}

fn evaluate(
    split: &Split,
    predict: impl Fn(&DocumentFeatures) -> Result<ensemble::Prediction>,
) -> Result<MetricsReport> {
    let predicted = split
        .features
        .iter()
        .map(|f| predict(f).map(|p| p.label))
        .collect::<Result<Vec<_>>>()?;
    compute_metrics(&split.labels, &predicted)
}

fn restrict(pipeline: &FeaturePipeline, classical: bool, neural: bool) -> FeaturePipeline {
    FeaturePipeline {
        classical: pipeline.classical.clone().filter(|_| classical),
        neural: pipeline.neural.clone().filter(|_| neural),
    }
}

/// Runs the whole protocol: fit features on the training file, train each
/// configured model, then score every model and ensemble on every split.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let configured = cfg.models.configured();
    let needs = |p: PipelineKind| configured.iter().any(|k| k.pipeline() == p);
    let train_corpus = Corpus::load_tsv(&cfg.data.train, true)?;
    let pipeline = fit_pipeline(
        &train_corpus,
        needs(PipelineKind::Classical),
        needs(PipelineKind::Neural),
        cfg.features.min_df,
        cfg.features.max_len,
    )?;

    let mut splits = vec![Split {
        name: "train",
        labels: train_corpus.labels()?,
        features: corpus_features(&pipeline, &train_corpus),
    }];
    if let Some(p) = &cfg.data.validation {
        splits.push(load_split("validation", p, &pipeline)?);
    }
    if let Some(p) = &cfg.data.test {
        splits.push(load_split("test", p, &pipeline)?);
    }

    let trained = train_members(cfg, &pipeline, &train_corpus, &splits[0])?;

    let mut archives = Vec::new();
    for (&kind, model) in &trained {
        let p = kind.pipeline();
        archives.push(ModelArchive {
            name: kind.to_string(),
            features: restrict(
                &pipeline,
                p == PipelineKind::Classical,
                p == PipelineKind::Neural,
            ),
            model: ArchivedModel::Single {
                name: kind,
                model: model.clone(),
            },
        });
    }
    for e in &cfg.ensembles {
        let members = e
            .config
            .members()
            .iter()
            .map(|k| (*k, trained[k].clone()))
            .collect();
        archives.push(ModelArchive {
            name: e.name.clone(),
            features: restrict(
                &pipeline,
                e.config.needs(PipelineKind::Classical),
                e.config.needs(PipelineKind::Neural),
            ),
            model: ArchivedModel::Ensemble {
                config: e.config.clone(),
                members,
            },
        });
    }

    let mut results = BTreeMap::new();
    for split in &splits {
        let mut row = BTreeMap::new();
        for (&kind, model) in &trained {
            row.insert(kind.to_string(), evaluate(split, |f| model.predict(f))?);
        }
        for e in &cfg.ensembles {
            let metrics = evaluate(split, |f| ensemble::classify(&e.config, &trained, f))?;
            row.insert(e.name.clone(), metrics);
        }
        results.insert(split.name.to_string(), row);
    }

    let report = ExperimentReport {
        format_version: REPORT_VERSION,
        seed: cfg.seed,
        splits: splits.iter().map(|s| s.name.to_string()).collect(),
        models: archives.iter().map(|a| a.name.clone()).collect(),
        results,
    };
    Ok(ExperimentOutcome { report, archives })
}
