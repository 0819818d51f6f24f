//! Experiment configuration, read from TOML.
//!
//! See `configs/README.md` for the schema. A model is trained only if it has
//! a `[models.<name>]` table (which may be empty to accept the defaults).
//! Relative data paths resolve against the directory holding the file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleConfig, ModelKind, Strategy};
use crate::error::{Error, Result};
use crate::linear::TrainConfig;
use crate::neural::NeuralConfig;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: u64,
    data: DataPaths,
    #[serde(default)]
    features: FeatureOptions,
    #[serde(default)]
    models: RawModels,
    #[serde(default)]
    ensembles: Vec<RawEnsemble>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    pub train: PathBuf,
    pub validation: Option<PathBuf>,
    pub test: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureOptions {
    /// Minimum document frequency for a token to enter a vocabulary.
    pub min_df: usize,
    /// Sequence length for the neural pipeline.
    pub max_len: usize,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            min_df: 1,
            max_len: 64,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModels {
    nb: Option<NbOptions>,
    lr: Option<RawTrain>,
    svm: Option<RawTrain>,
    nblr: Option<NbLrOptions>,
    lstm: Option<RawNeural>,
    bilstm: Option<RawNeural>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbOptions {
    pub alpha: f64,
}

impl Default for NbOptions {
    fn default() -> Self {
        NbOptions { alpha: 1.0 }
    }
}

/// The NB+LR combiner reuses the trained `nb` and `lr` members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbLrOptions {
    pub beta: f64,
    pub gate: Option<f64>,
}

impl Default for NbLrOptions {
    fn default() -> Self {
        NbLrOptions {
            beta: 0.5,
            gate: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrain {
    learning_rate: Option<f64>,
    l2_lambda: Option<f64>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    seed: Option<u64>,
}

impl RawTrain {
    fn resolve(&self, defaults: TrainConfig) -> (TrainConfig, bool) {
        let cfg = TrainConfig {
            learning_rate: self.learning_rate.unwrap_or(defaults.learning_rate),
            l2_lambda: self.l2_lambda.unwrap_or(defaults.l2_lambda),
            epochs: self.epochs.unwrap_or(defaults.epochs),
            batch_size: self.batch_size.unwrap_or(defaults.batch_size),
            seed: self.seed.unwrap_or(defaults.seed),
        };
        (cfg, self.seed.is_some())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNeural {
    embed_dim: Option<usize>,
    hidden_dim: Option<usize>,
    learning_rate: Option<f64>,
    l2_lambda: Option<f64>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    seed: Option<u64>,
}

impl RawNeural {
    fn train(&self) -> RawTrain {
        RawTrain {
            learning_rate: self.learning_rate,
            l2_lambda: self.l2_lambda,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnsemble {
    name: String,
    members: Vec<ModelKind>,
    strategy: Strategy,
}

/// A training block plus whether its seed was set explicitly (otherwise it
/// follows the experiment seed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Seeded<T> {
    pub config: T,
    pub explicit_seed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ModelOptions {
    pub nb: Option<NbOptions>,
    pub lr: Option<Seeded<TrainConfig>>,
    pub svm: Option<Seeded<TrainConfig>>,
    pub nblr: Option<NbLrOptions>,
    pub lstm: Option<Seeded<NeuralConfig>>,
    pub bilstm: Option<Seeded<NeuralConfig>>,
}

impl ModelOptions {
    pub fn has(&self, kind: ModelKind) -> bool {
        match kind {
            ModelKind::Nb => self.nb.is_some(),
            ModelKind::Lr => self.lr.is_some(),
            ModelKind::Svm => self.svm.is_some(),
            ModelKind::Nblr => self.nblr.is_some(),
            ModelKind::Lstm => self.lstm.is_some(),
            ModelKind::Bilstm => self.bilstm.is_some(),
        }
    }

    /// Configured models in canonical order.
    pub fn configured(&self) -> Vec<ModelKind> {
        ModelKind::ALL
            .into_iter()
            .filter(|&k| self.has(k))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedEnsemble {
    pub name: String,
    pub config: EnsembleConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub data: DataPaths,
    pub features: FeatureOptions,
    pub models: ModelOptions,
    pub ensembles: Vec<NamedEnsemble>,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.data.resolve_against(base);
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.message().to_string()))?;
        let seed = raw.seed;
        let linear = |t: Option<RawTrain>| {
            t.map(|t| {
                let (config, explicit_seed) = t.resolve(TrainConfig {
                    seed,
                    ..TrainConfig::default()
                });
                Seeded {
                    config,
                    explicit_seed,
                }
            })
        };
        let neural = |n: Option<RawNeural>| {
            n.map(|n| {
                let defaults = NeuralConfig::default();
                let (train, explicit_seed) = n.train().resolve(TrainConfig {
                    seed,
                    ..defaults.train
                });
                Seeded {
                    config: NeuralConfig {
                        embed_dim: n.embed_dim.unwrap_or(defaults.embed_dim),
                        hidden_dim: n.hidden_dim.unwrap_or(defaults.hidden_dim),
                        train,
                    },
                    explicit_seed,
                }
            })
        };
        let models = ModelOptions {
            nb: raw.models.nb,
            lr: linear(raw.models.lr),
            svm: linear(raw.models.svm),
            nblr: raw.models.nblr,
            lstm: neural(raw.models.lstm),
            bilstm: neural(raw.models.bilstm),
        };
        let ensembles = raw
            .ensembles
            .into_iter()
            .map(|e| {
                Ok(NamedEnsemble {
                    config: EnsembleConfig::new(e.members, e.strategy).map_err(|err| {
                        Error::InvalidConfig(format!("ensemble {:?}: {err}", e.name))
                    })?,
                    name: e.name,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let cfg = ExperimentConfig {
            seed,
            data: raw.data,
            features: raw.features,
            models,
            ensembles,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.max_len == 0 {
            return Err(Error::InvalidConfig("features.max_len must be >= 1".into()));
        }
        if self.features.min_df == 0 {
            return Err(Error::InvalidConfig("features.min_df must be >= 1".into()));
        }
        let m = &self.models;
        if m.configured().is_empty() {
            return Err(Error::InvalidConfig("no [models.*] tables".into()));
        }
        if let Some(nb) = &m.nb {
            if !(nb.alpha.is_finite() && nb.alpha > 0.0) {
                return Err(Error::InvalidConfig("models.nb.alpha must be > 0".into()));
            }
        }
        for block in [&m.lr, &m.svm].into_iter().flatten() {
            block.config.validate()?;
        }
        for block in [&m.lstm, &m.bilstm].into_iter().flatten() {
            block.config.validate()?;
        }
        if let Some(nblr) = &m.nblr {
            if m.nb.is_none() || m.lr.is_none() {
                return Err(Error::InvalidConfig(
                    "models.nblr combines the nb and lr members; configure both".into(),
                ));
            }
            if !(0.0..=1.0).contains(&nblr.beta) {
                return Err(Error::InvalidConfig(
                    "models.nblr.beta must lie in [0, 1]".into(),
                ));
            }
            if let Some(g) = nblr.gate {
                if !(0.5..=1.0).contains(&g) {
                    return Err(Error::InvalidConfig(
                        "models.nblr.gate must lie in [0.5, 1]".into(),
                    ));
                }
            }
        }
        for (i, e) in self.ensembles.iter().enumerate() {
            if self.ensembles[..i].iter().any(|o| o.name == e.name)
                || ModelKind::ALL.iter().any(|k| k.as_str() == e.name)
            {
                return Err(Error::InvalidConfig(format!(
                    "ensemble name {:?} is not unique",
                    e.name
                )));
            }
            if let Some(missing) = e.config.members().iter().find(|k| !m.has(**k)) {
                return Err(Error::InvalidConfig(format!(
                    "ensemble {:?} uses {missing}, which has no [models.{missing}] table",
                    e.name
                )));
            }
        }
        Ok(())
    }

    /// Replaces the experiment seed; blocks without an explicit seed follow it.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = seed;
        let m = &mut self.models;
        for block in [&mut m.lr, &mut m.svm].into_iter().flatten() {
            if !block.explicit_seed {
                block.config.seed = seed;
            }
        }
        for block in [&mut m.lstm, &mut m.bilstm].into_iter().flatten() {
            if !block.explicit_seed {
                block.config.train.seed = seed;
            }
        }
    }
}

impl DataPaths {
    fn resolve_against(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.train);
        self.validation.as_mut().map(fix);
        self.test.as_mut().map(fix);
    }
}
