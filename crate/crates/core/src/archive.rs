//! Versioned, checksummed model archives.
//!
//! An archive is UTF-8 text: a five-line header followed by a JSON payload.
//!
//! ```text
//! fakenews-model
//! version 1
//! pipelines <classical|neural|classical,neural>
//! length <payload bytes>
//! sha256 <hex digest of payload>
//! <payload>
//! ```
//!
//! The payload holds the fitted vocabularies and every parameter tensor.
//! Floats are written in shortest round-trip decimal form, so loading an
//! archive reproduces predictions bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensemble::{
    self, DocumentFeatures, EnsembleConfig, ModelKind, Prediction, TrainedModel,
};
use crate::error::{Error, Result};
use crate::features::Vocabulary;
use crate::preprocess::{preprocess, PipelineKind};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "fakenews-model";

#[derive(Debug, thiserror::Error)]
pub enum ArchiveError {
    #[error("not a model archive (bad magic line)")]
    BadMagic,
    #[error("unsupported archive version {found} (this build reads version {FORMAT_VERSION})")]
    Version { found: String },
    #[error("archive truncated: header declares {expected} payload bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("archive checksum mismatch")]
    Checksum,
    #[error("malformed archive: {0}")]
    Malformed(String),
}

/// Classical (TF-IDF) feature state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalFeatures {
    pub vocabulary: Vocabulary,
}

/// Neural (index sequence) feature state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuralFeatures {
    pub vocabulary: Vocabulary,
    pub max_len: usize,
}

/// Turns raw text into whichever features the stored models need.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeaturePipeline {
    pub classical: Option<ClassicalFeatures>,
    pub neural: Option<NeuralFeatures>,
}

impl FeaturePipeline {
    pub fn pipelines(&self) -> Vec<PipelineKind> {
        let mut out = Vec::new();
        if self.classical.is_some() {
            out.push(PipelineKind::Classical);
        }
        if self.neural.is_some() {
            out.push(PipelineKind::Neural);
        }
        out
    }

    pub fn features(&self, text: &str) -> DocumentFeatures {
        DocumentFeatures {
            tfidf: self.classical.as_ref().map(|c| {
                c.vocabulary
                    .tfidf(&preprocess(text, PipelineKind::Classical))
            }),
            sequence: self
                .neural
                .as_ref()
                .map(|n| neural_sequence(&n.vocabulary, text, n.max_len)),
        }
    }
}

/// Neural encoding of `text`. A document with no tokens at all becomes a
/// single unknown token so the recurrent models always see one step.
pub fn neural_sequence(
    vocab: &Vocabulary,
    text: &str,
    max_len: usize,
) -> crate::features::SequenceEncoding {
    let enc = vocab.encode_sequence(&preprocess(text, PipelineKind::Neural), max_len);
    if enc.is_all_padding() {
        let mut indices = vec![crate::features::PAD_INDEX; max_len];
        indices[0] = crate::features::OOV_INDEX;
        crate::features::SequenceEncoding::new(indices)
    } else {
        enc
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArchivedModel {
    Single {
        name: ModelKind,
        model: TrainedModel,
    },
    Ensemble {
        config: EnsembleConfig,
        members: BTreeMap<ModelKind, TrainedModel>,
    },
}

/// Everything needed to score raw text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArchive {
    pub name: String,
    pub features: FeaturePipeline,
    pub model: ArchivedModel,
}

impl ModelArchive {
    pub fn predict_text(&self, text: &str) -> Result<Prediction> {
        let features = self.features.features(text);
        match &self.model {
            ArchivedModel::Single { model, .. } => model.predict(&features),
            ArchivedModel::Ensemble { config, members } => {
                ensemble::classify(config, members, &features)
            }
        }
    }

    pub fn to_text(&self) -> Result<String> {
        let payload = serde_json::to_string(self)
            .map_err(|e| ArchiveError::Malformed(format!("cannot serialize: {e}")))?;
        let digest = hex::encode(Sha256::digest(payload.as_bytes()));
        Ok(format!(
            "{MAGIC}\nversion {FORMAT_VERSION}\npipelines {}\nlength {}\nsha256 {digest}\n{payload}",
            self.pipeline_names(),
            payload.len()
        ))
    }

    fn pipeline_names(&self) -> String {
        self.features
            .pipelines()
            .iter()
            .map(|p| match p {
                PipelineKind::Classical => "classical",
                PipelineKind::Neural => "neural",
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn from_text(text: &str) -> Result<Self, ArchiveError> {
        let mut rest = text;
        let mut next_line = || -> Result<&str, ArchiveError> {
            let (line, tail) = rest
                .split_once('\n')
                .ok_or_else(|| ArchiveError::Malformed("incomplete header".into()))?;
            rest = tail;
            Ok(line)
        };
        if next_line().map_err(|_| ArchiveError::BadMagic)? != MAGIC {
            return Err(ArchiveError::BadMagic);
        }
        let version = header_field(next_line()?, "version")?;
        if version != FORMAT_VERSION.to_string() {
            return Err(ArchiveError::Version {
                found: version.to_string(),
            });
        }
        let pipelines = header_field(next_line()?, "pipelines")?.to_string();
        let length: usize = header_field(next_line()?, "length")?
            .parse()
            .map_err(|_| ArchiveError::Malformed("length is not an integer".into()))?;
        let digest = header_field(next_line()?, "sha256")?.to_string();
        let payload = rest;
        if payload.len() < length {
            return Err(ArchiveError::Truncated {
                expected: length,
                found: payload.len(),
            });
        }
        if payload.len() > length {
            return Err(ArchiveError::Malformed(format!(
                "{} bytes after the declared payload",
                payload.len() - length
            )));
        }
        if hex::encode(Sha256::digest(payload.as_bytes())) != digest {
            return Err(ArchiveError::Checksum);
        }
        let archive: ModelArchive =
            serde_json::from_str(payload).map_err(|e| ArchiveError::Malformed(e.to_string()))?;
        if archive.pipeline_names() != pipelines {
            return Err(ArchiveError::Malformed(format!(
                "header lists pipelines {pipelines:?} but payload has {:?}",
                archive.pipeline_names()
            )));
        }
        archive.validate()?;
        Ok(archive)
    }

    fn validate(&self) -> Result<(), ArchiveError> {
        let needs = |p: PipelineKind| match &self.model {
            ArchivedModel::Single { model, .. } => model.pipeline() == p,
            ArchivedModel::Ensemble { config, .. } => config.needs(p),
        };
        if needs(PipelineKind::Classical) && self.features.classical.is_none() {
            return Err(ArchiveError::Malformed(
                "classical vocabulary missing".into(),
            ));
        }
        if needs(PipelineKind::Neural) && self.features.neural.is_none() {
            return Err(ArchiveError::Malformed("neural vocabulary missing".into()));
        }
        let mut models: Vec<&TrainedModel> = Vec::new();
        match &self.model {
            ArchivedModel::Single { model, .. } => models.push(model),
            ArchivedModel::Ensemble { config, members } => {
                EnsembleConfig::new(config.members().to_vec(), config.strategy())
                    .map_err(|e| ArchiveError::Malformed(e.to_string()))?;
                for kind in config.members() {
                    models.push(members.get(kind).ok_or_else(|| {
                        ArchiveError::Malformed(format!("member {kind} missing"))
                    })?);
                }
            }
        }
        for model in models {
            if let TrainedModel::Neural(m) = model {
                m.validate()
                    .map_err(|e| ArchiveError::Malformed(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_text(&text)?)
    }
}

fn header_field<'a>(line: &'a str, key: &str) -> Result<&'a str, ArchiveError> {
    line.strip_prefix(key)
        .and_then(|v| v.strip_prefix(' '))
        .ok_or_else(|| ArchiveError::Malformed(format!("expected {key:?} header line")))
}
