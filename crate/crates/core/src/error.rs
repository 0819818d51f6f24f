use std::path::PathBuf;

use crate::corpus::Label;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: expected {expected} tab-separated fields, found {found}")]
    MalformedLine {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: duplicate document id {id:?}")]
    DuplicateId { line: usize, id: String },

    #[error("line {line}: unknown label {value:?} (expected \"fake\" or \"real\")")]
    UnknownLabel { line: usize, value: String },

    #[error("line {line}: document text is empty")]
    EmptyText { line: usize },

    #[error("corpus {0:?} is unlabeled")]
    Unlabeled(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("invalid split fractions: {0}")]
    InvalidFractions(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no training documents with label {0}")]
    MissingClass(Label),

    #[error("{what}: lengths differ ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sequence contains only padding")]
    EmptySequence,

    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Diverged { epoch: usize },

    #[error("non-finite gradient passed to optimizer")]
    NonFiniteGradient,

    #[error("cannot combine an empty set of predictions")]
    NoPredictions,

    #[error("majority vote needs an odd number of members, got {0}")]
    EvenVoterCount(usize),

    #[error("ensemble member {0:?} has no fitted model")]
    MissingMember(String),

    #[error("training {member} failed: {source}")]
    MemberTraining {
        member: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Archive(#[from] crate::archive::ArchiveError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by unreadable or malformed input data.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::MalformedLine { .. }
                | Error::DuplicateId { .. }
                | Error::UnknownLabel { .. }
                | Error::EmptyText { .. }
                | Error::Unlabeled(_)
                | Error::EmptyCorpus
                | Error::Archive(_)
        )
    }
}
