//! Challenge-format corpora: `id \t tweet \t label` TSV files.
//!
//! Text is kept exactly as read; preprocessing belongs to each model family.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LABELED_HEADER: &str = "id\ttweet\tlabel";
const UNLABELED_HEADER: &str = "id\ttweet";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Fake,
    Real,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Fake, Label::Real];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Fake => "fake",
            Label::Real => "real",
        }
    }

    /// +1 for Fake, -1 for Real.
    pub fn sign(self) -> f64 {
        match self {
            Label::Fake => 1.0,
            Label::Real => -1.0,
        }
    }

    /// 1 for Fake, 0 for Real.
    pub fn target(self) -> f64 {
        match self {
            Label::Fake => 1.0,
            Label::Real => 0.0,
        }
    }

    /// Fake iff `p_fake` is strictly above one half.
    pub fn from_probability(p_fake: f64) -> Label {
        if p_fake > 0.5 {
            Label::Fake
        } else {
            Label::Real
        }
    }

    /// Fake iff the decision score is strictly positive.
    pub fn from_score(score: f64) -> Label {
        if score > 0.0 {
            Label::Fake
        } else {
            Label::Real
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseLabelError(pub String);

impl FromStr for Label {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("fake") {
            Ok(Label::Fake)
        } else if s.eq_ignore_ascii_case("real") {
            Ok(Label::Real)
        } else {
            Err(ParseLabelError(s.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDocument {
    pub id: String,
    pub text: String,
    pub label: Option<Label>,
}

/// An ordered, id-unique collection of documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    name: String,
    documents: Vec<LabeledDocument>,
}

impl Corpus {
    /// Validates id uniqueness and non-empty text.
    pub fn new(name: impl Into<String>, documents: Vec<LabeledDocument>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            if doc.text.trim().is_empty() {
                return Err(Error::EmptyText { line: i + 1 });
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId {
                    line: i + 1,
                    id: doc.id.clone(),
                });
            }
        }
        Ok(Corpus {
            name: name.into(),
            documents,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn documents(&self) -> &[LabeledDocument] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        self.documents.iter().all(|d| d.label.is_some())
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.text.as_str())
    }

    /// Labels of every document; errors if any document is unlabeled.
    pub fn labels(&self) -> Result<Vec<Label>> {
        self.documents
            .iter()
            .map(|d| d.label.ok_or_else(|| Error::Unlabeled(self.name.clone())))
            .collect()
    }

    /// Reads a TSV file. The name of the corpus is the file stem.
    pub fn load_tsv(path: impl AsRef<Path>, has_labels: bool) -> Result<Self> {
        let path = path.as_ref();
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::parse_tsv(&name, &content, has_labels)
    }

    /// Like [`Corpus::load_tsv`], deciding labeled vs unlabeled from the first data line.
    pub fn load_tsv_auto(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let first = content
            .lines()
            .find(|l| !l.is_empty() && *l != LABELED_HEADER && *l != UNLABELED_HEADER);
        let has_labels = first.map(|l| l.split('\t').count() == 3).unwrap_or(false);
        Self::parse_tsv(&name, &content, has_labels)
    }

    pub fn parse_tsv(name: &str, content: &str, has_labels: bool) -> Result<Self> {
        let expected = if has_labels { 3 } else { 2 };
        let header = if has_labels {
            LABELED_HEADER
        } else {
            UNLABELED_HEADER
        };
        let mut documents = Vec::new();
        let mut seen = HashSet::new();
        for (i, raw) in content.split('\n').enumerate() {
            let line_no = i + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.is_empty() || (i == 0 && line == header) {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != expected {
                return Err(Error::MalformedLine {
                    line: line_no,
                    expected,
                    found: fields.len(),
                });
            }
            let id = fields[0].to_string();
            let text = fields[1].to_string();
            if text.trim().is_empty() {
                return Err(Error::EmptyText { line: line_no });
            }
            let label = if has_labels {
                Some(
                    fields[2]
                        .trim()
                        .parse::<Label>()
                        .map_err(|e| Error::UnknownLabel {
                            line: line_no,
                            value: e.0,
                        })?,
                )
            } else {
                None
            };
            if !seen.insert(id.clone()) {
                return Err(Error::DuplicateId { line: line_no, id });
            }
            documents.push(LabeledDocument { id, text, label });
        }
        Ok(Corpus {
            name: name.to_string(),
            documents,
        })
    }

    /// Serializes back to TSV (with header). Labeled iff every document has a label.
    pub fn to_tsv(&self) -> String {
        let labeled = self.is_labeled() && !self.is_empty();
        let mut out = String::new();
        out.push_str(if labeled {
            LABELED_HEADER
        } else {
            UNLABELED_HEADER
        });
        out.push('\n');
        for doc in &self.documents {
            out.push_str(&doc.id);
            out.push('\t');
            out.push_str(&doc.text);
            if let (true, Some(label)) = (labeled, doc.label) {
                out.push('\t');
                out.push_str(label.as_str());
            }
            out.push('\n');
        }
        out
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(self.to_tsv().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn class_counts(&self) -> Result<BTreeMap<Label, usize>> {
        let mut counts: BTreeMap<Label, usize> = Label::ALL.iter().map(|&l| (l, 0)).collect();
        for doc in &self.documents {
            let label = doc
                .label
                .ok_or_else(|| Error::Unlabeled(self.name.clone()))?;
            *counts.entry(label).or_default() += 1;
        }
        Ok(counts)
    }

    /// Splits each class independently: a seeded Fisher-Yates shuffle of the
    /// class members, then contiguous slices sized by `fractions`. Each part
    /// keeps the original corpus order of its documents.
    pub fn stratified_split(&self, fractions: &[f64], seed: u64) -> Result<Vec<Corpus>> {
        validate_fractions(fractions)?;
        self.labels()?;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut assignment = vec![0usize; self.documents.len()];
        for label in Label::ALL {
            let mut members: Vec<usize> = self
                .documents
                .iter()
                .enumerate()
                .filter(|(_, d)| d.label == Some(label))
                .map(|(i, _)| i)
                .collect();
            fisher_yates(&mut members, &mut rng);
            let sizes = apportion(members.len(), fractions);
            let mut start = 0;
            for (part, size) in sizes.into_iter().enumerate() {
                for &doc in &members[start..start + size] {
                    assignment[doc] = part;
                }
                start += size;
            }
        }

        let suffixes = ["train", "validation", "test"];
        let parts = (0..fractions.len())
            .map(|part| {
                let name = if fractions.len() == 1 {
                    self.name.clone()
                } else if fractions.len() <= suffixes.len() {
                    suffixes[part].to_string()
                } else {
                    format!("{}-{}", self.name, part)
                };
                let documents = self
                    .documents
                    .iter()
                    .zip(&assignment)
                    .filter(|(_, &a)| a == part)
                    .map(|(d, _)| d.clone())
                    .collect();
                Corpus { name, documents }
            })
            .collect();
        Ok(parts)
    }
}

fn validate_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() {
        return Err(Error::InvalidFractions("no fractions given".into()));
    }
    if let Some(f) = fractions.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
        return Err(Error::InvalidFractions(format!("{f} is not positive")));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidFractions(format!(
            "fractions sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// In-place Fisher-Yates; the draw sequence is part of the split contract.
pub(crate) fn fisher_yates<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Largest-remainder apportionment of `n` items; every share is within one
/// item of `n * fraction`. Ties in the remainder go to the earlier part.
fn apportion(n: usize, fractions: &[f64]) -> Vec<usize> {
    let exact: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &part in order.iter().take(n.saturating_sub(assigned)) {
        sizes[part] += 1;
    }
    sizes
}
