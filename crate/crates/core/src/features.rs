//! Vocabularies, TF-IDF vectors and padded index sequences.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::preprocess::{preprocess, PipelineKind, TokenStream};

pub const PAD_INDEX: usize = 0;
pub const OOV_INDEX: usize = 1;
/// Number of sequence slots reserved before the first vocabulary token.
pub const RESERVED_INDICES: usize = 2;

/// Token index with document frequencies, fitted on one corpus.
///
/// Indices are assigned in lexicographic token order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    tokens: Vec<String>,
    document_frequency: Vec<usize>,
    num_documents: usize,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    num_documents: usize,
    tokens: Vec<String>,
    document_frequency: Vec<usize>,
}

impl TryFrom<VocabularyRepr> for Vocabulary {
    type Error = String;

    fn try_from(r: VocabularyRepr) -> std::result::Result<Self, String> {
        if r.tokens.len() != r.document_frequency.len() {
            return Err("token and document frequency lists differ in length".into());
        }
        if r.tokens.windows(2).any(|w| w[0] >= w[1]) {
            return Err("vocabulary tokens are not strictly sorted".into());
        }
        if r.document_frequency
            .iter()
            .any(|&df| df == 0 || df > r.num_documents)
        {
            return Err("document frequency out of range".into());
        }
        Ok(Vocabulary::from_sorted(
            r.tokens,
            r.document_frequency,
            r.num_documents,
        ))
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            num_documents: v.num_documents,
            tokens: v.tokens,
            document_frequency: v.document_frequency,
        }
    }
}

impl Vocabulary {
    fn from_sorted(
        tokens: Vec<String>,
        document_frequency: Vec<usize>,
        num_documents: usize,
    ) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary {
            tokens,
            document_frequency,
            num_documents,
            index,
        }
    }

    /// Fits on a corpus, preprocessing each text with `kind`.
    pub fn fit(corpus: &Corpus, kind: PipelineKind, min_df: usize) -> Result<Self> {
        let streams: Vec<TokenStream> = corpus.texts().map(|t| preprocess(t, kind)).collect();
        Self::fit_streams(&streams, min_df)
    }

    /// Fits on already-preprocessed documents.
    pub fn fit_streams(streams: &[TokenStream], min_df: usize) -> Result<Self> {
        if min_df == 0 {
            return Err(Error::InvalidConfig("min_df must be at least 1".into()));
        }
        if streams.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for stream in streams {
            let unique: BTreeSet<&str> = stream.iter().collect();
            for token in unique {
                *df.entry(token).or_default() += 1;
            }
        }
        let (tokens, freqs) = df
            .into_iter()
            .filter(|&(_, n)| n >= min_df)
            .map(|(t, n)| (t.to_string(), n))
            .unzip();
        Ok(Self::from_sorted(tokens, freqs, streams.len()))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn num_documents(&self) -> usize {
        self.num_documents
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn document_frequency(&self, index: usize) -> usize {
        self.document_frequency[index]
    }

    /// Smoothed idf: `ln((1 + N) / (1 + df)) + 1`.
    pub fn idf(&self, index: usize) -> f64 {
        let n = self.num_documents as f64;
        let df = self.document_frequency[index] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    /// Raw-count TF times smoothed IDF, L2-normalized. Unknown tokens are dropped.
    pub fn tfidf(&self, tokens: &TokenStream) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for token in tokens.iter() {
            if let Some(i) = self.index_of(token) {
                *counts.entry(i).or_default() += 1.0;
            }
        }
        let mut entries: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(i, tf)| (i, tf * self.idf(i)))
            .collect();
        let norm = entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in &mut entries {
                *w /= norm;
            }
        }
        SparseVector { entries }
    }

    /// Maps tokens to `index + 2` (unknown -> 1), truncating or right-padding
    /// with 0 to exactly `max_len`.
    pub fn encode_sequence(&self, tokens: &TokenStream, max_len: usize) -> SequenceEncoding {
        let mut indices: Vec<usize> = tokens
            .iter()
            .take(max_len)
            .map(|t| {
                self.index_of(t)
                    .map(|i| i + RESERVED_INDICES)
                    .unwrap_or(OOV_INDEX)
            })
            .collect();
        indices.resize(max_len, PAD_INDEX);
        SequenceEncoding { indices }
    }

    /// Size of the embedding table that sequences from this vocabulary index into.
    pub fn sequence_vocab_size(&self) -> usize {
        self.len() + RESERVED_INDICES
    }
}

/// Sparse vector with strictly increasing indices and no explicit zeros.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Sorts by index, sums duplicates and drops zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut map: BTreeMap<usize, f64> = BTreeMap::new();
        for (i, w) in pairs {
            *map.entry(i).or_default() += w;
        }
        SparseVector {
            entries: map.into_iter().filter(|&(_, w)| w != 0.0).collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * dense[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    /// One past the highest index, or 0 when empty.
    pub fn dim_hint(&self) -> usize {
        self.entries.last().map(|&(i, _)| i + 1).unwrap_or(0)
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector::from_pairs(self.entries.iter().map(|&(i, w)| (i, w * factor)))
    }
}

/// Fixed-length index sequence; 0 pads, 1 marks an unknown token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceEncoding {
    indices: Vec<usize>,
}

impl SequenceEncoding {
    pub fn new(indices: Vec<usize>) -> Self {
        SequenceEncoding { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn max_len(&self) -> usize {
        self.indices.len()
    }

    /// Non-padding positions, in order.
    pub fn unmasked(&self) -> Vec<usize> {
        self.indices
            .iter()
            .copied()
            .filter(|&i| i != PAD_INDEX)
            .collect()
    }

    pub fn is_all_padding(&self) -> bool {
        self.indices.iter().all(|&i| i == PAD_INDEX)
    }
}
