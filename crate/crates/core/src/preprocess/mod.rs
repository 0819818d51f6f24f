//! Text normalization shared by every model family.
//!
//! Both pipelines lowercase and split on non-alphanumeric characters; the
//! neural pipeline additionally runs each token through the Porter stemmer.

mod porter;

use serde::{Deserialize, Serialize};

pub use porter::porter_stem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PipelineKind {
    Classical,
    Neural,
}

/// Ordered lowercase tokens of one document.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream(Vec<String>);

impl TokenStream {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenStream(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn join(&self, sep: &str) -> String {
        self.0.join(sep)
    }
}

impl From<Vec<String>> for TokenStream {
    fn from(tokens: Vec<String>) -> Self {
        TokenStream(tokens)
    }
}

impl<'a> FromIterator<&'a str> for TokenStream {
    fn from_iter<I: IntoIterator<Item = &'a str>>(iter: I) -> Self {
        TokenStream(iter.into_iter().map(str::to_string).collect())
    }
}

/// Maximal runs of alphanumeric characters of the lowercased text.
pub fn tokenize(text: &str) -> TokenStream {
    let lowered = text.to_lowercase();
    lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn preprocess(text: &str, kind: PipelineKind) -> TokenStream {
    let tokens = tokenize(text);
    match kind {
        PipelineKind::Classical => tokens,
        PipelineKind::Neural => TokenStream(tokens.0.iter().map(|t| porter_stem(t)).collect()),
    }
}
