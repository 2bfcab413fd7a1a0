//! Labelled pattern streams from raw corpora.

mod manifest;
pub mod music;
pub mod tokenize;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use manifest::{Category, Dataset, DatasetManifest, TestItem, MANIFEST_SCHEMA_VERSION};
pub use tokenize::{TokenStream, Tokenizer};

use crate::pattern::{Modality, Pattern, Primitive};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {source}")]
    InFile { path: String, source: Box<CorpusError> },
    #[error("{0} contains no samples")]
    Empty(String),
}

impl CorpusError {
    pub(crate) fn syntax(line: usize, column: usize, message: String) -> Self {
        CorpusError::Syntax { line, column, message }
    }
}

/// A labelled training item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub visual: Pattern,
    pub label: Pattern,
}

impl Sample {
    pub fn new(visual: Pattern, label: Pattern) -> Result<Self, CorpusError> {
        if visual.is_empty() {
            return Err(CorpusError::Manifest("sample body is empty".into()));
        }
        if label.len() != 1 {
            return Err(CorpusError::Manifest(format!("label must be one token, got {}", label.len())));
        }
        Ok(Sample { visual: visual_only(visual), label: verbal_only(label) })
    }

    pub fn from_tokens(body: Vec<Primitive>, label: Primitive) -> Self {
        Sample { visual: Pattern::new(Modality::Visual, body), label: Pattern::new(Modality::Verbal, vec![label]) }
    }
}

fn visual_only(p: Pattern) -> Pattern {
    Pattern::new(Modality::Visual, p.into_items())
}

fn verbal_only(p: Pattern) -> Pattern {
    Pattern::new(Modality::Verbal, p.into_items())
}

/// How a token stream is cut into samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitUnit {
    Whole,
    Lines,
    Words(usize),
    Measures(usize),
    Rows(usize),
}

impl FromStr for SplitUnit {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::Manifest(format!("unknown split unit {s:?}"));
        match s {
            "whole" => return Ok(SplitUnit::Whole),
            "lines" => return Ok(SplitUnit::Lines),
            _ => {}
        }
        let (kind, n) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(CorpusError::Manifest(format!("split unit {s:?} must be positive")));
        }
        match kind.trim() {
            "n_words" => Ok(SplitUnit::Words(n)),
            "n_measures" => Ok(SplitUnit::Measures(n)),
            "n_rows" => Ok(SplitUnit::Rows(n)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SplitUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitUnit::Whole => f.write_str("whole"),
            SplitUnit::Lines => f.write_str("lines"),
            SplitUnit::Words(n) => write!(f, "n_words:{n}"),
            SplitUnit::Measures(n) => write!(f, "n_measures:{n}"),
            SplitUnit::Rows(n) => write!(f, "n_rows:{n}"),
        }
    }
}

impl Serialize for SplitUnit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SplitUnit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn cut_at(tokens: &[Primitive], ends: impl IntoIterator<Item = usize>) -> Vec<Vec<Primitive>> {
    let mut out = Vec::new();
    let mut start = 0;
    for end in ends {
        if end > start {
            out.push(tokens[start..end].to_vec());
            start = end;
        }
    }
    if start < tokens.len() {
        out.push(tokens[start..].to_vec());
    }
    out
}

/// Consecutive non-overlapping sample bodies; a short final remainder is
/// kept. Concatenating the result gives back the token stream.
pub fn split_samples(stream: &TokenStream, unit: SplitUnit) -> Vec<Vec<Primitive>> {
    let tokens = &stream.tokens;
    if tokens.is_empty() {
        return Vec::new();
    }
    match unit {
        SplitUnit::Whole => vec![tokens.clone()],
        SplitUnit::Lines => cut_at(tokens, stream.line_ends.iter().copied()),
        SplitUnit::Words(n) | SplitUnit::Rows(n) => tokens.chunks(n).map(<[Primitive]>::to_vec).collect(),
        SplitUnit::Measures(n) => cut_at(tokens, stream.measure_ends.iter().copied().skip(n - 1).step_by(n)),
    }
}
