//! Ingest formats: the pair CSV and the line-oriented standoff documents,
//! plus derivation of labeled pairs from annotated documents.

mod pair_csv;
mod standoff;

use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::LabelSet;

pub use pair_csv::{parse_pair_csv, write_pair_csv, PAIR_CSV_HEADER};
pub use standoff::{pairs_from_document, parse_standoff, AnnotatedDocument, Relation, Span};

/// Where in an input a diagnostic points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    /// 1-based data row of a pair CSV (the header is row 0).
    Row(usize),
    /// 1-based line of a standoff document.
    Line(usize),
    /// A span of an already-parsed document.
    Span(String),
}

impl Location {
    /// The 1-based row or line number, when the location has one.
    pub fn number(&self) -> Option<usize> {
        match self {
            Location::Row(n) | Location::Line(n) => Some(*n),
            Location::Span(_) => None,
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Row(n) => write!(f, "row {n}"),
            Location::Line(n) => write!(f, "line {n}"),
            Location::Span(id) => write!(f, "span {id}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line 1: expected header `EDU1,EDU2,Label`, found `{found}`")]
    MissingHeader { found: String },
    #[error("row {row}: expected 3 fields, found {fields}")]
    MalformedRow { row: usize, fields: usize },
    #[error("{at}: unknown label `{name}` (did you mean `{nearest}`?)")]
    UnknownLabel {
        at: Location,
        name: String,
        nearest: String,
    },
    #[error("{at}: empty discourse unit")]
    EmptyEdu { at: Location },
    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("line {line}: span `{span_id}` has offsets {start}..{end} outside text of length {len}")]
    BadOffset {
        line: usize,
        span_id: String,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("line {line}: relation references undeclared span `{span_id}`")]
    DanglingRelation { line: usize, span_id: String },
    #[error("line {line}: span id `{span_id}` already declared")]
    DuplicateSpanId { line: usize, span_id: String },
    #[error("line {line}: {message}")]
    SyntaxError { line: usize, message: String },
}

impl CorpusError {
    /// The 1-based row (pair CSV) or line (standoff) the diagnostic refers to.
    pub fn position(&self) -> Option<usize> {
        match self {
            CorpusError::MissingHeader { .. } => Some(1),
            CorpusError::MalformedRow { row, .. } | CorpusError::Csv { row, .. } => Some(*row),
            CorpusError::UnknownLabel { at, .. } | CorpusError::EmptyEdu { at } => at.number(),
            CorpusError::BadOffset { line, .. }
            | CorpusError::DanglingRelation { line, .. }
            | CorpusError::DuplicateSpanId { line, .. }
            | CorpusError::SyntaxError { line, .. } => Some(*line),
        }
    }
}

/// One training or evaluation instance: two discourse units and the relation
/// holding between them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledPair {
    pub edu1: String,
    pub edu2: String,
    pub label: String,
}

impl LabeledPair {
    pub fn new(
        edu1: impl Into<String>,
        edu2: impl Into<String>,
        label: &str,
        labels: &LabelSet,
    ) -> Result<Self, CorpusError> {
        let (edu1, edu2) = (edu1.into(), edu2.into());
        let unknown = || CorpusError::UnknownLabel {
            at: Location::Row(0),
            name: label.to_string(),
            nearest: labels.nearest(label).to_string(),
        };
        let label = labels.normalize(label).ok_or_else(unknown)?.to_string();
        if edu1.trim().is_empty() || edu2.trim().is_empty() {
            return Err(CorpusError::EmptyEdu { at: Location::Row(0) });
        }
        Ok(Self { edu1, edu2, label })
    }
}

/// Per-relation counts in label-set order; every label appears, zeros included.
pub fn class_histogram(pairs: &[LabeledPair], labels: &LabelSet) -> IndexMap<String, usize> {
    let mut counts: IndexMap<String, usize> =
        labels.names().iter().map(|n| (n.clone(), 0)).collect();
    for pair in pairs {
        if let Some(c) = counts.get_mut(&pair.label) {
            *c += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(label: &str) -> LabeledPair {
        LabeledPair::new("a", "b", label, &LabelSet::canonical()).unwrap()
    }

    #[test]
    fn histogram_of_nothing_has_every_label() {
        let h = class_histogram(&[], &LabelSet::canonical());
        assert_eq!(h.len(), 8);
        assert!(h.values().all(|&c| c == 0));
    }

    #[test]
    fn histogram_counts() {
        let mut pairs = vec![pair("Contrast"); 3];
        pairs.push(pair("Background"));
        let h = class_histogram(&pairs, &LabelSet::canonical());
        assert_eq!(h["Contrast"], 3);
        assert_eq!(h["Background"], 1);
        assert_eq!(h.values().sum::<usize>(), 4);
        let keys: Vec<_> = h.keys().cloned().collect();
        assert_eq!(keys, LabelSet::canonical().names());
    }

    #[test]
    fn pair_constructor_normalizes_label() {
        assert_eq!(pair("re-statement").label, "Restatement");
        assert!(LabeledPair::new(" ", "b", "Joint", &LabelSet::canonical()).is_err());
    }
}
