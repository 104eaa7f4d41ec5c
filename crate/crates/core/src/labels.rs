//! The ordered inventory of rhetorical relations and their integer codes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The eight relations annotated in the corpus, in code order 0..7.
pub const CANONICAL_LABELS: [&str; 8] = [
    "Elaboration",
    "Background",
    "Contrast",
    "Narration",
    "Concession",
    "Restatement",
    "Cause-Effect",
    "Joint",
];

/// Spelling variants seen in annotation exports, mapped to canonical names.
const ALIASES: &[(&str, &str)] = &[("re-statement", "Restatement")];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelSetError {
    #[error("label set is empty")]
    Empty,
    #[error("label name is empty")]
    EmptyName,
    #[error("duplicate label {0:?}")]
    Duplicate(String),
}

/// An ordered list of relation names; a label's position is its class code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSet {
    labels: Vec<String>,
}

impl LabelSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, LabelSetError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(LabelSetError::Empty);
        }
        for (i, name) in labels.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(LabelSetError::EmptyName);
            }
            if labels[..i].iter().any(|l| l.eq_ignore_ascii_case(name)) {
                return Err(LabelSetError::Duplicate(name.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Elaboration, Background, Contrast, Narration, Concession, Restatement,
    /// Cause-Effect, Joint.
    pub fn canonical() -> Self {
        Self {
            labels: CANONICAL_LABELS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.labels
    }

    pub fn name(&self, code: usize) -> Option<&str> {
        self.labels.get(code).map(String::as_str)
    }

    /// Exact lookup of a canonical name.
    pub fn code(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    /// Maps a raw annotation label onto its canonical spelling.
    ///
    /// Matching is ASCII case-insensitive and also accepts the known
    /// spelling variants (`Re-statement`).
    pub fn normalize(&self, raw: &str) -> Option<&str> {
        let raw = raw.trim();
        if let Some(l) = self.labels.iter().find(|l| l.eq_ignore_ascii_case(raw)) {
            return Some(l);
        }
        let lowered = raw.to_ascii_lowercase();
        ALIASES
            .iter()
            .find(|(alias, _)| *alias == lowered)
            .and_then(|(_, target)| self.labels.iter().find(|l| l == target))
            .map(String::as_str)
    }

    /// The valid label that most resembles `raw`, for diagnostics.
    pub fn nearest(&self, raw: &str) -> &str {
        let lowered = raw.trim().to_lowercase();
        self.labels
            .iter()
            .map(|l| (l, strsim::jaro_winkler(&lowered, &l.to_lowercase())))
            .fold(None::<(&String, f64)>, |best, (l, s)| match best {
                Some((_, bs)) if bs >= s => best,
                _ => Some((l, s)),
            })
            .map(|(l, _)| l.as_str())
            .unwrap_or_default()
    }
}

impl Default for LabelSet {
    fn default() -> Self {
        Self::canonical()
    }
}

impl TryFrom<Vec<String>> for LabelSet {
    type Error = LabelSetError;

    fn try_from(value: Vec<String>) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<LabelSet> for Vec<String> {
    fn from(value: LabelSet) -> Self {
        value.labels
    }
}
