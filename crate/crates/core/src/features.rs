//! Feature extraction: hashed n-gram vectors or externally produced embeddings.

use std::collections::BTreeMap;
use std::hash::Hasher;

use fnv::FnvHasher;
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::LabeledPair;
use crate::dataset::EncodedDataset;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("invalid feature config: {0}")]
    InvalidConfig(String),
    #[error("line 1: missing header record `{{\"dim\": .., \"model\": .., \"pooling\": ..}}`")]
    MissingHeaderRecord,
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("embedding {id}: expected {expected} values, found {found}")]
    DimMismatch { id: usize, expected: usize, found: usize },
    #[error("embedding {0}: duplicate id")]
    DuplicateId(usize),
    #[error("embedding {0}: non-finite value")]
    NonFiniteValue(usize),
    #[error("no embedding for record {0}")]
    MissingEmbedding(usize),
    #[error("embedding table has width {found}, feature config expects {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("embedding mode requires an embedding table")]
    MissingTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    Hash,
    Embedding,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub mode: FeatureMode,
    pub dims: usize,
    pub ngram_orders: Vec<usize>,
    pub embedding_dim: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            mode: FeatureMode::Hash,
            dims: 2048,
            ngram_orders: vec![1, 2],
            embedding_dim: 768,
        }
    }
}

impl FeatureConfig {
    pub fn embedding(embedding_dim: usize) -> Self {
        Self {
            mode: FeatureMode::Embedding,
            embedding_dim,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        let bad = |m: &str| Err(FeatureError::InvalidConfig(m.into()));
        if self.dims == 0 {
            return bad("dims must be positive");
        }
        if self.ngram_orders.is_empty() || self.ngram_orders.contains(&0) {
            return bad("n-gram orders must be a non-empty set of positive integers");
        }
        if self.embedding_dim == 0 {
            return bad("embedding_dim must be positive");
        }
        Ok(())
    }

    /// Width of the vectors this config produces.
    pub fn width(&self) -> usize {
        match self.mode {
            FeatureMode::Hash => self.dims,
            FeatureMode::Embedding => self.embedding_dim,
        }
    }
}

/// 64-bit FNV-1a over the UTF-8 bytes of `s`.
///
/// Offset basis `0xcbf29ce484222325`, prime `0x100000001b3`.
pub fn hash64(s: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(s.as_bytes());
    h.finish()
}

/// Lowercased maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Hash keys for one pair: every n-gram of each configured order, joined by
/// single spaces and prefixed with `1:` (first unit) or `2:` (second unit).
pub fn ngram_keys(pair: &LabeledPair, orders: &[usize]) -> Vec<String> {
    let mut keys = Vec::new();
    for (prefix, text) in [("1:", &pair.edu1), ("2:", &pair.edu2)] {
        let tokens = tokenize(text);
        for &n in orders {
            if n == 0 {
                continue;
            }
            keys.extend(tokens.windows(n).map(|w| format!("{prefix}{}", w.join(" "))));
        }
    }
    keys
}

/// Counts n-gram hits per slot `hash64(key) % dims`, then L2-normalizes.
/// A pair with no tokens maps to the zero vector.
pub fn hash_featurize(pair: &LabeledPair, config: &FeatureConfig) -> Vec<f64> {
    let mut v = vec![0.0; config.dims];
    for key in ngram_keys(pair, &config.ngram_orders) {
        v[(hash64(&key) % config.dims as u64) as usize] += 1.0;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    pub dim: usize,
    pub model: String,
    pub pooling: String,
    pub rows: BTreeMap<usize, Vec<f64>>,
}

#[derive(Deserialize)]
struct HeaderRecord {
    dim: usize,
    #[serde(default)]
    model: String,
    #[serde(default)]
    pooling: String,
}

#[derive(Deserialize)]
struct VectorRecord {
    id: usize,
    vector: Vec<Option<f64>>,
}

/// Python's `json` module writes these bare tokens for non-finite floats.
fn mask_non_finite(line: &str) -> String {
    line.replace("-Infinity", "null")
        .replace("Infinity", "null")
        .replace("NaN", "null")
}

/// Loads an embedding JSON Lines file: a header record followed by one
/// `{"id", "vector"}` record per pair.
pub fn load_embedding_file(content: &str) -> Result<EmbeddingTable, FeatureError> {
    let mut lines = content
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let header: HeaderRecord = match lines.next() {
        Some((_, l)) => serde_json::from_str(l).map_err(|_| FeatureError::MissingHeaderRecord)?,
        None => return Err(FeatureError::MissingHeaderRecord),
    };
    if header.dim == 0 {
        return Err(FeatureError::InvalidConfig("header dim must be positive".into()));
    }

    let mut rows = BTreeMap::new();
    for (line, text) in lines {
        let record: VectorRecord = serde_json::from_str(text)
            .or_else(|e| serde_json::from_str(&mask_non_finite(text)).map_err(|_| e))
            .map_err(|e| FeatureError::Json {
                line,
                message: e.to_string(),
            })?;
        if record.vector.len() != header.dim {
            return Err(FeatureError::DimMismatch {
                id: record.id,
                expected: header.dim,
                found: record.vector.len(),
            });
        }
        let vector = record
            .vector
            .into_iter()
            .map(|v| v.filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or(FeatureError::NonFiniteValue(record.id))?;
        if rows.insert(record.id, vector).is_some() {
            return Err(FeatureError::DuplicateId(record.id));
        }
    }
    Ok(EmbeddingTable {
        dim: header.dim,
        model: header.model,
        pooling: header.pooling,
        rows,
    })
}

/// The inverse of [`load_embedding_file`].
pub fn write_embedding_file(table: &EmbeddingTable) -> String {
    let mut out = serde_json::json!({
        "dim": table.dim,
        "model": table.model,
        "pooling": table.pooling,
    })
    .to_string();
    out.push('\n');
    for (id, vector) in &table.rows {
        out.push_str(&serde_json::json!({ "id": id, "vector": vector }).to_string());
        out.push('\n');
    }
    out
}

/// Feature rows aligned with labels and record ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "DesignMatrixFile", try_from = "DesignMatrixFile")]
pub struct DesignMatrix {
    pub x: Array2<f64>,
    pub y: Vec<usize>,
    pub ids: Vec<usize>,
    pub feature_config: FeatureConfig,
}

impl DesignMatrix {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }
}

/// On-disk layout: `x` is row-major.
#[derive(Serialize, Deserialize)]
struct DesignMatrixFile {
    feature_config: FeatureConfig,
    n: usize,
    d: usize,
    ids: Vec<usize>,
    y: Vec<usize>,
    x: Vec<f64>,
}

impl From<DesignMatrix> for DesignMatrixFile {
    fn from(dm: DesignMatrix) -> Self {
        Self {
            n: dm.n(),
            d: dm.d(),
            x: dm.x.iter().copied().collect(),
            ids: dm.ids,
            y: dm.y,
            feature_config: dm.feature_config,
        }
    }
}

impl TryFrom<DesignMatrixFile> for DesignMatrix {
    type Error = String;

    fn try_from(f: DesignMatrixFile) -> Result<Self, Self::Error> {
        if f.ids.len() != f.n || f.y.len() != f.n {
            return Err(format!("expected {} ids and labels", f.n));
        }
        if f.x.iter().any(|v| !v.is_finite()) {
            return Err("non-finite feature value".into());
        }
        let x = Array2::from_shape_vec((f.n, f.d), f.x).map_err(|e| e.to_string())?;
        Ok(Self {
            x,
            y: f.y,
            ids: f.ids,
            feature_config: f.feature_config,
        })
    }
}

/// Builds one row per dataset item, in dataset order.
///
/// In embedding mode an oversampled duplicate uses the vector of the item it
/// was copied from, so the table only needs the original ids.
pub fn build_design_matrix(
    ds: &EncodedDataset,
    config: &FeatureConfig,
    table: Option<&EmbeddingTable>,
) -> Result<DesignMatrix, FeatureError> {
    config.validate()?;
    let width = config.width();
    let mut x = Array2::zeros((ds.len(), width));
    match config.mode {
        FeatureMode::Hash => {
            for (mut row, it) in x.rows_mut().into_iter().zip(&ds.items) {
                let pair = LabeledPair {
                    edu1: it.edu1.clone(),
                    edu2: it.edu2.clone(),
                    label: String::new(),
                };
                row.assign(&ndarray::Array1::from(hash_featurize(&pair, config)));
            }
        }
        FeatureMode::Embedding => {
            let table = table.ok_or(FeatureError::MissingTable)?;
            if table.dim != width {
                return Err(FeatureError::WidthMismatch {
                    expected: width,
                    found: table.dim,
                });
            }
            for (mut row, it) in x.rows_mut().into_iter().zip(&ds.items) {
                let v = table
                    .rows
                    .get(&it.origin())
                    .ok_or(FeatureError::MissingEmbedding(it.origin()))?;
                row.iter_mut().zip(v).for_each(|(dst, src)| *dst = *src);
            }
        }
    }
    Ok(DesignMatrix {
        x,
        y: ds.labels(),
        ids: ds.ids(),
        feature_config: config.clone(),
    })
}
