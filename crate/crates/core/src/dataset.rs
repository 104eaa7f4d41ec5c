//! Integer-coded datasets, stratified splitting, and oversampling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::LabeledPair;
use crate::labels::LabelSet;
use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("item {index}: unknown label `{label}`")]
    UnknownLabel { index: usize, label: String },
    #[error("class `{0}` has no items")]
    EmptyClass(String),
    #[error("split ratios must be positive and sum to 1, got ({0}, {1}, {2})")]
    InvalidRatios(f64, f64, f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub id: usize,
    /// For oversampled duplicates, the id of the item that was copied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<usize>,
    pub edu1: String,
    pub edu2: String,
    pub y: usize,
}

impl Item {
    /// The id of the original record this item carries, following duplicates back.
    pub fn origin(&self) -> usize {
        self.source.unwrap_or(self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedDataset {
    pub items: Vec<Item>,
    pub label_set: LabelSet,
    /// Lowest id not yet handed out anywhere in this dataset's lineage.
    pub next_id: usize,
}

impl EncodedDataset {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.items.iter().map(|it| it.y).collect()
    }

    pub fn ids(&self) -> Vec<usize> {
        self.items.iter().map(|it| it.id).collect()
    }

    /// Item count per class code.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.label_set.len()];
        for it in &self.items {
            counts[it.y] += 1;
        }
        counts
    }

    pub fn to_pairs(&self) -> Vec<LabeledPair> {
        self.items
            .iter()
            .map(|it| LabeledPair {
                edu1: it.edu1.clone(),
                edu2: it.edu2.clone(),
                label: self.label_set.name(it.y).unwrap_or_default().to_string(),
            })
            .collect()
    }

    fn with_items(&self, items: Vec<Item>) -> Self {
        Self {
            items,
            label_set: self.label_set.clone(),
            next_id: self.next_id,
        }
    }
}

/// Assigns class codes and dense ids `0..n` in input order.
pub fn encode_labels(pairs: &[LabeledPair], label_set: &LabelSet) -> Result<EncodedDataset, DatasetError> {
    let items = pairs
        .iter()
        .enumerate()
        .map(|(id, p)| {
            let y = label_set.code(&p.label).ok_or_else(|| DatasetError::UnknownLabel {
                index: id,
                label: p.label.clone(),
            })?;
            Ok(Item {
                id,
                source: None,
                edu1: p.edu1.clone(),
                edu2: p.edu2.clone(),
                y,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EncodedDataset {
        next_id: items.len(),
        items,
        label_set: label_set.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self, DatasetError> {
        let parts = [train, validation, test];
        if parts.iter().any(|r| !r.is_finite() || *r <= 0.0) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(DatasetError::InvalidRatios(train, validation, test));
        }
        Ok(Self {
            train,
            validation,
            test,
        })
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.6,
            validation: 0.2,
            test: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDataset {
    pub train: EncodedDataset,
    pub validation: EncodedDataset,
    pub test: EncodedDataset,
    pub ratios: SplitRatios,
    pub seed: u64,
}

// Guards floor() against products like 0.29 * 100 = 28.999999999999996.
const FLOOR_SLACK: f64 = 1e-9;

fn floor_share(ratio: f64, n: usize) -> usize {
    (ratio * n as f64 + FLOOR_SLACK).floor() as usize
}

/// Per-class split: train takes `floor(r_train * n_c)`, validation
/// `floor(r_val * n_c)`, test the remainder.
///
/// Classes are visited in code order with one generator seeded from `seed`;
/// each class's members (in dataset order) are shuffled before being dealt
/// out. Every part keeps the original dataset order. With `strict`, a class
/// with no items is an error; otherwise it is skipped.
pub fn stratified_split(
    ds: &EncodedDataset,
    ratios: SplitRatios,
    seed: u64,
    strict: bool,
) -> Result<SplitDataset, DatasetError> {
    let k = ds.label_set.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (pos, it) in ds.items.iter().enumerate() {
        members[it.y].push(pos);
    }

    // 0 = train, 1 = validation, 2 = test, indexed by dataset position.
    let mut part = vec![2u8; ds.len()];
    let mut rng = SplitMix64::new(seed);
    for (class, positions) in members.iter_mut().enumerate() {
        if positions.is_empty() {
            if strict {
                return Err(DatasetError::EmptyClass(
                    ds.label_set.name(class).unwrap_or_default().to_string(),
                ));
            }
            continue;
        }
        let n = positions.len();
        let n_train = floor_share(ratios.train, n);
        let n_val = floor_share(ratios.validation, n);
        rng.shuffle(positions);
        for (rank, &pos) in positions.iter().enumerate() {
            part[pos] = if rank < n_train {
                0
            } else if rank < n_train + n_val {
                1
            } else {
                2
            };
        }
    }

    let take = |p: u8| {
        ds.with_items(
            ds.items
                .iter()
                .zip(&part)
                .filter(|(_, &q)| q == p)
                .map(|(it, _)| it.clone())
                .collect(),
        )
    };
    Ok(SplitDataset {
        train: take(0),
        validation: take(1),
        test: take(2),
        ratios,
        seed,
    })
}

/// Pads every class below `target` by drawing its own items uniformly with
/// replacement. Originals are kept in place; duplicates are appended in class
/// order with fresh ids and `source` set to the copied item's origin.
pub fn oversample(ds: &EncodedDataset, target: usize, seed: u64) -> Result<EncodedDataset, DatasetError> {
    let k = ds.label_set.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (pos, it) in ds.items.iter().enumerate() {
        members[it.y].push(pos);
    }
    if let Some(empty) = members.iter().position(|m| m.is_empty() && target > 0) {
        return Err(DatasetError::EmptyClass(
            ds.label_set.name(empty).unwrap_or_default().to_string(),
        ));
    }

    let mut rng = SplitMix64::new(seed);
    let mut out = ds.clone();
    for positions in &members {
        for _ in positions.len()..target {
            let pick = &ds.items[positions[rng.below(positions.len() as u64) as usize]];
            out.items.push(Item {
                id: out.next_id,
                source: Some(pick.origin()),
                edu1: pick.edu1.clone(),
                edu2: pick.edu2.clone(),
                y: pick.y,
            });
            out.next_id += 1;
        }
    }
    Ok(out)
}
