//! Classification metrics, confusion matrices, and loss-ranked error analysis.
//!
//! Confusion matrices are oriented rows = true class, columns = predicted
//! class, both in label-set order. Precision, recall and F1 are 0 whenever
//! their denominator is 0. Weighted F1 weights each class by its true support.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::EncodedDataset;
use crate::labels::LabelSet;
use crate::softmax::argmax;

/// Probabilities below this are clamped before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;
/// Allowed deviation of a probability row's sum from 1.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("length mismatch: {left} true labels vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },
    #[error("no instances to evaluate")]
    EmptyInput,
    #[error("class code {code} out of range for {k} classes")]
    CodeOutOfRange { code: usize, k: usize },
    #[error("probability row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
}

fn check_lengths(left: usize, right: usize) -> Result<(), EvalError> {
    if left != right {
        return Err(EvalError::LengthMismatch { left, right });
    }
    if left == 0 {
        return Err(EvalError::EmptyInput);
    }
    Ok(())
}

pub fn accuracy(y_true: &[usize], y_pred: &[usize]) -> Result<f64, EvalError> {
    check_lengths(y_true.len(), y_pred.len())?;
    let hits = y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count();
    Ok(hits as f64 / y_true.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, truth: usize, predicted: usize) -> usize {
        self.counts[truth][predicted]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.k()).map(|i| self.counts[i][i]).sum()
    }

    pub fn max_count(&self) -> usize {
        self.counts.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Per-class support (true-label counts).
    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.k())
            .map(|c| self.counts.iter().map(|r| r[c]).sum())
            .collect()
    }
}

pub fn confusion_matrix(y_true: &[usize], y_pred: &[usize], k: usize) -> Result<ConfusionMatrix, EvalError> {
    check_lengths(y_true.len(), y_pred.len())?;
    let mut counts = vec![vec![0; k]; k];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        for code in [t, p] {
            if code >= k {
                return Err(EvalError::CodeOutOfRange { code, k });
            }
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn class_scores(confusion: &ConfusionMatrix, labels: &LabelSet) -> Vec<ClassScores> {
    let (support, predicted) = (confusion.row_sums(), confusion.col_sums());
    (0..confusion.k())
        .map(|c| {
            let tp = confusion.get(c, c);
            let precision = ratio(tp, predicted[c]);
            let recall = ratio(tp, support[c]);
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassScores {
                label: labels.name(c).map_or_else(|| c.to_string(), str::to_string),
                precision,
                recall,
                f1,
                support: support[c],
            }
        })
        .collect()
}

fn weighted_from_scores(scores: &[ClassScores], n: usize) -> f64 {
    scores.iter().map(|s| s.support as f64 * s.f1).sum::<f64>() / n as f64
}

pub fn weighted_f1(y_true: &[usize], y_pred: &[usize], k: usize) -> Result<f64, EvalError> {
    let confusion = confusion_matrix(y_true, y_pred, k)?;
    let names = LabelSet::new((0..k).map(|c| c.to_string())).map_err(|_| EvalError::EmptyInput)?;
    Ok(weighted_from_scores(&class_scores(&confusion, &names), y_true.len()))
}

fn check_proba(y_true: &[usize], proba: &ArrayView2<f64>) -> Result<(), EvalError> {
    check_lengths(y_true.len(), proba.nrows())?;
    let k = proba.ncols();
    for (i, (row, &y)) in proba.rows().into_iter().zip(y_true).enumerate() {
        if y >= k {
            return Err(EvalError::CodeOutOfRange { code: y, k });
        }
        if row.iter().any(|p| !p.is_finite() || !(0.0..=1.0).contains(p)) {
            return Err(EvalError::MalformedRow {
                row: i,
                reason: "probabilities must lie in [0, 1]".into(),
            });
        }
        let sum = row.sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(EvalError::MalformedRow {
                row: i,
                reason: format!("probabilities sum to {sum}"),
            });
        }
    }
    Ok(())
}

fn true_class_loss(p: f64) -> f64 {
    -p.max(PROB_FLOOR).ln()
}

/// `-(1/n) sum_i ln proba[i][y_i]`, with the true-class probability clamped
/// below at `1e-12`.
pub fn mean_cross_entropy(y_true: &[usize], proba: &ArrayView2<f64>) -> Result<f64, EvalError> {
    check_proba(y_true, proba)?;
    let total: f64 = y_true
        .iter()
        .enumerate()
        .map(|(i, &y)| true_class_loss(proba[[i, y]]))
        .sum();
    Ok(total / y_true.len() as f64)
}

/// What a classifier produced for an evaluation set.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictions {
    Hard(Vec<usize>),
    Probabilities(Array2<f64>),
}

impl Predictions {
    pub fn labels(&self) -> Vec<usize> {
        match self {
            Predictions::Hard(y) => y.clone(),
            Predictions::Probabilities(p) => p.rows().into_iter().map(|r| argmax(r.iter().copied())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Predictions::Hard(y) => y.len(),
            Predictions::Probabilities(p) => p.nrows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub labels: LabelSet,
    pub n: usize,
    pub accuracy: f64,
    pub weighted_f1: f64,
    /// Absent when only hard predictions were available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_cross_entropy: Option<f64>,
    pub per_class: Vec<ClassScores>,
    pub confusion: ConfusionMatrix,
}

pub fn evaluate(y_true: &[usize], predictions: &Predictions, labels: &LabelSet) -> Result<EvalReport, EvalError> {
    let k = labels.len();
    let mean_cross_entropy = match predictions {
        Predictions::Probabilities(p) => {
            if p.ncols() != k {
                return Err(EvalError::MalformedRow {
                    row: 0,
                    reason: format!("expected {k} probabilities per row, found {}", p.ncols()),
                });
            }
            Some(mean_cross_entropy(y_true, &p.view())?)
        }
        Predictions::Hard(_) => None,
    };
    let y_pred = predictions.labels();
    let confusion = confusion_matrix(y_true, &y_pred, k)?;
    let n = y_true.len();
    let per_class = class_scores(&confusion, labels);
    Ok(EvalReport {
        labels: labels.clone(),
        n,
        accuracy: accuracy(y_true, &y_pred)?,
        weighted_f1: weighted_from_scores(&per_class, n),
        mean_cross_entropy,
        per_class,
        confusion,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub id: usize,
    pub true_label: String,
    pub predicted_label: String,
    /// `-ln p(true class)`.
    pub loss: f64,
    pub edu1: String,
    pub edu2: String,
}

/// The `k` misclassified items with the highest loss, ties by ascending id.
pub fn rank_errors(ds: &EncodedDataset, proba: &ArrayView2<f64>, k: usize) -> Result<Vec<ErrorRecord>, EvalError> {
    if ds.len() != proba.nrows() {
        return Err(EvalError::LengthMismatch {
            left: ds.len(),
            right: proba.nrows(),
        });
    }
    let name = |c: usize| ds.label_set.name(c).map_or_else(|| c.to_string(), str::to_string);
    let mut records = Vec::new();
    for (item, row) in ds.items.iter().zip(proba.rows()) {
        if item.y >= row.len() {
            return Err(EvalError::CodeOutOfRange {
                code: item.y,
                k: row.len(),
            });
        }
        let predicted = argmax(row.iter().copied());
        if predicted != item.y {
            records.push(ErrorRecord {
                id: item.id,
                true_label: name(item.y),
                predicted_label: name(predicted),
                loss: true_class_loss(row[item.y]),
                edu1: item.edu1.clone(),
                edu2: item.edu2.clone(),
            });
        }
    }
    records.sort_by(|a, b| b.loss.total_cmp(&a.loss).then(a.id.cmp(&b.id)));
    records.truncate(k);
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionPair {
    pub true_label: String,
    pub predicted_label: String,
    pub count: usize,
}

/// Nonzero off-diagonal cells, most frequent first, ties by (row, column).
pub fn confusion_pairs(confusion: &ConfusionMatrix, labels: &LabelSet) -> Vec<ConfusionPair> {
    let mut cells: Vec<(usize, usize, usize)> = Vec::new();
    for (t, row) in confusion.counts.iter().enumerate() {
        for (p, &count) in row.iter().enumerate() {
            if t != p && count > 0 {
                cells.push((t, p, count));
            }
        }
    }
    cells.sort_by(|a, b| b.2.cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let name = |c: usize| labels.name(c).map_or_else(|| c.to_string(), str::to_string);
    cells
        .into_iter()
        .map(|(t, p, count)| ConfusionPair {
            true_label: name(t),
            predicted_label: name(p),
            count,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LabeledPair;
    use crate::dataset::encode_labels;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    const T: [usize; 4] = [0, 0, 1, 2];
    const P: [usize; 4] = [0, 1, 1, 2];

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&T, &T).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 1], &[1, 0]).unwrap(), 0.0);
        assert_eq!(accuracy(&T, &P).unwrap(), 0.75);
        assert_eq!(accuracy(&[], &[]), Err(EvalError::EmptyInput));
        assert!(matches!(accuracy(&[0], &[0, 1]), Err(EvalError::LengthMismatch { .. })));
    }

    #[test]
    fn confusion_cases() {
        let cm = confusion_matrix(&T, &P, 3).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let diag = confusion_matrix(&T, &T, 3).unwrap();
        assert_eq!(diag.counts, vec![vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(confusion_matrix(&[], &[], 3), Err(EvalError::EmptyInput));
        assert_eq!(
            confusion_matrix(&[3], &[0], 3),
            Err(EvalError::CodeOutOfRange { code: 3, k: 3 })
        );
    }

    #[test]
    fn weighted_f1_cases() {
        assert_eq!(weighted_f1(&T, &T, 3).unwrap(), 1.0);
        // class 0: P=1 R=1/2; class 1: P=1/2 R=1; class 2: 1
        assert_abs_diff_eq!(weighted_f1(&T, &P, 3).unwrap(), 0.75, epsilon = 1e-15);
        let never_predicted = weighted_f1(&[0, 1, 2], &[0, 1, 1], 3).unwrap();
        assert!(never_predicted < 1.0);
        let scores = class_scores(&confusion_matrix(&[0, 1, 2], &[0, 1, 1], 3).unwrap(), &LabelSet::new(["a", "b", "c"]).unwrap());
        assert_eq!(scores[2].f1, 0.0);
        assert_eq!(scores[2].precision, 0.0);
    }

    #[test]
    fn cross_entropy_cases() {
        let uniform = Array2::from_elem((3, 8), 0.125);
        assert_abs_diff_eq!(mean_cross_entropy(&[0, 4, 7], &uniform.view()).unwrap(), 8f64.ln(), epsilon = 1e-12);
        let sure = array![[1.0, 0.0], [0.0, 1.0]];
        assert_eq!(mean_cross_entropy(&[0, 1], &sure.view()).unwrap(), 0.0);
        let p = array![[0.5, 0.5], [0.75, 0.25]];
        assert_abs_diff_eq!(
            mean_cross_entropy(&[0, 1], &p.view()).unwrap(),
            1.0397207708399179,
            epsilon = 1e-12
        );
        let floor = array![[1.0, 0.0]];
        assert_abs_diff_eq!(mean_cross_entropy(&[1], &floor.view()).unwrap(), -(1e-12f64).ln(), epsilon = 1e-9);
        let bad = array![[0.5, 0.6]];
        assert!(matches!(mean_cross_entropy(&[0], &bad.view()), Err(EvalError::MalformedRow { row: 0, .. })));
        let negative = array![[1.5, -0.5]];
        assert!(matches!(mean_cross_entropy(&[0], &negative.view()), Err(EvalError::MalformedRow { .. })));
    }

    #[test]
    fn evaluate_perfect_and_hard() {
        let labels = LabelSet::new(["a", "b", "c"]).unwrap();
        let p = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let report = evaluate(&[0, 1, 2], &Predictions::Probabilities(p), &labels).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.weighted_f1, 1.0);
        assert_eq!(report.mean_cross_entropy, Some(0.0));
        assert_eq!(report.confusion.trace(), 3);

        let hard = evaluate(&T, &Predictions::Hard(P.to_vec()), &labels).unwrap();
        assert_eq!(hard.mean_cross_entropy, None);
        let json = serde_json::to_string(&hard).unwrap();
        assert!(!json.contains("mean_cross_entropy"));
        assert_eq!(hard.confusion.trace() as f64 / hard.n as f64, hard.accuracy);
        assert_eq!(hard.confusion.row_sums(), hard.per_class.iter().map(|c| c.support).collect::<Vec<_>>());
    }

    fn three_items() -> EncodedDataset {
        let set = LabelSet::new(["a", "b", "c"]).unwrap();
        let pairs: Vec<LabeledPair> = ["a", "b", "c"]
            .iter()
            .map(|l| LabeledPair::new(format!("x {l}"), "y", l, &set).unwrap())
            .collect();
        encode_labels(&pairs, &set).unwrap()
    }

    #[test]
    fn rank_errors_orders_by_loss() {
        let ds = three_items();
        let e = |l: f64| (-l).exp();
        // item 0 correct (loss 0.1), items 1 and 2 wrong with losses 3.2 and 1.0
        let proba = array![
            [e(0.1), (1.0 - e(0.1)) / 2.0, (1.0 - e(0.1)) / 2.0],
            [1.0 - e(3.2), e(3.2), 0.0],
            [1.0 - e(1.0), 0.0, e(1.0)],
        ];
        let top = rank_errors(&ds, &proba.view(), 1).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].id, 1);
        assert_abs_diff_eq!(top[0].loss, 3.2, epsilon = 1e-12);
        assert_eq!((top[0].true_label.as_str(), top[0].predicted_label.as_str()), ("b", "a"));

        let all = rank_errors(&ds, &proba.view(), 10).unwrap();
        assert_eq!(all.iter().map(|r| r.id).collect::<Vec<_>>(), [1, 2]);

        let perfect = Array2::eye(3);
        assert!(rank_errors(&ds, &perfect.view(), 5).unwrap().is_empty());
        assert!(rank_errors(&ds, &perfect.slice(ndarray::s![..2, ..]), 5).is_err());
    }

    #[test]
    fn confusion_pair_ranking() {
        let labels = LabelSet::canonical();
        let diag = ConfusionMatrix {
            counts: (0..8).map(|i| (0..8).map(|j| usize::from(i == j) * 3).collect()).collect(),
        };
        assert!(confusion_pairs(&diag, &labels).is_empty());

        let mut m = diag.clone();
        m.counts[0][2] = 4; // Elaboration -> Contrast
        m.counts[6][3] = 2;
        m.counts[1][6] = 2;
        let pairs = confusion_pairs(&m, &labels);
        assert_eq!(
            pairs[0],
            ConfusionPair {
                true_label: "Elaboration".into(),
                predicted_label: "Contrast".into(),
                count: 4
            }
        );
        assert_eq!(pairs[1].true_label, "Background");
        assert_eq!(pairs[2].true_label, "Cause-Effect");
    }
}
