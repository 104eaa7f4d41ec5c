//! Multinomial logistic regression trained by full-batch gradient descent.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{DesignMatrix, FeatureConfig};
use crate::labels::LabelSet;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("loss became non-finite at iteration {0}; lower the learning rate")]
    NonFiniteLoss(usize),
    #[error("cannot train on an empty dataset")]
    EmptyDataset,
    #[error("class code {0} is outside the label set")]
    LabelOutOfRange(usize),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("malformed model: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub max_iter: usize,
    pub learning_rate: f64,
    pub l2: f64,
    /// Training stops once the largest absolute gradient component is below this.
    pub tol: f64,
    pub backtracking: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            max_iter: 3000,
            learning_rate: 0.5,
            l2: 1.0,
            tol: 1e-6,
            backtracking: true,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidHyperparams(m.into()));
        if self.max_iter < 1 {
            return bad("max_iter must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad("l2 must be non-negative");
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return bad("tol must be non-negative");
        }
        Ok(())
    }
}

/// Weights are K×d (one row per class), bias has length K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ModelFile", try_from = "ModelFile")]
pub struct SoftmaxModel {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub label_set: LabelSet,
    pub feature_config: FeatureConfig,
    pub hyper: Hyperparams,
    pub final_loss: f64,
    pub iterations: usize,
}

impl SoftmaxModel {
    pub fn zeros(label_set: LabelSet, feature_config: FeatureConfig, d: usize) -> Self {
        let k = label_set.len();
        Self {
            weights: Array2::zeros((k, d)),
            bias: Array1::zeros(k),
            label_set,
            feature_config,
            hyper: Hyperparams::default(),
            final_loss: f64::NAN,
            iterations: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.weights.nrows()
    }

    pub fn d(&self) -> usize {
        self.weights.ncols()
    }
}

/// JSON layout of a trained model; `weights` is row-major K×d.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    labels: LabelSet,
    feature_config: FeatureConfig,
    k: usize,
    d: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
    trained_hyper: Hyperparams,
    final_loss: Option<f64>,
    iterations: usize,
}

impl From<SoftmaxModel> for ModelFile {
    fn from(m: SoftmaxModel) -> Self {
        Self {
            k: m.k(),
            d: m.d(),
            weights: m.weights.iter().copied().collect(),
            bias: m.bias.to_vec(),
            labels: m.label_set,
            feature_config: m.feature_config,
            trained_hyper: m.hyper,
            final_loss: m.final_loss.is_finite().then_some(m.final_loss),
            iterations: m.iterations,
        }
    }
}

impl TryFrom<ModelFile> for SoftmaxModel {
    type Error = ModelError;

    fn try_from(f: ModelFile) -> Result<Self, Self::Error> {
        if f.k != f.labels.len() || f.bias.len() != f.k {
            return Err(ModelError::Malformed(format!(
                "k = {} but {} labels and {} biases",
                f.k,
                f.labels.len(),
                f.bias.len()
            )));
        }
        if f.weights.iter().chain(&f.bias).any(|v| !v.is_finite()) {
            return Err(ModelError::Malformed("non-finite parameter".into()));
        }
        let weights = Array2::from_shape_vec((f.k, f.d), f.weights)
            .map_err(|e| ModelError::Malformed(e.to_string()))?;
        Ok(Self {
            weights,
            bias: Array1::from(f.bias),
            label_set: f.labels,
            feature_config: f.feature_config,
            hyper: f.trained_hyper,
            final_loss: f.final_loss.unwrap_or(f64::NAN),
            iterations: f.iterations,
        })
    }
}

/// Numerically stable softmax: `exp(z_k - max z) / sum_j exp(z_j - max z)`.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn softmax_rows(logits: &mut Array2<f64>) {
    for mut row in logits.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

/// Row i is `W x_i + b`.
fn logits(weights: &Array2<f64>, bias: &Array1<f64>, x: &ArrayView2<f64>) -> Array2<f64> {
    x.dot(&weights.t()) + bias
}

/// Mean negative log-likelihood of precomputed logits plus `(l2 / 2n) * ||W||_F^2`.
fn loss_from_logits(z: &Array2<f64>, weights: &Array2<f64>, y: &[usize], l2: f64) -> f64 {
    let n = z.nrows() as f64;
    let nll: f64 = z
        .rows()
        .into_iter()
        .zip(y)
        .map(|(row, &yi)| {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = row.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
            lse - row[yi]
        })
        .sum();
    nll / n + l2 / (2.0 * n) * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Gradients from logits `z`, which are consumed as scratch space.
fn grad_from_logits(
    mut z: Array2<f64>,
    weights: &Array2<f64>,
    x: &ArrayView2<f64>,
    y: &[usize],
    l2: f64,
) -> (Array2<f64>, Array1<f64>) {
    let n = x.nrows() as f64;
    softmax_rows(&mut z);
    for (mut row, &yi) in z.rows_mut().into_iter().zip(y) {
        row[yi] -= 1.0;
    }
    let grad_w = z.t().dot(x) / n + &(weights * (l2 / n));
    let grad_b = z.sum_axis(Axis(0)) / n;
    (grad_w, grad_b)
}

fn loss_and_grad(
    weights: &Array2<f64>,
    bias: &Array1<f64>,
    x: &ArrayView2<f64>,
    y: &[usize],
    l2: f64,
) -> (f64, Array2<f64>, Array1<f64>) {
    let z = logits(weights, bias, x);
    let value = loss_from_logits(&z, weights, y, l2);
    let (grad_w, grad_b) = grad_from_logits(z, weights, x, y, l2);
    (value, grad_w, grad_b)
}

fn check_design(k: usize, d: usize, dm: &DesignMatrix) -> Result<(), ModelError> {
    if dm.d() != d {
        return Err(ModelError::DimensionMismatch {
            expected: format!("{d} features"),
            found: format!("{} features", dm.d()),
        });
    }
    if dm.y.len() != dm.n() {
        return Err(ModelError::DimensionMismatch {
            expected: format!("{} labels", dm.n()),
            found: format!("{} labels", dm.y.len()),
        });
    }
    if let Some(&bad) = dm.y.iter().find(|&&c| c >= k) {
        return Err(ModelError::LabelOutOfRange(bad));
    }
    Ok(())
}

/// Objective value and gradients `(loss, dL/dW, dL/db)` at the model's parameters.
/// The bias is not regularized.
pub fn loss_and_gradient(
    model: &SoftmaxModel,
    dm: &DesignMatrix,
    l2: f64,
) -> Result<(f64, Array2<f64>, Array1<f64>), ModelError> {
    check_design(model.k(), model.d(), dm)?;
    if dm.n() == 0 {
        return Err(ModelError::EmptyDataset);
    }
    Ok(loss_and_grad(&model.weights, &model.bias, &dm.x.view(), &dm.y, l2))
}

/// A fitted model and the objective after every accepted step
/// (`trace[0]` is the loss at the zero initialization).
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: SoftmaxModel,
    pub trace: Vec<f64>,
}

const MAX_HALVINGS: usize = 30;

/// Full-batch gradient descent from zero weights.
///
/// Stops after `max_iter` steps or once `||grad||_inf < tol`. With
/// backtracking, a step is halved (up to 30 times) until the loss strictly
/// decreases; if no such step exists training stops there.
pub fn fit(dm: &DesignMatrix, hyper: &Hyperparams, label_set: &LabelSet) -> Result<FitResult, ModelError> {
    hyper.validate()?;
    if dm.n() == 0 {
        return Err(ModelError::EmptyDataset);
    }
    let mut model = SoftmaxModel::zeros(label_set.clone(), dm.feature_config.clone(), dm.d());
    check_design(model.k(), model.d(), dm)?;
    model.hyper = *hyper;

    let x = dm.x.view();
    let y = &dm.y;
    let (mut current, mut grad_w, mut grad_b) = loss_and_grad(&model.weights, &model.bias, &x, y, hyper.l2);
    let mut trace = vec![current];
    let mut iterations = 0;

    while iterations < hyper.max_iter {
        let grad_norm = grad_w
            .iter()
            .chain(&grad_b)
            .fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_norm < hyper.tol {
            break;
        }

        let mut step = hyper.learning_rate;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let w = &model.weights - &(&grad_w * step);
            let b = &model.bias - &(&grad_b * step);
            let z = logits(&w, &b, &x);
            let candidate = loss_from_logits(&z, &w, y, hyper.l2);
            if !hyper.backtracking {
                if !candidate.is_finite() {
                    return Err(ModelError::NonFiniteLoss(iterations + 1));
                }
                accepted = Some((w, b, z, candidate));
                break;
            }
            if candidate.is_finite() && candidate < current {
                accepted = Some((w, b, z, candidate));
                break;
            }
            step /= 2.0;
        }
        let Some((w, b, z, candidate)) = accepted else { break };

        (grad_w, grad_b) = grad_from_logits(z, &w, &x, y, hyper.l2);
        model.weights = w;
        model.bias = b;
        current = candidate;
        iterations += 1;
        trace.push(current);
    }

    model.final_loss = current;
    model.iterations = iterations;
    Ok(FitResult { model, trace })
}

fn check_width(model: &SoftmaxModel, x: &ArrayView2<f64>) -> Result<(), ModelError> {
    if x.ncols() != model.d() {
        return Err(ModelError::DimensionMismatch {
            expected: format!("{} features", model.d()),
            found: format!("{} features", x.ncols()),
        });
    }
    Ok(())
}

/// Row i is `softmax(W x_i + b)`.
pub fn predict_proba(model: &SoftmaxModel, x: &ArrayView2<f64>) -> Result<Array2<f64>, ModelError> {
    check_width(model, x)?;
    let mut p = logits(&model.weights, &model.bias, x);
    softmax_rows(&mut p);
    Ok(p)
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(row: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in row.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

pub fn predict(model: &SoftmaxModel, x: &ArrayView2<f64>) -> Result<Vec<usize>, ModelError> {
    let p = predict_proba(model, x)?;
    Ok(p.rows().into_iter().map(|r| argmax(r.iter().copied())).collect())
}
