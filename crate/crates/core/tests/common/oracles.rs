//! Reference computations that share no code with the library: plain loops
//! over the definitions, used to cross-check the optimized paths.
#![allow(dead_code)]

pub fn accuracy(y_true: &[usize], y_pred: &[usize]) -> f64 {
    let mut hits = 0.0;
    for i in 0..y_true.len() {
        if y_true[i] == y_pred[i] {
            hits += 1.0;
        }
    }
    hits / y_true.len() as f64
}

/// Cell (a, b) counts every i with truth a and prediction b, by full scan.
pub fn confusion(y_true: &[usize], y_pred: &[usize], k: usize) -> Vec<Vec<usize>> {
    (0..k)
        .map(|a| {
            (0..k)
                .map(|b| (0..y_true.len()).filter(|&i| y_true[i] == a && y_pred[i] == b).count())
                .collect()
        })
        .collect()
}

pub fn weighted_f1(y_true: &[usize], y_pred: &[usize], k: usize) -> f64 {
    let n = y_true.len() as f64;
    let mut total = 0.0;
    for c in 0..k {
        let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
        for i in 0..y_true.len() {
            match (y_true[i] == c, y_pred[i] == c) {
                (true, true) => tp += 1.0,
                (false, true) => fp += 1.0,
                (true, false) => fn_ += 1.0,
                _ => {}
            }
        }
        let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let r = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
        let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        total += (tp + fn_) * f;
    }
    total / n
}

pub fn cross_entropy(y_true: &[usize], proba: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, &y) in y_true.iter().enumerate() {
        s += -proba[i][y].max(1e-12).ln();
    }
    s / y_true.len() as f64
}

pub fn argmax_low(row: &[f64]) -> usize {
    let mut best = 0;
    for j in 1..row.len() {
        if row[j] > row[best] {
            best = j;
        }
    }
    best
}

/// Logits by explicit triple loop: z[i][c] = sum_j w[c][j] x[i][j] + b[c].
pub fn logits(w: &[Vec<f64>], b: &[f64], x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|xi| {
            (0..w.len())
                .map(|c| {
                    let mut z = b[c];
                    for j in 0..xi.len() {
                        z += w[c][j] * xi[j];
                    }
                    z
                })
                .collect()
        })
        .collect()
}

pub fn softmax_naive(z: &[f64]) -> Vec<f64> {
    let m = z.iter().cloned().fold(f64::MIN, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

/// Regularized mean cross-entropy computed from scratch.
pub fn objective(w: &[Vec<f64>], b: &[f64], x: &[Vec<f64>], y: &[usize], l2: f64) -> f64 {
    let n = x.len() as f64;
    let z = logits(w, b, x);
    let mut nll = 0.0;
    for (i, zi) in z.iter().enumerate() {
        nll -= softmax_naive(zi)[y[i]].ln();
    }
    let mut sq = 0.0;
    for row in w {
        for v in row {
            sq += v * v;
        }
    }
    nll / n + l2 / (2.0 * n) * sq
}

/// Central differences of [`objective`] with step `h`, for every weight then every bias.
pub fn fd_gradient(
    w: &[Vec<f64>],
    b: &[f64],
    x: &[Vec<f64>],
    y: &[usize],
    l2: f64,
    h: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut gw = vec![vec![0.0; w[0].len()]; w.len()];
    for c in 0..w.len() {
        for j in 0..w[0].len() {
            let (mut plus, mut minus) = (w.to_vec(), w.to_vec());
            plus[c][j] += h;
            minus[c][j] -= h;
            gw[c][j] = (objective(&plus, b, x, y, l2) - objective(&minus, b, x, y, l2)) / (2.0 * h);
        }
    }
    let mut gb = vec![0.0; b.len()];
    for c in 0..b.len() {
        let (mut plus, mut minus) = (b.to_vec(), b.to_vec());
        plus[c] += h;
        minus[c] -= h;
        gb[c] = (objective(w, &plus, x, y, l2) - objective(w, &minus, x, y, l2)) / (2.0 * h);
    }
    (gw, gb)
}

/// Largest elementwise relative error; the denominator is floored at `floor`.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64], floor: f64) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, f)| (a - f).abs() / a.abs().max(f.abs()).max(floor))
        .fold(0.0, f64::max)
}

/// Off-diagonal nonzero cells sorted by count desc then (row, col), via a
/// full sort of explicit tuples.
pub fn ranked_off_diagonal(m: &[Vec<usize>]) -> Vec<(usize, usize, usize)> {
    let mut cells = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if i != j && c > 0 {
                cells.push((usize::MAX - c, i, j));
            }
        }
    }
    cells.sort();
    cells.into_iter().map(|(c, i, j)| (i, j, usize::MAX - c)).collect()
}
