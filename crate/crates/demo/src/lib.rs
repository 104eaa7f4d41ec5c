//! WebAssembly bindings behind `www/index.html`.
//!
//! Every export takes plain numbers or strings and returns a JSON string, so
//! the page needs no generated TypeScript types. The same functions run
//! natively, which is how the tests exercise them.

use indexmap::IndexMap;
use rhetrel_core::corpus::{self, class_histogram, LabeledPair};
use rhetrel_core::dataset::{encode_labels, oversample, stratified_split, EncodedDataset, SplitRatios};
use rhetrel_core::evaluation::{evaluate, Predictions};
use rhetrel_core::features::{build_design_matrix, FeatureConfig};
use rhetrel_core::report::{render_confusion_svg, render_text};
use rhetrel_core::softmax::{fit, predict_proba, Hyperparams};
use rhetrel_core::LabelSet;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// The bundled toy corpus, one standoff document per entry.
pub const TOY_CORPUS: [(&str, &str); 12] = [
    ("archer-return", include_str!("../../../data/toy/archer-return.rsta")),
    ("bazball", include_str!("../../../data/toy/bazball.rsta")),
    ("captaincy", include_str!("../../../data/toy/captaincy.rsta")),
    ("collapse", include_str!("../../../data/toy/collapse.rsta")),
    ("debutant", include_str!("../../../data/toy/debutant.rsta")),
    ("heatwave", include_str!("../../../data/toy/heatwave.rsta")),
    ("injury-blow", include_str!("../../../data/toy/injury-blow.rsta")),
    ("lords-final", include_str!("../../../data/toy/lords-final.rsta")),
    ("rain-draw", include_str!("../../../data/toy/rain-draw.rsta")),
    ("record-chase", include_str!("../../../data/toy/record-chase.rsta")),
    ("spin-twins", include_str!("../../../data/toy/spin-twins.rsta")),
    ("womens-ashes", include_str!("../../../data/toy/womens-ashes.rsta")),
];

/// Upper bound on iterations so a slider mishap cannot freeze the tab.
pub const MAX_DEMO_ITER: usize = 2000;

fn to_json(value: Value) -> String {
    value.to_string()
}

fn error_json(message: impl ToString, line: Option<usize>) -> String {
    to_json(json!({ "ok": false, "error": message.to_string(), "line": line }))
}

pub fn toy_pairs() -> Vec<LabeledPair> {
    let labels = LabelSet::canonical();
    TOY_CORPUS
        .iter()
        .flat_map(|(_, text)| {
            let doc = corpus::parse_standoff(text, &labels).expect("bundled corpus parses");
            corpus::pairs_from_document(&doc).expect("bundled corpus has non-empty units")
        })
        .collect()
}

fn toy_dataset() -> EncodedDataset {
    encode_labels(&toy_pairs(), &LabelSet::canonical()).expect("bundled labels are canonical")
}

fn histogram(ds: &EncodedDataset) -> IndexMap<String, usize> {
    class_histogram(&ds.to_pairs(), &ds.label_set)
}

/// Standoff text of the bundled document `name`, or an empty string.
#[wasm_bindgen]
pub fn toy_document(name: &str) -> String {
    TOY_CORPUS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .unwrap_or_default()
}

/// Names of the bundled documents as a JSON array.
#[wasm_bindgen]
pub fn toy_document_names() -> String {
    to_json(json!(TOY_CORPUS.iter().map(|(n, _)| *n).collect::<Vec<_>>()))
}

/// Parses standoff text and returns its pairs and class histogram, or the
/// first error with its line number.
#[wasm_bindgen]
pub fn parse_document(text: &str) -> String {
    let labels = LabelSet::canonical();
    let doc = match corpus::parse_standoff(text, &labels) {
        Ok(doc) => doc,
        Err(e) => return error_json(&e, e.position()),
    };
    let pairs = match corpus::pairs_from_document(&doc) {
        Ok(pairs) => pairs,
        Err(e) => return error_json(&e, e.position()),
    };
    to_json(json!({
        "ok": true,
        "doc_id": doc.doc_id,
        "spans": doc.spans.len(),
        "pairs": pairs,
        "histogram": class_histogram(&pairs, &labels),
    }))
}

/// Splits the toy corpus, then oversamples the training part to `target`
/// per class. Returns histograms for the full corpus, each split part and
/// the balanced training set.
#[wasm_bindgen]
pub fn balance_explorer(target: usize, seed: u64) -> String {
    let ds = toy_dataset();
    let parts = match stratified_split(&ds, SplitRatios::default(), seed, true) {
        Ok(parts) => parts,
        Err(e) => return error_json(e, None),
    };
    let balanced = match oversample(&parts.train, target, seed) {
        Ok(b) => b,
        Err(e) => return error_json(e, None),
    };
    let duplicates: Vec<Value> = balanced
        .items
        .iter()
        .filter_map(|it| it.source.map(|src| json!({ "id": it.id, "copy_of": src })))
        .collect();
    to_json(json!({
        "ok": true,
        "labels": ds.label_set.names(),
        "corpus": histogram(&ds),
        "train": histogram(&parts.train),
        "validation": histogram(&parts.validation),
        "test": histogram(&parts.test),
        "balanced_train": histogram(&balanced),
        "duplicates": duplicates,
    }))
}

/// Polyline plot of a loss trace.
pub fn loss_curve_svg(trace: &[f64]) -> String {
    const W: f64 = 420.0;
    const H: f64 = 220.0;
    const PAD: f64 = 36.0;
    let hi = trace.iter().cloned().fold(f64::MIN, f64::max);
    let lo = trace.iter().cloned().fold(f64::MAX, f64::min);
    let span = (hi - lo).max(1e-12);
    let steps = (trace.len().max(2) - 1) as f64;
    let points: Vec<String> = trace
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let x = PAD + (W - 2.0 * PAD) * i as f64 / steps;
            let y = PAD + (H - 2.0 * PAD) * (hi - v) / span;
            format!("{x:.1},{y:.1}")
        })
        .collect();
    format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#,
            "\n  <title>Training loss</title>\n",
            r#"  <line x1="{p}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#,
            "\n",
            r#"  <line x1="{p}" y1="{p}" x2="{p}" y2="{b}" stroke="black"/>"#,
            "\n",
            r#"  <text x="{p}" y="{t}" text-anchor="start">{hi:.4}</text>"#,
            "\n",
            r#"  <text x="{p}" y="{l}" text-anchor="start">{lo:.4}</text>"#,
            "\n",
            r#"  <text x="{r}" y="{l}" text-anchor="end">{n} iterations</text>"#,
            "\n",
            r#"  <polyline class="loss" fill="none" stroke="rgb(8,48,107)" stroke-width="1.5" points="{pts}"/>"#,
            "\n</svg>\n"
        ),
        w = W,
        h = H,
        p = PAD,
        r = W - PAD,
        b = H - PAD,
        t = PAD - 8.0,
        l = H - PAD + 16.0,
        hi = hi,
        lo = lo,
        n = trace.len().saturating_sub(1),
        pts = points.join(" "),
    )
}

/// Splits the toy corpus with `seed`, balances the training part to
/// `target`, trains on hashed n-grams of width `dims` and evaluates on the
/// test part.
#[wasm_bindgen]
pub fn train_toy(dims: usize, learning_rate: f64, l2: f64, max_iter: usize, target: usize, seed: u64) -> String {
    let ds = toy_dataset();
    let result = (|| -> Result<Value, String> {
        let parts = stratified_split(&ds, SplitRatios::default(), seed, true).map_err(|e| e.to_string())?;
        let train = oversample(&parts.train, target, seed).map_err(|e| e.to_string())?;
        let config = FeatureConfig {
            dims,
            ..FeatureConfig::default()
        };
        let dm = build_design_matrix(&train, &config, None).map_err(|e| e.to_string())?;
        let hyper = Hyperparams {
            max_iter: max_iter.clamp(1, MAX_DEMO_ITER),
            learning_rate,
            l2,
            ..Hyperparams::default()
        };
        let fitted = fit(&dm, &hyper, &ds.label_set).map_err(|e| e.to_string())?;
        let test = build_design_matrix(&parts.test, &config, None).map_err(|e| e.to_string())?;
        let proba = predict_proba(&fitted.model, &test.x.view()).map_err(|e| e.to_string())?;
        let report = evaluate(&test.y, &Predictions::Probabilities(proba), &ds.label_set).map_err(|e| e.to_string())?;
        Ok(json!({
            "ok": true,
            "iterations": fitted.model.iterations,
            "trace": fitted.trace,
            "final_loss": fitted.model.final_loss,
            "train_size": train.len(),
            "test_size": parts.test.len(),
            "accuracy": report.accuracy,
            "weighted_f1": report.weighted_f1,
            "mean_cross_entropy": report.mean_cross_entropy,
            "loss_svg": loss_curve_svg(&fitted.trace),
            "confusion_svg": render_confusion_svg(&report.confusion, &report.labels),
            "report_text": render_text(&report),
        }))
    })();
    match result {
        Ok(v) => to_json(v),
        Err(e) => error_json(e, None),
    }
}
