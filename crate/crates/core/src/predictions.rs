//! Predictions CSV: `id,predicted_label` optionally followed by one
//! `prob_<Label>` column per label, in label-set order.
//!
//! `id` is the 0-based data row of the evaluated pair CSV. When probability
//! columns are present they take precedence: the hard prediction used for
//! scoring is their argmax.

use std::fmt::Write;

use ndarray::Array2;
use thiserror::Error;

use crate::evaluation::Predictions;
use crate::labels::LabelSet;

pub const PROB_PREFIX: &str = "prob_";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PredictionsError {
    #[error("line 1: expected header `id,predicted_label[,prob_<Label>...]`, found `{0}`")]
    BadHeader(String),
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("no prediction for id {0}")]
    MissingId(usize),
    #[error("row {row}: id {id} is out of range or repeated")]
    UnexpectedId { row: usize, id: usize },
}

pub fn predictions_header(labels: &LabelSet, with_probabilities: bool) -> String {
    let mut header = String::from("id,predicted_label");
    if with_probabilities {
        for name in labels.names() {
            write!(header, ",{PROB_PREFIX}{name}").ok();
        }
    }
    header
}

/// Writes one row per prediction, ids `0..n` in order.
pub fn write_predictions_csv(predictions: &Predictions, labels: &LabelSet) -> String {
    let hard = predictions.labels();
    let proba = match predictions {
        Predictions::Probabilities(p) => Some(p),
        Predictions::Hard(_) => None,
    };
    let mut out = predictions_header(labels, proba.is_some());
    out.push('\n');
    for (i, &code) in hard.iter().enumerate() {
        write!(out, "{i},{}", labels.name(code).unwrap_or_default()).ok();
        if let Some(p) = proba {
            for v in p.row(i) {
                write!(out, ",{v}").ok();
            }
        }
        out.push('\n');
    }
    out
}

/// Parses a predictions file covering exactly the ids `0..n`.
pub fn parse_predictions_csv(content: &str, labels: &LabelSet, n: usize) -> Result<Predictions, PredictionsError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(content.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        _ => return Err(PredictionsError::BadHeader(String::new())),
    };
    let header_text = header.iter().collect::<Vec<_>>().join(",");
    let with_proba = if header_text == predictions_header(labels, false) {
        false
    } else if header_text == predictions_header(labels, true) {
        true
    } else {
        return Err(PredictionsError::BadHeader(header_text));
    };
    let width = if with_proba { 2 + labels.len() } else { 2 };

    let mut hard: Vec<Option<usize>> = vec![None; n];
    let mut proba = Array2::zeros((if with_proba { n } else { 0 }, labels.len()));
    for (i, record) in records.enumerate() {
        let row = i + 1;
        let bad = |message: String| PredictionsError::BadRow { row, message };
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != width {
            return Err(bad(format!("expected {width} fields, found {}", record.len())));
        }
        let id: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("id `{}` is not a non-negative integer", &record[0])))?;
        if id >= n || hard[id].is_some() {
            return Err(PredictionsError::UnexpectedId { row, id });
        }
        let label = labels
            .normalize(&record[1])
            .ok_or_else(|| bad(format!("unknown label `{}`", &record[1])))?;
        hard[id] = labels.code(label);
        if with_proba {
            for (c, field) in record.iter().skip(2).enumerate() {
                proba[[id, c]] = field
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("probability `{field}` is not a number")))?;
            }
        }
    }
    let hard = hard
        .into_iter()
        .enumerate()
        .map(|(id, h)| h.ok_or(PredictionsError::MissingId(id)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(if with_proba {
        Predictions::Probabilities(proba)
    } else {
        Predictions::Hard(hard)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn labels() -> LabelSet {
        LabelSet::new(["Contrast", "Joint"]).unwrap()
    }

    #[test]
    fn roundtrip_with_probabilities() {
        let p = Predictions::Probabilities(array![[0.25, 0.75], [0.9, 0.1]]);
        let text = write_predictions_csv(&p, &labels());
        assert!(text.starts_with("id,predicted_label,prob_Contrast,prob_Joint\n0,Joint,0.25,0.75\n"));
        assert_eq!(parse_predictions_csv(&text, &labels(), 2).unwrap(), p);
    }

    #[test]
    fn hard_labels_in_any_order() {
        let text = "id,predicted_label\n1,Contrast\n0,joint\n";
        assert_eq!(
            parse_predictions_csv(text, &labels(), 2).unwrap(),
            Predictions::Hard(vec![1, 0])
        );
    }

    #[test]
    fn coverage_errors() {
        assert_eq!(
            parse_predictions_csv("id,predicted_label\n0,Joint\n", &labels(), 2),
            Err(PredictionsError::MissingId(1))
        );
        assert_eq!(
            parse_predictions_csv("id,predicted_label\n0,Joint\n0,Joint\n", &labels(), 2),
            Err(PredictionsError::UnexpectedId { row: 2, id: 0 })
        );
        assert!(matches!(
            parse_predictions_csv("id,label\n", &labels(), 0),
            Err(PredictionsError::BadHeader(_))
        ));
        assert!(matches!(
            parse_predictions_csv("id,predicted_label\n0,Cause\n", &labels(), 1),
            Err(PredictionsError::BadRow { row: 1, .. })
        ));
    }
}
