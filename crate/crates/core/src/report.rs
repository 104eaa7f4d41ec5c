//! Human-readable renderings of an [`EvalReport`]: aligned text, a confusion
//! matrix CSV, and an SVG heatmap.

use std::fmt::Write;
use std::str::FromStr;

use thiserror::Error;

use crate::evaluation::{ConfusionMatrix, EvalReport};
use crate::labels::LabelSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("unsupported report format `{0}` (expected text, csv or svg)")]
    UnsupportedFormat(String),
    #[error("confusion csv line {line}: {message}")]
    BadConfusionCsv { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
    Svg,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Text => "txt",
            ReportFormat::Csv => "csv",
            ReportFormat::Svg => "svg",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "svg" => Ok(ReportFormat::Svg),
            _ => Err(ReportError::UnsupportedFormat(s.to_string())),
        }
    }
}

pub fn render_report(report: &EvalReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Text => render_text(report),
        ReportFormat::Csv => render_confusion_csv(&report.confusion, &report.labels),
        ReportFormat::Svg => render_confusion_svg(&report.confusion, &report.labels),
    }
    .into_bytes()
}

pub fn render_text(report: &EvalReport) -> String {
    let names = report.labels.names();
    let width = names.iter().map(|n| n.chars().count()).max().unwrap_or(0).max(5);
    let mut out = String::new();

    writeln!(out, "Confusion matrix (rows = true, columns = predicted)").ok();
    write!(out, "{:width$}", "").ok();
    for name in names {
        write!(out, " {name:>width$}").ok();
    }
    out.push('\n');
    for (name, row) in names.iter().zip(&report.confusion.counts) {
        write!(out, "{name:<width$}").ok();
        for count in row {
            write!(out, " {count:>width$}").ok();
        }
        out.push('\n');
    }

    out.push('\n');
    writeln!(
        out,
        "{:<width$} {:>9} {:>9} {:>9} {:>7}",
        "label", "precision", "recall", "f1", "support"
    )
    .ok();
    for c in &report.per_class {
        writeln!(
            out,
            "{:<width$} {:>9.4} {:>9.4} {:>9.4} {:>7}",
            c.label, c.precision, c.recall, c.f1, c.support
        )
        .ok();
    }

    out.push('\n');
    write!(
        out,
        "n={} accuracy={:.4} weighted_f1={:.4}",
        report.n, report.accuracy, report.weighted_f1
    )
    .ok();
    match report.mean_cross_entropy {
        Some(ce) => writeln!(out, " loss={ce:.4}").ok(),
        None => writeln!(out, " loss=-").ok(),
    };
    out
}

/// Header row `true\predicted,<labels..>`, then one row per true label.
pub fn render_confusion_csv(confusion: &ConfusionMatrix, labels: &LabelSet) -> String {
    let mut out = String::from("true\\predicted");
    for name in labels.names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (name, row) in labels.names().iter().zip(&confusion.counts) {
        out.push_str(name);
        for count in row {
            write!(out, ",{count}").ok();
        }
        out.push('\n');
    }
    out
}

/// Reads back the output of [`render_confusion_csv`].
pub fn parse_confusion_csv(content: &str) -> Result<(Vec<String>, ConfusionMatrix), ReportError> {
    let bad = |line: usize, message: &str| ReportError::BadConfusionCsv {
        line,
        message: message.to_string(),
    };
    let mut lines = content.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty input"))?;
    let labels: Vec<String> = header.split(',').skip(1).map(str::to_string).collect();
    let mut counts = Vec::new();
    for (i, line) in lines {
        let mut fields = line.split(',');
        let name = fields.next().unwrap_or_default();
        if labels.get(counts.len()).map(String::as_str) != Some(name) {
            return Err(bad(i + 1, "row label does not match header order"));
        }
        let row = fields
            .map(|f| f.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad(i + 1, "counts must be non-negative integers"))?;
        if row.len() != labels.len() {
            return Err(bad(i + 1, "wrong number of columns"));
        }
        counts.push(row);
    }
    if counts.len() != labels.len() {
        return Err(bad(labels.len() + 1, "matrix is not square"));
    }
    Ok((labels, ConfusionMatrix { counts }))
}

pub(crate) fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

const CELL: usize = 48;
const MARGIN: usize = 130;

/// White-to-navy shade for a cell at `t` in `[0, 1]`.
fn shade(t: f64) -> String {
    let mix = |hi: f64, lo: f64| (hi - t * (hi - lo)).round() as u8;
    format!("rgb({},{},{})", mix(255.0, 8.0), mix(255.0, 48.0), mix(255.0, 107.0))
}

/// Heatmap with one `<rect class="cell">` per matrix entry; fill intensity is
/// proportional to the count and the count is printed in the cell.
pub fn render_confusion_svg(confusion: &ConfusionMatrix, labels: &LabelSet) -> String {
    let k = confusion.k();
    let size = MARGIN + k * CELL + 10;
    let max = confusion.max_count().max(1) as f64;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="11">"#
    )
    .ok();
    writeln!(out, r#"  <title>Confusion matrix (rows = true, columns = predicted)</title>"#).ok();
    for (i, name) in labels.names().iter().enumerate().take(k) {
        let name = xml_escape(name);
        let centre = MARGIN + i * CELL + CELL / 2;
        writeln!(
            out,
            r#"  <text class="row-label" x="{}" y="{}" text-anchor="end" dominant-baseline="middle">{name}</text>"#,
            MARGIN - 6,
            centre
        )
        .ok();
        writeln!(
            out,
            r#"  <text class="col-label" x="{centre}" y="{}" text-anchor="start" transform="rotate(-60 {centre} {})">{name}</text>"#,
            MARGIN - 6,
            MARGIN - 6
        )
        .ok();
    }
    for (t, row) in confusion.counts.iter().enumerate() {
        for (p, &count) in row.iter().enumerate() {
            let level = count as f64 / max;
            let (x, y) = (MARGIN + p * CELL, MARGIN + t * CELL);
            writeln!(
                out,
                r#"  <rect class="cell" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="rgb(200,200,200)" data-true="{t}" data-predicted="{p}" data-count="{count}"/>"#,
                shade(level)
            )
            .ok();
            writeln!(
                out,
                r#"  <text class="count" x="{}" y="{}" text-anchor="middle" dominant-baseline="middle" fill="{}">{count}</text>"#,
                x + CELL / 2,
                y + CELL / 2,
                if level > 0.5 { "white" } else { "black" }
            )
            .ok();
        }
    }
    out.push_str("</svg>\n");
    out
}
