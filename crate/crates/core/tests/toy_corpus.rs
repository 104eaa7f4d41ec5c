use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rhetrel_core::corpus::{class_histogram, pairs_from_document, parse_standoff, CorpusError};
use rhetrel_core::dataset::{encode_labels, oversample, stratified_split, SplitRatios};
use rhetrel_core::features::{build_design_matrix, EmbeddingTable, FeatureConfig};
use rhetrel_core::softmax::{fit, Hyperparams};
use rhetrel_core::{LabelSet, LabeledPair};

fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/toy")
}

fn toy_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(toy_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "rsta"))
        .collect();
    files.sort();
    files
}

fn toy_pairs() -> Vec<LabeledPair> {
    let labels = LabelSet::canonical();
    toy_files()
        .iter()
        .flat_map(|p| {
            let doc = parse_standoff(&fs::read_to_string(p).unwrap(), &labels).unwrap();
            pairs_from_document(&doc).unwrap()
        })
        .collect()
}

#[test]
fn corpus_has_ten_documents_and_all_relations() {
    assert!(toy_files().len() >= 10);
    let hist = class_histogram(&toy_pairs(), &LabelSet::canonical());
    assert!(hist.values().all(|&c| c > 0), "{hist:?}");
}

#[test]
fn histogram_matches_rel_line_tally() {
    // Count the last field of every `REL` line straight from the files.
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    for path in toy_files() {
        for line in fs::read_to_string(path).unwrap().lines() {
            if let Some(rest) = line.strip_prefix("REL ") {
                *tally.entry(rest.rsplit(' ').next().unwrap().to_string()).or_default() += 1;
            }
        }
    }
    let pairs = toy_pairs();
    let hist = class_histogram(&pairs, &LabelSet::canonical());
    for (label, count) in &hist {
        assert_eq!(tally.get(label).copied().unwrap_or(0), *count, "{label}");
    }
    assert_eq!(hist.values().sum::<usize>(), pairs.len());
}

#[test]
fn every_unit_is_a_trimmed_substring() {
    let labels = LabelSet::canonical();
    for path in toy_files() {
        let doc = parse_standoff(&fs::read_to_string(path).unwrap(), &labels).unwrap();
        let pairs = pairs_from_document(&doc).unwrap();
        for (rel, pair) in doc.relations.iter().zip(&pairs) {
            for (id, unit) in [(&rel.source, &pair.edu1), (&rel.target, &pair.edu2)] {
                let span = doc.span(id).unwrap();
                let chars: String = doc.text.chars().skip(span.start).take(span.end - span.start).collect();
                assert_eq!(chars.trim(), unit);
            }
        }
    }
}

#[test]
fn malformed_fixtures_are_rejected() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/malformed");
    let labels = LabelSet::canonical();
    let parse = |name: &str| parse_standoff(&fs::read_to_string(dir.join(name)).unwrap(), &labels).unwrap_err();
    assert!(matches!(parse("bad_offset.rsta"), CorpusError::BadOffset { line: 4, .. }));
    assert!(matches!(parse("dangling_relation.rsta"), CorpusError::DanglingRelation { line: 5, .. }));
    assert!(matches!(parse("duplicate_span_id.rsta"), CorpusError::DuplicateSpanId { line: 4, .. }));
    assert!(matches!(parse("unknown_label.rsta"), CorpusError::UnknownLabel { .. }));
    assert!(matches!(parse("syntax_error.rsta"), CorpusError::SyntaxError { line: 3, .. }));
}

#[test]
fn one_hot_embeddings_build_the_one_hot_matrix() {
    let labels = LabelSet::canonical();
    let ds = encode_labels(&toy_pairs(), &labels).unwrap();
    let table = EmbeddingTable {
        dim: 8,
        model: "one-hot".into(),
        pooling: "none".into(),
        rows: ds
            .items
            .iter()
            .map(|it| (it.id, (0..8).map(|c| if c == it.y { 1.0 } else { 0.0 }).collect()))
            .collect(),
    };
    let dm = build_design_matrix(&ds, &FeatureConfig::embedding(8), Some(&table)).unwrap();
    for (i, it) in ds.items.iter().enumerate() {
        for c in 0..8 {
            assert_eq!(dm.x[[i, c]], f64::from(u8::from(c == it.y)));
        }
        assert_eq!(dm.ids[i], it.id);
    }

    // Oversampled duplicates reuse the vector of their source row.
    let balanced = oversample(&ds, 12, 1).unwrap();
    let dm = build_design_matrix(&balanced, &FeatureConfig::embedding(8), Some(&table)).unwrap();
    assert_eq!(dm.n(), 96);
}

#[test]
fn default_training_on_balanced_toy_set_is_monotone() {
    let labels = LabelSet::canonical();
    let ds = encode_labels(&toy_pairs(), &labels).unwrap();
    let split = stratified_split(&ds, SplitRatios::default(), 7, true).unwrap();
    let train = oversample(&split.train, 25, 7).unwrap();
    assert_eq!(train.class_counts(), [25; 8]);
    let dm = build_design_matrix(&train, &FeatureConfig::default(), None).unwrap();
    let hyper = Hyperparams {
        max_iter: 300,
        ..Hyperparams::default()
    };
    let run = fit(&dm, &hyper, &labels).unwrap();
    assert!((run.trace[0] - 8f64.ln()).abs() < 1e-9);
    assert!(run.trace.windows(2).all(|w| w[1] <= w[0]));
    let again = fit(&dm, &hyper, &labels).unwrap();
    assert_eq!(run.model, again.model);
}
