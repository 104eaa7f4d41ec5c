//! One function per subcommand. Each reads its inputs through a [`Run`],
//! writes every artifact through it and finishes with a manifest.

use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use rhetrel_core::corpus::{self, class_histogram, LabeledPair};
use rhetrel_core::dataset::{encode_labels, oversample, stratified_split, EncodedDataset, SplitRatios};
use rhetrel_core::evaluation::{self, confusion_matrix, confusion_pairs, rank_errors, EvalReport, Predictions};
use rhetrel_core::features::{build_design_matrix, load_embedding_file, DesignMatrix, FeatureConfig, FeatureMode};
use rhetrel_core::predictions::{parse_predictions_csv, write_predictions_csv};
use rhetrel_core::report::{render_report, ReportFormat};
use rhetrel_core::softmax::{self, Hyperparams, SoftmaxModel};
use rhetrel_core::LabelSet;
use serde_json::json;

use crate::config::Config;
use crate::manifest::{io_error, Run};
use crate::{
    AnalyzeArgs, BalanceArgs, CliError, EvaluateArgs, FeaturizeArgs, IngestArgs, ReportArgs, SplitArgs, TrainArgs,
};

const DEFAULT_RATIOS: [f64; 3] = [0.6, 0.2, 0.2];

fn read_pairs(run: &mut Run, path: &Path, labels: &LabelSet) -> Result<Vec<LabeledPair>, CliError> {
    let text = run.read(path)?;
    corpus::parse_pair_csv(&text, labels).map_err(|e| CliError::input(path, e))
}

fn read_dataset(run: &mut Run, path: &Path, labels: &LabelSet) -> Result<EncodedDataset, CliError> {
    let pairs = read_pairs(run, path, labels)?;
    encode_labels(&pairs, labels).map_err(|e| CliError::input(path, e))
}

fn histogram(ds: &EncodedDataset) -> IndexMap<String, usize> {
    class_histogram(&ds.to_pairs(), &ds.label_set)
}

fn ratios(flag: Option<Vec<f64>>, cfg: &Config, section: &str) -> Result<SplitRatios, CliError> {
    let r: Vec<f64> = cfg.resolve(flag, section, "ratios", DEFAULT_RATIOS.to_vec())?;
    let [train, validation, test] = r[..] else {
        return Err(CliError::Usage(format!("--ratios needs 3 values, got {}", r.len())));
    };
    SplitRatios::new(train, validation, test).map_err(|e| CliError::Usage(e.to_string()))
}

fn print_histogram(hist: &IndexMap<String, usize>) {
    let width = hist.keys().map(|k| k.len()).max().unwrap_or(0);
    for (label, count) in hist {
        println!("{label:<width$}  {count}");
    }
    println!("{:<width$}  {}", "total", hist.values().sum::<usize>());
}

/// Files to ingest from one `--input` argument, directories expanded in name order.
fn expand_input(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = std::fs::read_dir(path)
        .map_err(|e| io_error(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("rsta" | "csv")))
        .collect::<Vec<_>>();
    files.sort();
    if files.is_empty() {
        return Err(CliError::input(path, "no .rsta or .csv files"));
    }
    Ok(files)
}

pub fn ingest(args: IngestArgs, _cfg: &Config) -> Result<(), CliError> {
    let labels = LabelSet::canonical();
    let mut run = Run::new("ingest", &args.out.out_dir)?;
    let mut files = Vec::new();
    for input in &args.input {
        files.extend(expand_input(input)?);
    }
    run.param("input", &args.input);

    let mut pairs = Vec::new();
    let mut documents = Vec::new();
    for file in &files {
        if file.extension().and_then(|e| e.to_str()) == Some("csv") {
            pairs.extend(read_pairs(&mut run, file, &labels)?);
            continue;
        }
        let text = run.read(file)?;
        let doc = corpus::parse_standoff(&text, &labels).map_err(|e| CliError::input(file, e))?;
        if documents.contains(&doc.doc_id) {
            return Err(CliError::input(file, format!("document `{}` was already ingested", doc.doc_id)));
        }
        pairs.extend(corpus::pairs_from_document(&doc).map_err(|e| CliError::input(file, e))?);
        documents.push(doc.doc_id);
    }

    let hist = class_histogram(&pairs, &labels);
    run.write("pairs.csv", corpus::write_pair_csv(&pairs))?;
    run.write_json("histogram.json", &hist)?;
    run.summary(json!({ "pairs": pairs.len(), "documents": documents, "histogram": hist }));
    run.finish("ingest.manifest.json")?;
    print_histogram(&hist);
    Ok(())
}

pub fn split(args: SplitArgs, cfg: &Config) -> Result<(), CliError> {
    let labels = LabelSet::canonical();
    let ratios = ratios(args.ratios, cfg, "split")?;
    let seed = cfg.seed(args.seed, "split")?;
    let allow_empty = args.allow_empty_classes || cfg.resolve(None, "split", "allow_empty_classes", false)?;

    let mut run = Run::new("split", &args.out.out_dir)?;
    run.param("input", &args.input);
    run.param("ratios", ratios);
    run.param("seed", seed);
    run.param("allow_empty_classes", allow_empty);
    let ds = read_dataset(&mut run, &args.input, &labels)?;
    let parts = stratified_split(&ds, ratios, seed, !allow_empty).map_err(|e| CliError::input(&args.input, e))?;

    let mut counts = IndexMap::new();
    for (name, part) in [("train", &parts.train), ("validation", &parts.validation), ("test", &parts.test)] {
        run.write(&format!("{name}.csv"), corpus::write_pair_csv(&part.to_pairs()))?;
        counts.insert(name, histogram(part));
        println!("{name:<10}  {}", part.len());
    }
    run.summary(json!({ "counts": counts, "balance_policy": "none" }));
    run.finish("split.manifest.json")?;
    Ok(())
}

pub fn balance(args: BalanceArgs, cfg: &Config) -> Result<(), CliError> {
    let labels = LabelSet::canonical();
    let target: usize = cfg.resolve(args.target, "balance", "target", 25)?;
    let seed = cfg.seed(args.seed, "balance")?;
    let before_split = args.balance_before_split || cfg.resolve(None, "balance", "balance_before_split", false)?;
    let policy = if before_split {
        "balance-before-split"
    } else {
        "balance-after-split"
    };

    let mut run = Run::new("balance", &args.out.out_dir)?;
    run.param("input", &args.input);
    run.param("target", target);
    run.param("seed", seed);
    run.param("balance_policy", policy);
    let ds = read_dataset(&mut run, &args.input, &labels)?;
    let balanced = oversample(&ds, target, seed).map_err(|e| CliError::input(&args.input, e))?;

    let hist = histogram(&balanced);
    run.write("balanced.csv", corpus::write_pair_csv(&balanced.to_pairs()))?;
    run.write_json("balanced.histogram.json", &hist)?;
    let mut summary = json!({
        "balance_policy": policy,
        "before": histogram(&ds),
        "after": hist,
        "added": balanced.len() - ds.len(),
    });

    if before_split {
        let ratios = ratios(args.ratios, cfg, "balance")?;
        run.param("ratios", ratios);
        let parts = stratified_split(&balanced, ratios, seed, true).map_err(|e| CliError::input(&args.input, e))?;
        let mut counts = IndexMap::new();
        for (name, part) in [("train", &parts.train), ("validation", &parts.validation), ("test", &parts.test)] {
            run.write(&format!("{name}.csv"), corpus::write_pair_csv(&part.to_pairs()))?;
            counts.insert(name, histogram(part));
        }
        summary["counts"] = json!(counts);
    }
    run.summary(summary);
    run.finish("balance.manifest.json")?;
    print_histogram(&hist);
    Ok(())
}

pub fn featurize(args: FeaturizeArgs, cfg: &Config) -> Result<(), CliError> {
    let labels = LabelSet::canonical();
    let defaults = FeatureConfig::default();
    let mode = match cfg.resolve(args.mode, "featurize", "mode", "hash".to_string())?.as_str() {
        "hash" => FeatureMode::Hash,
        "embedding" => FeatureMode::Embedding,
        other => return Err(CliError::Usage(format!("--mode must be `hash` or `embedding`, got `{other}`"))),
    };
    let config = FeatureConfig {
        mode,
        dims: cfg.resolve(args.dims, "featurize", "dims", defaults.dims)?,
        ngram_orders: cfg.resolve(args.ngrams, "featurize", "ngrams", defaults.ngram_orders)?,
        embedding_dim: cfg.resolve(args.embedding_dim, "featurize", "embedding_dim", defaults.embedding_dim)?,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let embeddings: Option<PathBuf> = cfg.resolve(args.embeddings.map(Some), "featurize", "embeddings", None)?;
    if mode == FeatureMode::Embedding && embeddings.is_none() {
        return Err(CliError::Usage("--mode embedding requires --embeddings".into()));
    }

    let stem = args
        .input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("pairs")
        .to_string();
    let mut run = Run::new("featurize", &args.out.out_dir)?;
    run.param("input", &args.input);
    run.param("feature_config", &config);
    run.param("embeddings", &embeddings);
    let ds = read_dataset(&mut run, &args.input, &labels)?;
    let table = match (&embeddings, mode) {
        (Some(path), FeatureMode::Embedding) => {
            let text = run.read(path)?;
            Some(load_embedding_file(&text).map_err(|e| CliError::input(path, e))?)
        }
        _ => None,
    };
    let dm = build_design_matrix(&ds, &config, table.as_ref()).map_err(|e| CliError::input(&args.input, e))?;

    run.write_json(&format!("{stem}.features.json"), &dm)?;
    run.summary(json!({ "n": dm.n(), "d": dm.d() }));
    run.finish(&format!("{stem}.featurize.manifest.json"))?;
    println!("{stem}: {} x {}", dm.n(), dm.d());
    Ok(())
}

pub fn train(args: TrainArgs, cfg: &Config) -> Result<(), CliError> {
    let defaults = Hyperparams::default();
    let hyper = Hyperparams {
        max_iter: cfg.resolve(args.max_iter, "train", "max_iter", defaults.max_iter)?,
        learning_rate: cfg.resolve(args.lr, "train", "lr", defaults.learning_rate)?,
        l2: cfg.resolve(args.l2, "train", "l2", defaults.l2)?,
        tol: cfg.resolve(args.tol, "train", "tol", defaults.tol)?,
        backtracking: !args.no_backtracking && cfg.resolve(None, "train", "backtracking", true)?,
    };
    hyper.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let mut run = Run::new("train", &args.out.out_dir)?;
    run.param("features", &args.features);
    run.param("max_iter", hyper.max_iter);
    run.param("lr", hyper.learning_rate);
    run.param("l2", hyper.l2);
    run.param("tol", hyper.tol);
    run.param("backtracking", hyper.backtracking);
    let text = run.read(&args.features)?;
    let dm: DesignMatrix = serde_json::from_str(&text).map_err(|e| CliError::input(&args.features, e))?;
    let fitted = softmax::fit(&dm, &hyper, &LabelSet::canonical()).map_err(|e| CliError::input(&args.features, e))?;

    let predicted = softmax::predict(&fitted.model, &dm.x.view()).map_err(|e| CliError::Validation(e.to_string()))?;
    let train_accuracy = evaluation::accuracy(&dm.y, &predicted).map_err(|e| CliError::Validation(e.to_string()))?;
    run.write_json("model.json", &fitted.model)?;
    run.write_json("trace.json", &fitted.trace)?;
    run.summary(json!({
        "iterations": fitted.model.iterations,
        "initial_loss": fitted.trace[0],
        "final_loss": fitted.model.final_loss,
        "train_accuracy": train_accuracy,
    }));
    run.finish("train.manifest.json")?;
    println!(
        "iterations {}  loss {:.6} -> {:.6}  train accuracy {:.4}",
        fitted.model.iterations, fitted.trace[0], fitted.model.final_loss, train_accuracy
    );
    Ok(())
}

pub fn evaluate(args: EvaluateArgs, _cfg: &Config) -> Result<(), CliError> {
    let mut run = Run::new("evaluate", &args.out.out_dir)?;
    run.param("test", &args.test);
    run.param("model", &args.model);
    run.param("embeddings", &args.embeddings);
    run.param("predictions", &args.predictions);

    let (ds, labels, predictions) = if let Some(model_path) = &args.model {
        let text = run.read(model_path)?;
        let model: SoftmaxModel = serde_json::from_str(&text).map_err(|e| CliError::input(model_path, e))?;
        let labels = model.label_set.clone();
        let ds = read_dataset(&mut run, &args.test, &labels)?;
        let table = match (&args.embeddings, model.feature_config.mode) {
            (Some(path), FeatureMode::Embedding) => {
                let text = run.read(path)?;
                Some(load_embedding_file(&text).map_err(|e| CliError::input(path, e))?)
            }
            (None, FeatureMode::Embedding) => {
                return Err(CliError::Usage("the model uses embeddings; pass --embeddings".into()))
            }
            _ => None,
        };
        let dm = build_design_matrix(&ds, &model.feature_config, table.as_ref())
            .map_err(|e| CliError::input(&args.test, e))?;
        let proba = softmax::predict_proba(&model, &dm.x.view()).map_err(|e| CliError::input(model_path, e))?;
        let predictions = Predictions::Probabilities(proba);
        run.write("predictions.csv", write_predictions_csv(&predictions, &labels))?;
        (ds, labels, predictions)
    } else {
        let path = args.predictions.as_ref().expect("clap requires --model or --predictions");
        let labels = LabelSet::canonical();
        let ds = read_dataset(&mut run, &args.test, &labels)?;
        let text = run.read(path)?;
        let predictions = parse_predictions_csv(&text, &labels, ds.len()).map_err(|e| CliError::input(path, e))?;
        (ds, labels, predictions)
    };

    let report = evaluation::evaluate(&ds.labels(), &predictions, &labels).map_err(|e| CliError::Validation(e.to_string()))?;
    run.write_json("report.json", &report)?;
    run.summary(json!({
        "n": report.n,
        "accuracy": report.accuracy,
        "weighted_f1": report.weighted_f1,
        "mean_cross_entropy": report.mean_cross_entropy,
    }));
    run.finish("evaluate.manifest.json")?;
    print!("{}", rhetrel_core::report::render_text(&report));
    Ok(())
}

pub fn analyze(args: AnalyzeArgs, cfg: &Config) -> Result<(), CliError> {
    let labels = LabelSet::canonical();
    let top_k: usize = cfg.resolve(args.top_k, "analyze", "top_k", 5)?;
    let mut run = Run::new("analyze", &args.out.out_dir)?;
    run.param("test", &args.test);
    run.param("predictions", &args.predictions);
    run.param("top_k", top_k);
    let ds = read_dataset(&mut run, &args.test, &labels)?;
    let text = run.read(&args.predictions)?;
    let predictions =
        parse_predictions_csv(&text, &labels, ds.len()).map_err(|e| CliError::input(&args.predictions, e))?;
    let Predictions::Probabilities(proba) = &predictions else {
        return Err(CliError::input(&args.predictions, "error analysis needs prob_<Label> columns"));
    };

    let errors = rank_errors(&ds, &proba.view(), top_k).map_err(|e| CliError::Validation(e.to_string()))?;
    let confusion =
        confusion_matrix(&ds.labels(), &predictions.labels(), labels.len()).map_err(|e| CliError::Validation(e.to_string()))?;
    let pairs = confusion_pairs(&confusion, &labels);
    run.write_json("errors.json", &json!({ "top_errors": errors, "confusion_pairs": pairs }))?;
    run.summary(json!({ "misclassified": confusion.total() - confusion.trace() }));
    run.finish("analyze.manifest.json")?;

    for e in &errors {
        println!("#{:<4} {:.4}  {} -> {}", e.id, e.loss, e.true_label, e.predicted_label);
    }
    for p in pairs.iter().take(top_k) {
        println!("{} -> {}: {}", p.true_label, p.predicted_label, p.count);
    }
    Ok(())
}

pub fn report(args: ReportArgs, cfg: &Config) -> Result<(), CliError> {
    let format_name: String = cfg.resolve(args.format, "report", "format", "text".to_string())?;
    let format: ReportFormat = format_name.parse().map_err(|e: rhetrel_core::report::ReportError| CliError::Usage(e.to_string()))?;
    let mut run = Run::new("report", &args.out.out_dir)?;
    run.param("report", &args.report);
    run.param("format", format.extension());
    let text = run.read(&args.report)?;
    let report: EvalReport = serde_json::from_str(&text).map_err(|e| CliError::input(&args.report, e))?;
    let rendered = render_report(&report, format);
    let name = match format {
        ReportFormat::Text => "report.txt",
        ReportFormat::Csv => "confusion.csv",
        ReportFormat::Svg => "confusion.svg",
    };
    let path = run.write(name, &rendered)?;
    run.finish(&format!("report-{}.manifest.json", format.extension()))?;
    if format == ReportFormat::Text {
        print!("{}", String::from_utf8_lossy(&rendered));
    } else {
        println!("{}", path.display());
    }
    Ok(())
}
