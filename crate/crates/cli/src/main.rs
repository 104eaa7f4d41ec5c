//! `rhetrel`: command-line front end for the relation classification pipeline.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn input(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        CliError::Input {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rhetrel", version, about = "Rhetorical relation classification toolkit")]
struct Cli {
    /// TOML file with default parameters (flags take precedence).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read standoff documents or pair CSVs into one pair CSV plus a class histogram.
    Ingest(IngestArgs),
    /// Stratified train/validation/test split of a pair CSV.
    Split(SplitArgs),
    /// Oversample minority classes up to a per-class target.
    Balance(BalanceArgs),
    /// Turn a pair CSV into a design matrix.
    Featurize(FeaturizeArgs),
    /// Fit a softmax regression model on a design matrix.
    Train(TrainArgs),
    /// Score a model or a predictions file against a labelled pair CSV.
    Evaluate(EvaluateArgs),
    /// List the most confident mistakes and the most frequent confusions.
    Analyze(AnalyzeArgs),
    /// Render an evaluation report as text, confusion CSV or confusion SVG.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct OutDir {
    /// Directory for outputs and the run manifest (created if missing).
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// `.rsta` standoff files, pair `.csv` files, or directories holding them.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Train, validation and test ratios [default: 0.6,0.2,0.2].
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub ratios: Option<Vec<f64>>,
    /// Seed [default: config, then $RHETREL_SEED, then 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip classes with no examples instead of failing.
    #[arg(long)]
    pub allow_empty_classes: bool,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct BalanceArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Examples per class after oversampling [default: 25].
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also split the balanced set. Duplicates can then land in evaluation
    /// parts next to their originals.
    #[arg(long)]
    pub balance_before_split: bool,
    /// Ratios for `--balance-before-split` [default: 0.6,0.2,0.2].
    #[arg(long, value_delimiter = ',', num_args = 3, requires = "balance_before_split")]
    pub ratios: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `hash` or `embedding` [default: hash].
    #[arg(long)]
    pub mode: Option<String>,
    /// Hash feature width [default: 2048].
    #[arg(long)]
    pub dims: Option<usize>,
    /// N-gram orders for hashing [default: 1,2].
    #[arg(long, value_delimiter = ',')]
    pub ngrams: Option<Vec<usize>>,
    /// Embedding JSON Lines file (embedding mode).
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Expected embedding width [default: 768].
    #[arg(long)]
    pub embedding_dim: Option<usize>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Design matrix written by `featurize`.
    #[arg(long)]
    pub features: PathBuf,
    /// [default: 3000]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// [default: 0.5]
    #[arg(long)]
    pub lr: Option<f64>,
    /// [default: 1.0]
    #[arg(long)]
    pub l2: Option<f64>,
    /// [default: 1e-6]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Take fixed-size steps instead of halving until the loss drops.
    #[arg(long)]
    pub no_backtracking: bool,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Labelled pair CSV.
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, conflicts_with = "predictions", required_unless_present = "predictions")]
    pub model: Option<PathBuf>,
    /// Embedding file for the test CSV when the model uses embeddings.
    #[arg(long, requires = "model")]
    pub embeddings: Option<PathBuf>,
    /// Predictions CSV from another source.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub test: PathBuf,
    /// Predictions CSV with probability columns.
    #[arg(long)]
    pub predictions: PathBuf,
    /// [default: 5]
    #[arg(long)]
    pub top_k: Option<usize>,
    #[command(flatten)]
    pub out: OutDir,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// `report.json` written by `evaluate`.
    #[arg(long)]
    pub report: PathBuf,
    /// `text`, `csv` or `svg` [default: text].
    #[arg(long)]
    pub format: Option<String>,
    #[command(flatten)]
    pub out: OutDir,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = config::Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => commands::ingest(a, &cfg),
        Command::Split(a) => commands::split(a, &cfg),
        Command::Balance(a) => commands::balance(a, &cfg),
        Command::Featurize(a) => commands::featurize(a, &cfg),
        Command::Train(a) => commands::train(a, &cfg),
        Command::Evaluate(a) => commands::evaluate(a, &cfg),
        Command::Analyze(a) => commands::analyze(a, &cfg),
        Command::Report(a) => commands::report(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
