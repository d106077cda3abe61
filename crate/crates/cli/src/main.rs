//! threatsift: train novelty classifiers on CVE descriptions, classify text
//! streams, rank by threat relevance, link to similar CVE entries and
//! evaluate against labeled corpora.
//!
//! Exit codes: 0 success, 2 usage error, 4 a convergence warning escalated
//! by --strict, 3 any data, format or i/o error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use threatsift_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "threatsift", version, about)]
struct Cli {
    /// JSON file with default values for omitted options.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Treat warnings (e.g. solver hitting its update cap) as fatal.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a novelty model on a CVE feed and write a model file.
    Train(TrainArgs),
    /// Classify documents with a trained model, emitting results JSONL.
    Classify(ClassifyArgs),
    /// Rank documents by threat-relevance weight, emitting the top k.
    Rank(RankArgs),
    /// Retrieve the most similar CVE entries for each document.
    Link(LinkArgs),
    /// Compute precision/recall/F1 for classified results or the CVE-id baseline.
    Eval(EvalArgs),
    /// Sweep the decision threshold over a labeled corpus, emitting a PR curve CSV.
    Sweep(SweepArgs),
    /// Print the active stopword list, one term per line.
    StopwordsDump(StopwordsDumpArgs),
    /// Generate a seeded synthetic labeled corpus and CVE feed.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKindArg {
    Centroid,
    Ocsvm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Linear,
    Rbf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FeedFormatArg {
    Jsonl,
    #[value(name = "nvd-json")]
    NvdJson,
}

#[derive(Args)]
struct TrainArgs {
    /// CVE feed to train on.
    #[arg(long, value_name = "FILE")]
    feed: PathBuf,
    /// Feed layout.
    #[arg(long, value_enum, default_value = "jsonl")]
    feed_format: FeedFormatArg,
    /// Model kind to fit.
    #[arg(long, value_enum)]
    model: Option<ModelKindArg>,
    /// Novelty threshold stored in a centroid model.
    #[arg(long)]
    threshold: Option<f64>,
    /// One-class SVM nu in (0, 1].
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,
    /// RBF kernel width.
    #[arg(long)]
    gamma: Option<f64>,
    /// Solver KKT tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Keep only entries published on or after this date (YYYY-MM-DD).
    #[arg(long)]
    from: Option<NaiveDate>,
    /// Keep only entries published on or before this date (YYYY-MM-DD).
    #[arg(long)]
    to: Option<NaiveDate>,
    /// Stopword file; defaults to the bundled English list.
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
    /// Where to write the model file.
    #[arg(long, short, value_name = "FILE")]
    output: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Documents to classify (JSONL with id and text).
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long, short, value_name = "FILE")]
    output: PathBuf,
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    /// Model file providing the training vocabulary.
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// How many documents to keep.
    #[arg(long, short)]
    k: Option<usize>,
    #[arg(long, short, value_name = "FILE")]
    output: PathBuf,
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
}

#[derive(Args)]
struct LinkArgs {
    /// CVE feed to index for linking.
    #[arg(long, value_name = "FILE")]
    feed: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    feed_format: FeedFormatArg,
    #[arg(long)]
    from: Option<NaiveDate>,
    #[arg(long)]
    to: Option<NaiveDate>,
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Matches per document (default 10).
    #[arg(long, short)]
    k: Option<usize>,
    #[arg(long, short, value_name = "FILE")]
    output: PathBuf,
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Labeled documents (JSONL with label on every entry).
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Results file from `classify` to evaluate.
    #[arg(long, value_name = "FILE", conflicts_with = "cve_baseline")]
    results: Option<PathBuf>,
    /// Evaluate the "collect documents containing a CVE id" baseline instead.
    #[arg(long)]
    cve_baseline: bool,
    /// Report destination; stdout when omitted.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// CSV destination (threshold,precision,recall,f1).
    #[arg(long, short, value_name = "FILE")]
    output: PathBuf,
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
}

#[derive(Args)]
struct StopwordsDumpArgs {
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
    /// Destination; stdout when omitted.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Seed for the generators.
    #[arg(long)]
    seed: Option<u64>,
    /// Labeled positive documents to generate.
    #[arg(long, default_value_t = 200)]
    positives: usize,
    /// Labeled negative documents to generate.
    #[arg(long, default_value_t = 200)]
    negatives: usize,
    /// CVE feed entries to generate.
    #[arg(long, default_value_t = 100)]
    cve_count: usize,
    /// Publication year for the synthetic feed.
    #[arg(long, default_value_t = 2017)]
    year: i32,
    #[arg(long, value_name = "FILE")]
    out_docs: PathBuf,
    #[arg(long, value_name = "FILE")]
    out_feed: PathBuf,
}

/// CLI failure carrying its process exit code.
enum CliError {
    Usage(String),
    Data(String),
    Convergence(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Convergence(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Convergence(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::InvalidArgument(_) => CliError::Usage(err.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = commands::FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Train(args) => commands::train(args, &config, cli.strict),
        Command::Classify(args) => commands::classify(args, &config),
        Command::Rank(args) => commands::rank(args, &config),
        Command::Link(args) => commands::link(args, &config),
        Command::Eval(args) => commands::eval(args, &config),
        Command::Sweep(args) => commands::sweep(args, &config),
        Command::StopwordsDump(args) => commands::stopwords_dump(args, &config),
        Command::Synth(args) => commands::synth(args, &config),
    }
}
