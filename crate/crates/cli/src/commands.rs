//! Command implementations: thin wiring from files through the library.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use threatsift_core::eval;
use threatsift_core::ingest::{self, CveFeed, CveFeedFormat, Document};
use threatsift_core::linker;
use threatsift_core::model::NoveltyModel;
use threatsift_core::ocsvm::{KernelSpec, OcsvmModel};
use threatsift_core::relevance;
use threatsift_core::synth;
use threatsift_core::textprep::{load_stopwords, normalize, StopwordSet};
use threatsift_core::vectorspace::{embed, SparseVector, Vocabulary};
use threatsift_core::{CentroidModel, Label, ResultRecord};

use crate::{
    ClassifyArgs, CliError, EvalArgs, FeedFormatArg, KernelArg, LinkArgs, ModelKindArg, RankArgs,
    StopwordsDumpArgs, SweepArgs, SynthArgs, TrainArgs,
};

/// Defaults read from `--config`; explicit flags win over these, and these
/// win over the built-in defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub stopwords: Option<PathBuf>,
    pub model: Option<String>,
    pub threshold: Option<f64>,
    pub nu: Option<f64>,
    pub kernel: Option<String>,
    pub gamma: Option<f64>,
    pub tol: Option<f64>,
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let raw = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&raw)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

fn feed_format(arg: FeedFormatArg) -> CveFeedFormat {
    match arg {
        FeedFormatArg::Jsonl => CveFeedFormat::Jsonl,
        FeedFormatArg::NvdJson => CveFeedFormat::NvdJson,
    }
}

fn stopwords_for(flag: Option<&Path>, config: &FileConfig) -> Result<StopwordSet, CliError> {
    let path = flag.or(config.stopwords.as_deref());
    Ok(load_stopwords(path)?)
}

fn load_feed_filtered(
    path: &Path,
    format: FeedFormatArg,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
    config: &FileConfig,
) -> Result<CveFeed, CliError> {
    let mut feed = ingest::load_cve_feed(path, feed_format(format))?;
    let from = from.or(config.from);
    let to = to.or(config.to);
    if from.is_some() || to.is_some() {
        let from = from.unwrap_or(NaiveDate::MIN);
        let to = to.unwrap_or(NaiveDate::MAX);
        feed.entries = ingest::filter_by_date(feed.entries, from, to)?;
    }
    Ok(feed)
}

fn write_jsonl<T: Serialize>(records: &[T], path: &Path) -> Result<(), CliError> {
    let mut out = Vec::new();
    for record in records {
        serde_json::to_writer(&mut out, record)
            .map_err(|e| CliError::Data(format!("serialize for {}: {e}", path.display())))?;
        out.push(b'\n');
    }
    fs::write(path, out).map_err(|e| CliError::Data(format!("write {}: {e}", path.display())))
}

pub fn train(args: TrainArgs, config: &FileConfig, strict: bool) -> Result<(), CliError> {
    let stopwords = stopwords_for(args.stopwords.as_deref(), config)?;
    let feed = load_feed_filtered(&args.feed, args.feed_format, args.from, args.to, config)?;
    if feed.entries.is_empty() {
        return Err(CliError::Data(format!(
            "no usable CVE entries in {} after filtering",
            args.feed.display()
        )));
    }

    let tokenized: Vec<Vec<String>> = feed
        .entries
        .iter()
        .map(|e| normalize(&e.description, &stopwords))
        .collect();
    let vocab = Vocabulary::fit(&tokenized)?;
    let vectors: Vec<SparseVector> = tokenized.iter().map(|t| embed(t, &vocab)).collect();

    let kind = args
        .model
        .or(match config.model.as_deref() {
            Some("centroid") => Some(ModelKindArg::Centroid),
            Some("ocsvm") => Some(ModelKindArg::Ocsvm),
            _ => None,
        })
        .unwrap_or(ModelKindArg::Centroid);

    let model: NoveltyModel = match kind {
        ModelKindArg::Centroid => {
            let threshold = args.threshold.or(config.threshold).unwrap_or(0.5);
            CentroidModel::fit(&vectors, threshold, vocab.clone())?.into()
        }
        ModelKindArg::Ocsvm => {
            let nu = args.nu.or(config.nu).unwrap_or(0.5);
            let gamma = args.gamma.or(config.gamma).unwrap_or(1.0);
            let kernel = match args.kernel.or(match config.kernel.as_deref() {
                Some("linear") => Some(KernelArg::Linear),
                Some("rbf") => Some(KernelArg::Rbf),
                _ => None,
            }) {
                Some(KernelArg::Linear) => KernelSpec::Linear,
                _ => KernelSpec::Rbf { gamma },
            };
            let tol = args.tol.or(config.tol).unwrap_or(1e-6);
            OcsvmModel::train(&vectors, nu, kernel, tol, vocab.clone())?.into()
        }
    };

    model.save(&args.output)?;
    println!(
        "trained on N={} documents, V={} terms ({} placeholder entries dropped)",
        vocab.corpus_size(),
        vocab.len(),
        feed.dropped
    );
    if !model.converged() {
        let warning = "solver hit the pair-update cap before reaching tolerance";
        if strict {
            return Err(CliError::Convergence(warning.to_string()));
        }
        eprintln!("warning: {warning}");
    }
    Ok(())
}

pub fn classify(args: ClassifyArgs, config: &FileConfig) -> Result<(), CliError> {
    let stopwords = stopwords_for(args.stopwords.as_deref(), config)?;
    let model = NoveltyModel::load(&args.model)?;
    let docs = ingest::load_jsonl(&args.input)?;
    let results: Vec<ResultRecord> = docs
        .iter()
        .map(|doc| {
            let (score, verdict) = model.assess(&normalize(&doc.text, &stopwords));
            ResultRecord {
                id: doc.id.clone(),
                verdict,
                score,
            }
        })
        .collect();
    ingest::write_results(&results, &args.output)?;
    Ok(())
}

pub fn rank(args: RankArgs, config: &FileConfig) -> Result<(), CliError> {
    let stopwords = stopwords_for(args.stopwords.as_deref(), config)?;
    let model = NoveltyModel::load(&args.model)?;
    let docs = ingest::load_jsonl(&args.input)?;
    let k = args.k.or(config.k).unwrap_or(3000);
    if k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    let ranked = relevance::top_k(&docs, &stopwords, model.vocab(), k);
    write_jsonl(&ranked, &args.output)
}

pub fn link(args: LinkArgs, config: &FileConfig) -> Result<(), CliError> {
    let stopwords = stopwords_for(args.stopwords.as_deref(), config)?;
    let feed = load_feed_filtered(&args.feed, args.feed_format, args.from, args.to, config)?;
    if feed.entries.is_empty() {
        return Err(CliError::Data(format!(
            "no usable CVE entries in {} after filtering",
            args.feed.display()
        )));
    }
    let k = args.k.or(config.k).unwrap_or(10);
    if k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    let index = linker::build_link_index(&feed.entries, &stopwords)?;
    let docs = ingest::load_jsonl(&args.input)?;
    let results: Vec<linker::LinkResult> = docs
        .iter()
        .map(|doc| linker::link(doc, &index, k, &stopwords))
        .collect();
    write_jsonl(&results, &args.output)
}

pub fn eval(args: EvalArgs, _config: &FileConfig) -> Result<(), CliError> {
    let docs = ingest::load_jsonl(&args.input)?;
    let confusion = if args.cve_baseline {
        eval::cve_baseline(&docs)?
    } else {
        let results_path = args
            .results
            .as_deref()
            .ok_or_else(|| CliError::Usage("pass --results <file> or --cve-baseline".into()))?;
        let results = ingest::load_results(results_path)?;
        let by_id: HashMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
        let mut verdicts = Vec::with_capacity(results.len());
        for record in &results {
            let doc = by_id.get(record.id.as_str()).ok_or_else(|| {
                CliError::Data(format!(
                    "result id {:?} not present in {}",
                    record.id,
                    args.input.display()
                ))
            })?;
            verdicts.push(((*doc).clone(), record.verdict));
        }
        eval::confusion_from(&verdicts)?
    };
    let report = eval::EvalReport::from_confusion(confusion);
    let mut json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Data(e.to_string()))?;
    json.push('\n');
    match &args.output {
        Some(path) => {
            fs::write(path, json)
                .map_err(|e| CliError::Data(format!("write {}: {e}", path.display())))?;
        }
        None => print!("{json}"),
    }
    Ok(())
}

pub fn sweep(args: SweepArgs, config: &FileConfig) -> Result<(), CliError> {
    let stopwords = stopwords_for(args.stopwords.as_deref(), config)?;
    let model = NoveltyModel::load(&args.model)?;
    let docs = ingest::load_jsonl(&args.input)?;
    let mut scored = Vec::with_capacity(docs.len());
    for doc in &docs {
        let label = doc
            .label
            .ok_or(threatsift_core::Error::MissingLabel { id: doc.id.clone() })?;
        let (score, _) = model.assess(&normalize(&doc.text, &stopwords));
        scored.push((label, score));
    }
    let curve = eval::sweep(&scored)?;
    fs::write(&args.output, curve.to_csv())
        .map_err(|e| CliError::Data(format!("write {}: {e}", args.output.display())))?;
    let best = eval::pick_threshold(&curve);
    println!("best threshold by F1: {best}");
    Ok(())
}

pub fn stopwords_dump(args: StopwordsDumpArgs, config: &FileConfig) -> Result<(), CliError> {
    let stopwords = stopwords_for(args.stopwords.as_deref(), config)?;
    let mut out = String::new();
    for word in stopwords.iter() {
        out.push_str(word);
        out.push('\n');
    }
    match &args.output {
        Some(path) => fs::write(path, out)
            .map_err(|e| CliError::Data(format!("write {}: {e}", path.display())))?,
        None => {
            std::io::stdout()
                .write_all(out.as_bytes())
                .map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    Ok(())
}

pub fn synth(args: SynthArgs, config: &FileConfig) -> Result<(), CliError> {
    let seed = args.seed.or(config.seed).unwrap_or(0);
    let mut rng = synth::rng_for_seed(seed);
    let threat_vocab = synth::synth_vocab("vuln", 50);
    let benign_vocab = synth::synth_vocab("daily", 50);

    let feed = synth::synth_cve_feed(&mut rng, &threat_vocab, args.cve_count, args.year);
    let mut docs = synth::synth_docs(
        &mut rng,
        &threat_vocab,
        args.positives,
        "pos",
        Label::Positive,
    );
    docs.extend(synth::synth_docs(
        &mut rng,
        &benign_vocab,
        args.negatives,
        "neg",
        Label::Negative,
    ));

    write_jsonl(&feed, &args.out_feed)?;
    write_jsonl(&docs, &args.out_docs)?;
    println!(
        "wrote {} feed entries to {} and {} documents to {}",
        feed.len(),
        args.out_feed.display(),
        docs.len(),
        args.out_docs.display()
    );
    Ok(())
}
