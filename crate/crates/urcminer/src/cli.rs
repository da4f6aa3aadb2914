//! Command-line pipeline: ingest → sample → featurize/vectorize → train →
//! eval/stats/predict, plus manifest verification.
//!
//! Exit codes: 0 success, 1 data or validation error, 2 usage error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use clap::{Args, Parser, Subcommand};

use crate::featurize::{featurize_threads, load_embeddings, Lexicon, Mode};
use crate::ingest::{
    load_annotations, parse_dump, read_threads_file, sample_answers, select_answers,
    write_threads, AnnotatedComment,
};
use crate::manifest::{verify_output, write_output_with_manifest};
use crate::metrics::classification_report;
use crate::models::{
    load as load_model, median_protocol, predict, train_gnb, train_logreg, train_rforest,
    ForestConfig, LogregConfig, ModelKind, TrainedModel,
};
use crate::textvec::{default_stopwords, fit_vocabulary, load_stopwords, transform, Vocabulary};
use crate::{empirics, DataMatrix, Error, Result, Scalar};

pub const STOPWORDS_ENV: &str = "URCMINER_STOPWORDS";

#[derive(Debug, Parser)]
#[command(name = "urcminer", version, about = "Detects update-request comments on Stack Overflow answers")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse data-dump XML files and select answer threads into a JSONL corpus.
    Ingest(IngestArgs),
    /// Draw a deterministic uniform sample of threads from a corpus.
    Sample(SampleArgs),
    /// Extract the per-comment feature matrix from a corpus.
    Featurize(FeaturizeArgs),
    /// Fit or apply a TF-IDF vocabulary over comment texts.
    Vectorize(VectorizeArgs),
    /// Train a classifier on a labeled feature matrix.
    Train(TrainArgs),
    /// Evaluate a trained model on a labeled feature matrix.
    Eval(EvalArgs),
    /// Compute corpus statistics from annotations (prevalence, latency, roles, scores).
    Stats(StatsArgs),
    /// Predict classes for an unlabeled feature matrix.
    Predict(PredictArgs),
    /// Check outputs against their manifest sidecars.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Posts XML file.
    #[arg(long)]
    posts: PathBuf,
    /// Comments XML file.
    #[arg(long)]
    comments: PathBuf,
    /// Users XML file.
    #[arg(long)]
    users: PathBuf,
    /// PostHistory XML file.
    #[arg(long)]
    history: PathBuf,
    /// Question tag to select, e.g. "java".
    #[arg(long)]
    tag: String,
    /// Keep answers with activity on or after this date (YYYY-MM-DD).
    #[arg(long)]
    cutoff: String,
    /// Output corpus (JSON lines, one thread per line).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Sample size.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct FeaturizeArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Feature mode: full or deploy.
    #[arg(long, default_value = "full")]
    mode: String,
    /// Annotation CSV; when given, rows carry class labels.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Label scheme when annotations are given: 2 or 3 classes.
    #[arg(long, default_value_t = 2)]
    classes: u8,
    /// Optional comment-embedding JSONL ({"comment_id": .., "vector": [..]}).
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Sentiment lexicon TSV overriding the bundled one.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Output feature CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VectorizeArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Existing vocabulary to apply; omitted = fit on this corpus.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Where to save a freshly fitted vocabulary.
    #[arg(long)]
    vocab_out: Option<PathBuf>,
    /// Annotation CSV; when given, rows carry class labels.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Label scheme when annotations are given: 2 or 3 classes.
    #[arg(long, default_value_t = 2)]
    classes: u8,
    /// Output TF-IDF CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Labeled feature CSV.
    #[arg(long)]
    features: PathBuf,
    /// Model kind: rforest/rf, logreg/lr, gnb/nb.
    #[arg(long)]
    model: String,
    /// Validation feature CSV for the median-of-runs protocol; defaults to
    /// the training set.
    #[arg(long)]
    validation: Option<PathBuf>,
    /// Runs for the median protocol (seeded models only).
    #[arg(long, default_value_t = 101)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trees per forest.
    #[arg(long, default_value_t = 100)]
    n_trees: usize,
    /// L2 penalty for logistic regression.
    #[arg(long, default_value_t = 1.0)]
    l2_lambda: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Variance floor factor for Gaussian naive Bayes.
    #[arg(long, default_value_t = 1e-9)]
    var_smoothing: f64,
    /// Output model JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    /// Labeled feature CSV.
    #[arg(long)]
    features: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the report as an aligned text table.
    #[arg(long)]
    text: bool,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the report as aligned text tables.
    #[arg(long)]
    text: bool,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Feature CSV (labels ignored if present).
    #[arg(long)]
    features: PathBuf,
    /// Output predictions (JSON lines); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Output files whose manifests to check.
    #[arg(required = true)]
    outputs: Vec<PathBuf>,
}

/// Parses argv and runs; the returned code is the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 2 for usage errors, 0 for --help/--version
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Featurize(a) => cmd_featurize(a),
        Command::Vectorize(a) => cmd_vectorize(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn parse_cutoff(s: &str) -> Result<DateTime<Utc>> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc())
        .map_err(|_| Error::InvalidArgument(format!("bad cutoff date {s:?}, expected YYYY-MM-DD")))
}

fn config_of(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn cmd_ingest(a: IngestArgs) -> Result<()> {
    let cutoff = parse_cutoff(&a.cutoff)?;
    let corpus = parse_dump(&a.posts, &a.comments, &a.users, &a.history)?;
    let threads = select_answers(&corpus, &a.tag, cutoff);
    let mut bytes = Vec::new();
    write_threads(&mut bytes, &threads)?;
    write_output_with_manifest(
        &a.out,
        &bytes,
        "ingest",
        config_of(&[("tag", a.tag.clone()), ("cutoff", a.cutoff.clone())]),
        &[&a.posts, &a.comments, &a.users, &a.history],
        vec![],
    )?;
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "summary": corpus.summary,
            "selected_threads": threads.len(),
        }))?
    );
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let threads = read_threads_file(&a.corpus)?;
    let sample = sample_answers(&threads, a.n, a.seed)?;
    let mut bytes = Vec::new();
    write_threads(&mut bytes, &sample)?;
    write_output_with_manifest(
        &a.out,
        &bytes,
        "sample",
        config_of(&[("n", a.n.to_string()), ("seed", a.seed.to_string())]),
        &[&a.corpus],
        vec![a.seed],
    )?;
    println!("sampled {} of {} threads", sample.len(), threads.len());
    Ok(())
}

fn labels_from_annotations(
    annotations: &[AnnotatedComment],
    classes: u8,
) -> Result<BTreeMap<i64, String>> {
    let label = |a: &AnnotatedComment| match classes {
        2 => Ok(a.label_binary().to_string()),
        3 => Ok(a.label_three_class().to_string()),
        other => Err(Error::InvalidArgument(format!("--classes must be 2 or 3, got {other}"))),
    };
    annotations.iter().map(|a| Ok((a.comment_id, label(a)?))).collect()
}

fn cmd_featurize(a: FeaturizeArgs) -> Result<()> {
    let mode: Mode = a.mode.parse()?;
    let threads = read_threads_file(&a.corpus)?;
    let labels = match &a.annotations {
        None => None,
        Some(path) => Some(labels_from_annotations(&load_annotations(path, &threads)?, a.classes)?),
    };
    let embeddings = a.embeddings.as_ref().map(load_embeddings).transpose()?;
    let lexicon = match &a.lexicon {
        None => Lexicon::bundled(),
        Some(path) => Lexicon::load(path)?,
    };
    let matrix: DataMatrix =
        featurize_threads(&threads, mode, embeddings.as_ref(), &lexicon, labels.as_ref())?;
    let mut bytes = Vec::new();
    matrix.write_csv(&mut bytes)?;
    let mut inputs: Vec<&Path> = vec![&a.corpus];
    inputs.extend(a.annotations.as_deref());
    inputs.extend(a.embeddings.as_deref());
    inputs.extend(a.lexicon.as_deref());
    write_output_with_manifest(
        &a.out,
        &bytes,
        "featurize",
        config_of(&[("mode", a.mode.clone()), ("classes", a.classes.to_string())]),
        &inputs,
        vec![],
    )?;
    println!("{} rows x {} features", matrix.n_rows(), matrix.n_cols());
    Ok(())
}

fn stopwords() -> Result<Vec<String>> {
    match std::env::var_os(STOPWORDS_ENV) {
        Some(path) => load_stopwords(PathBuf::from(path)),
        None => Ok(default_stopwords()),
    }
}

fn cmd_vectorize(a: VectorizeArgs) -> Result<()> {
    let threads = read_threads_file(&a.corpus)?;
    let labels = match &a.annotations {
        None => None,
        Some(path) => Some(labels_from_annotations(&load_annotations(path, &threads)?, a.classes)?),
    };
    let mut texts = Vec::new();
    let mut ids = Vec::new();
    for t in &threads {
        for c in &t.comments {
            texts.push(c.text.clone());
            ids.push(c.comment_id);
        }
    }
    let vocabulary = match &a.vocab {
        Some(path) => Vocabulary::load(path)?,
        None => fit_vocabulary(&texts, &stopwords()?),
    };
    if let Some(path) = &a.vocab_out {
        vocabulary.save(path)?;
    }
    let mut matrix: DataMatrix = transform(&texts, &ids, &vocabulary);
    if let Some(labels) = &labels {
        let joined: Result<Vec<String>> = matrix
            .ids
            .iter()
            .map(|id| {
                labels
                    .get(id)
                    .cloned()
                    .ok_or_else(|| Error::Validation(format!("no label for comment {id}")))
            })
            .collect();
        matrix.labels = Some(joined?);
    }
    let mut bytes = Vec::new();
    matrix.write_csv(&mut bytes)?;
    let mut inputs: Vec<&Path> = vec![&a.corpus];
    inputs.extend(a.vocab.as_deref());
    inputs.extend(a.annotations.as_deref());
    write_output_with_manifest(
        &a.out,
        &bytes,
        "vectorize",
        config_of(&[("classes", a.classes.to_string())]),
        &inputs,
        vec![],
    )?;
    println!("{} rows x {} terms", matrix.n_rows(), vocabulary.len());
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let kind: ModelKind = a.model.parse()?;
    let train_set = DataMatrix::read_csv_file(&a.features)?;
    let validation = match &a.validation {
        Some(path) => DataMatrix::read_csv_file(path)?,
        None => train_set.clone(),
    };
    let (model, accuracy): (TrainedModel<Scalar>, f64) = match kind {
        ModelKind::Rforest => {
            let train_fn = |seed: u64| {
                train_rforest(
                    &train_set,
                    &ForestConfig { n_trees: a.n_trees, min_samples_split: 2, seed },
                )
            };
            median_protocol(train_fn, &validation, a.k, a.seed)?
        }
        ModelKind::Logreg => {
            let model = train_logreg(
                &train_set,
                &LogregConfig { l2_lambda: a.l2_lambda, max_iter: a.max_iter, tol: a.tol },
            )?;
            let acc = crate::models::accuracy(&model, &validation)?;
            (model, acc)
        }
        ModelKind::Gnb => {
            let model = train_gnb(&train_set, a.var_smoothing)?;
            let acc = crate::models::accuracy(&model, &validation)?;
            (model, acc)
        }
    };
    let bytes = serde_json::to_vec(&model)?;
    let mut inputs: Vec<&Path> = vec![&a.features];
    inputs.extend(a.validation.as_deref());
    write_output_with_manifest(
        &a.out,
        &bytes,
        "train",
        config_of(&[
            ("model", a.model.clone()),
            ("k", a.k.to_string()),
            ("seed", a.seed.to_string()),
            ("n_trees", a.n_trees.to_string()),
            ("l2_lambda", a.l2_lambda.to_string()),
            ("max_iter", a.max_iter.to_string()),
            ("tol", a.tol.to_string()),
            ("var_smoothing", a.var_smoothing.to_string()),
        ]),
        &inputs,
        vec![a.seed],
    )?;
    println!("validation accuracy: {accuracy:.4}");
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let model: TrainedModel<Scalar> = load_model(&a.model)?;
    let matrix = DataMatrix::read_csv_file(&a.features)?;
    let truth = matrix
        .labels
        .clone()
        .ok_or_else(|| Error::Validation("eval requires a labeled feature CSV".into()))?;
    let predictions = predict(&model, &matrix)?;
    let report = classification_report(&truth, &predictions)?;
    let json = report.to_json()?;
    match &a.out {
        Some(path) => {
            write_output_with_manifest(
                path,
                json.as_bytes(),
                "eval",
                BTreeMap::new(),
                &[&a.model, &a.features],
                vec![],
            )?;
        }
        None => println!("{json}"),
    }
    if a.text {
        print!("{}", report.render_text());
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let threads = read_threads_file(&a.corpus)?;
    let annotations = load_annotations(&a.annotations, &threads)?;
    let report = empirics::empirics_report(&annotations, &threads)?;
    let json = report.to_json()?;
    match &a.out {
        Some(path) => {
            write_output_with_manifest(
                path,
                json.as_bytes(),
                "stats",
                BTreeMap::new(),
                &[&a.annotations, &a.corpus],
                vec![],
            )?;
        }
        None => println!("{json}"),
    }
    if a.text {
        print!("{}", report.render_text());
    }
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let model: TrainedModel<Scalar> = load_model(&a.model)?;
    let mut matrix = DataMatrix::read_csv_file(&a.features)?;
    matrix.labels = None;
    let predictions = predict(&model, &matrix)?;
    let mut bytes = Vec::new();
    for p in &predictions {
        serde_json::to_writer(&mut bytes, p)?;
        bytes.push(b'\n');
    }
    match &a.out {
        Some(path) => {
            write_output_with_manifest(
                path,
                &bytes,
                "predict",
                BTreeMap::new(),
                &[&a.model, &a.features],
                vec![],
            )?;
        }
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<()> {
    for output in &a.outputs {
        verify_output(output)?;
        println!("{}: ok", output.display());
    }
    Ok(())
}
