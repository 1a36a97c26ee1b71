//! The `doccat` command line.
//!
//! Exit codes: 0 success, 1 data or runtime error, 2 usage error. Results go
//! to stdout as `key=value` lines; diagnostics go to stderr.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{ArgAction, Args, ColorChoice, CommandFactory, FromArgMatches, Parser, Subcommand};
use doccat_core::corpus::{self, RawDocument};
use doccat_core::eval::{self, comparison_table, comparison_tsv, write_file};
use doccat_core::models::{preprocess_corpus, train as train_model, PipelineConfig};
use doccat_core::textprep::{load_stopwords, preprocess_document, PreprocessConfig, SuffixTable};
use doccat_core::{Classifier, LabeledCorpus, Selector, TrainedModel};

use config::{resolve, ConfigFile, HyperArgs, Resolved, UsageError};

#[derive(Debug, Parser)]
#[command(name = "doccat", version, about = "Bengali news document categorization")]
pub struct Cli {
    /// More log output on stderr (repeatable)
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,
    /// Worker threads [default: logical processors]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the tokenized form of a labeled corpus as JSONL
    Preprocess(PreprocessArgs),
    /// Select features and train one classifier
    Train(TrainArgs),
    /// Predict labels for raw text or JSONL documents
    Predict(PredictArgs),
    /// Score a trained model on a labeled test corpus
    Evaluate(EvaluateArgs),
    /// Train and evaluate all six feature/classifier combinations
    Benchmark(BenchmarkArgs),
}

/// Overrides for the shipped preprocessing resources.
#[derive(Debug, Clone, Default, Args)]
pub struct PrepArgs {
    /// Stopword list, one token per line
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Suffix table, `suffix<TAB>min_stem_chars` per line
    #[arg(long, value_name = "FILE")]
    pub suffixes: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Labeled corpus: a .jsonl file or a <label>/<file>.txt directory
    #[arg(long)]
    pub corpus: PathBuf,
    /// Tokenized JSONL to write
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub prep: PrepArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled training corpus (.jsonl or directory)
    #[arg(long)]
    pub corpus: PathBuf,
    /// Model file to write
    #[arg(long)]
    pub out: PathBuf,
    /// Feature pipeline
    #[arg(long, value_name = "tfidf|chi2")]
    pub features: Option<Selector>,
    /// Classifier
    #[arg(long, value_name = "nb|sgd|svm")]
    pub model: Option<Classifier>,
    /// Also write the vocabulary as `term<TAB>index<TAB>df` lines
    #[arg(long, value_name = "FILE")]
    pub export_vocab: Option<PathBuf>,
    /// Also write every training vector as `id<TAB>index:weight ...` lines
    #[arg(long, value_name = "FILE")]
    pub export_vectors: Option<PathBuf>,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub prep: PrepArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `train`
    #[arg(long)]
    pub model: PathBuf,
    /// A .jsonl file (label optional) or a single plain-text document
    #[arg(long)]
    pub input: PathBuf,
    /// TSV output `id<TAB>label<TAB>score`; stdout if omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Model file written by `train`
    #[arg(long)]
    pub model: PathBuf,
    /// Labeled test corpus
    #[arg(long)]
    pub corpus: PathBuf,
    /// Report JSON to write
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// Labeled training corpus
    #[arg(long)]
    pub train: PathBuf,
    /// Labeled test corpus
    #[arg(long)]
    pub test: PathBuf,
    /// Output directory for models, reports and comparison.tsv
    #[arg(long)]
    pub out: PathBuf,
    /// Put wall-clock training seconds into comparison.tsv (makes it run-dependent)
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub prep: PrepArgs,
}

fn no_color() -> bool {
    std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut command = Cli::command();
    if no_color() {
        command = command.color(ColorChoice::Never);
    }
    let cli = match command
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_logging(cli.verbose);
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                2
            } else {
                1
            }
        }
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let mut builder = env_logger::Builder::new();
    builder.filter_level(level).parse_default_env();
    if no_color() {
        builder.write_style(env_logger::WriteStyle::Never);
    }
    let _ = builder.try_init();
}

fn dispatch(cli: Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(UsageError("--threads must be at least 1".into()).into());
        }
        // fails only if a pool already exists (repeated in-process runs)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Preprocess(a) => cmd_preprocess(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Benchmark(a) => cmd_benchmark(&a),
    }
}

pub fn load_corpus(path: &Path) -> Result<LabeledCorpus> {
    let corpus = if path.is_dir() {
        corpus::load_dir(path)
    } else {
        corpus::load_jsonl(path)
    };
    corpus.with_context(|| format!("cannot load corpus {}", path.display()))
}

pub fn preprocess_config(prep: &PrepArgs) -> Result<PreprocessConfig> {
    let mut config = PreprocessConfig::default();
    if let Some(path) = &prep.stopwords {
        config.stopwords = load_stopwords(path)?;
    }
    if let Some(path) = &prep.suffixes {
        config.suffix_table = SuffixTable::load(path)?;
    }
    Ok(config)
}

fn resolve_hyper(hyper: &HyperArgs, selector: Option<Selector>, classifier: Option<Classifier>) -> Result<Resolved> {
    let file = match &hyper.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    Ok(resolve(hyper, selector, classifier, &file)?)
}

/// `SOURCE_DATE_EPOCH` when set, else `fallback`.
fn creation_time(fallback: impl FnOnce() -> u64) -> Result<u64> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("SOURCE_DATE_EPOCH is not an integer: {v:?}")).into()),
        Err(_) => Ok(fallback()),
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    write_file(path, bytes).map_err(Into::into)
}

pub fn cmd_preprocess(args: &PreprocessArgs) -> Result<i32> {
    let config = preprocess_config(&args.prep)?;
    let corpus = load_corpus(&args.corpus)?;
    let mut out = Vec::new();
    let mut tokens = 0;
    for doc in corpus.iter() {
        let tokenized = preprocess_document(doc, &config);
        tokens += tokenized.token_count();
        serde_json::to_writer(&mut out, &tokenized)?;
        out.push(b'\n');
    }
    write(&args.out, &out)?;
    println!("documents={}", corpus.len());
    println!("tokens={tokens}");
    Ok(0)
}

pub fn cmd_train(args: &TrainArgs) -> Result<i32> {
    let resolved = resolve_hyper(&args.hyper, args.features, args.model)?;
    let selector = resolved
        .selector
        .ok_or_else(|| UsageError("--features is required (tfidf or chi2)".into()))?;
    let classifier = resolved
        .classifier
        .ok_or_else(|| UsageError("--model is required (nb, sgd or svm)".into()))?;
    let pipeline = PipelineConfig {
        selector,
        chi: resolved.chi,
        preprocess: preprocess_config(&args.prep)?,
        ..PipelineConfig::default()
    };
    let corpus = load_corpus(&args.corpus)?;
    let mut outcome = train_model(&pipeline, classifier, &corpus, &resolved.hyper)?;
    outcome.model.created_unix_seconds = creation_time(|| outcome.model.created_unix_seconds)?;
    outcome.model.save(&args.out)?;
    if let Some(path) = &args.export_vocab {
        write(path, outcome.model.vocabulary.to_text().as_bytes())?;
    }
    if let Some(path) = &args.export_vectors {
        let docs = preprocess_corpus(&corpus, &outcome.model.preprocess);
        let mut lines = String::new();
        for doc in &docs {
            lines.push_str(&outcome.model.vectorize(doc).to_debug_line(&doc.id));
            lines.push('\n');
        }
        write(path, lines.as_bytes())?;
    }
    println!("method={}", outcome.model.method_name());
    println!("classes={}", outcome.model.class_labels().len());
    println!(
        "features={} train_sec={:.4}",
        outcome.n_features(),
        outcome.train_seconds
    );
    Ok(0)
}

fn load_model(path: &Path) -> Result<TrainedModel> {
    TrainedModel::load(path).with_context(|| format!("cannot use model {}", path.display()))
}

fn read_inputs(path: &Path) -> Result<Vec<RawDocument>> {
    if path.extension().is_some_and(|e| e == "jsonl") {
        return corpus::load_unlabeled_jsonl(path).with_context(|| format!("cannot read {}", path.display()));
    }
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not valid UTF-8", path.display()))?;
    let id = path
        .file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
    Ok(vec![RawDocument { id, text, label: None }])
}

pub fn cmd_predict(args: &PredictArgs) -> Result<i32> {
    let model = load_model(&args.model)?;
    let docs = read_inputs(&args.input)?;
    let mut tsv = String::new();
    for doc in &docs {
        let p = model.predict_text(&doc.text);
        writeln!(tsv, "{}\t{}\t{}", doc.id, model.label(&p), p.score())?;
    }
    match &args.out {
        Some(path) => {
            write(path, tsv.as_bytes())?;
            println!("documents={}", docs.len());
        }
        None => print!("{tsv}"),
    }
    Ok(0)
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<i32> {
    let model = load_model(&args.model)?;
    let corpus = load_corpus(&args.corpus)?;
    let report = eval::evaluate(&model, &corpus)?;
    write(&args.out, &report.to_json_bytes())?;
    println!("macro_precision={:.4}", report.macro_precision);
    println!("macro_recall={:.4}", report.macro_recall);
    println!("macro_f1={:.4}", report.macro_f1);
    println!("accuracy={:.4}", report.accuracy);
    Ok(0)
}

pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<i32> {
    let resolved = resolve_hyper(&args.hyper, None, None)?;
    let base = PipelineConfig {
        chi: resolved.chi,
        preprocess: preprocess_config(&args.prep)?,
        ..PipelineConfig::default()
    };
    let train = load_corpus(&args.train)?;
    let test = load_corpus(&args.test)?;
    // model files must not depend on when the benchmark ran
    let created = creation_time(|| 0)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;

    let mut rows = eval::benchmark(&train, &test, &base, &resolved.hyper);
    let mut reports = Vec::new();
    let mut failed = 0;
    for row in &mut rows {
        let slug = row.slug();
        match &mut row.outcome {
            Ok((model, report)) => {
                model.created_unix_seconds = created;
                model.save(args.out.join(format!("{slug}.model.json")))?;
                write(&args.out.join(format!("{slug}.report.json")), &report.to_json_bytes())?;
            }
            Err(e) => {
                eprintln!("error: {}: {e}", row.method_name);
                failed += 1;
            }
        }
    }
    for row in &rows {
        if let Ok((_, report)) = &row.outcome {
            reports.push(report);
        }
    }
    let tsv_path = args.out.join("comparison.tsv");
    write(&tsv_path, comparison_tsv(&reports, args.timing).as_bytes())?;
    print!("{}", comparison_table(&rows));
    println!("comparison={}", tsv_path.display());
    println!("failed={failed}");
    Ok(if failed > 0 { 1 } else { 0 })
}
