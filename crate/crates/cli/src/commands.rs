use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use m2c_core::encoder::{extract_corpus, load_corpus, write_corpus, EncodeOptions, ParallelPair};
use m2c_core::evaluator::{evaluate, split_corpus};
use m2c_core::extractor::TypeDatabase;
use m2c_core::querier::{translate_query, DeveloperQuery, QueryError};
use m2c_core::translator::{train, ModelError, TrainConfig, TranslationModel, Weights};
use thiserror::Error;

use crate::service;

pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_BAD_MODEL: i32 = 3;

const EXIT_CODES: &str = "Exit codes:\n  0  success\n  2  missing or unreadable input, invalid arguments, or port already in use\n  3  model file is corrupt or has an unsupported version";

#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_BAD_INPUT, message: message.into() }
    }
}

fn model_error(path: &Path, e: ModelError) -> CliError {
    let code = match e {
        ModelError::Io(_) => EXIT_BAD_INPUT,
        ModelError::CorruptModel(_) | ModelError::UnsupportedVersion(_) => EXIT_BAD_MODEL,
    };
    CliError { code, message: format!("{}: {e}", path.display()) }
}

/// Translate method names into Java expression templates.
#[derive(Debug, Parser)]
#[command(name = "m2c", version, after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine method invocations from a directory of Java sources into a pairs TSV.
    #[command(after_help = EXIT_CODES)]
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        /// Type database TSV; the bundled database is used when omitted.
        #[arg(long)]
        typedb: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also emit the detailed variant of every pair.
        #[arg(long)]
        detailed: bool,
    },
    /// Split a pairs TSV into training and test sets, keeping files together.
    #[command(after_help = EXIT_CODES)]
    Split {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        test_fraction: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Train a translation model from a pairs TSV.
    #[command(after_help = EXIT_CODES)]
    Train {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Longest phrase, in tokens.
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        lmax: u32,
        /// Language model order.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        ngram: u32,
        #[command(flatten)]
        weights: WeightArgs,
    },
    /// Translate a method name (plus variables and hint words) into an expression.
    #[command(after_help = EXIT_CODES)]
    Translate {
        #[arg(long)]
        model: PathBuf,
        /// Exact method name.
        #[arg(long, conflicts_with = "name_text", required_unless_present = "name_text")]
        name: Option<String>,
        /// Free text; the best suggested name is used.
        #[arg(long)]
        name_text: Option<String>,
        /// Variable type, repeatable, in argument order.
        #[arg(long = "var")]
        vars: Vec<String>,
        /// Hint word such as an operator, repeatable.
        #[arg(long = "word")]
        words: Vec<String>,
        /// Source token of the surrounding code, repeatable.
        #[arg(long)]
        context: Vec<String>,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        beam: u32,
    },
    /// Rank known method names against free text.
    #[command(after_help = EXIT_CODES)]
    Suggest {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        text: String,
        #[arg(short, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
    },
    /// Evaluate a model on a test pairs TSV and write the per-library report.
    #[command(after_help = EXIT_CODES)]
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        beam: u32,
    },
    /// Serve suggestion and translation over HTTP.
    #[command(after_help = EXIT_CODES)]
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    #[arg(long, default_value_t = 1.0)]
    w_fwd: f64,
    #[arg(long, default_value_t = 1.0)]
    w_rev: f64,
    #[arg(long, default_value_t = 1.0)]
    w_lm: f64,
    #[arg(long, default_value_t = 0.0)]
    w_len: f64,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract { corpus, typedb, out, detailed } => cmd_extract(&corpus, typedb.as_deref(), &out, detailed),
        Command::Split { pairs, train_out, test_out, test_fraction, seed } => {
            cmd_split(&pairs, &train_out, &test_out, test_fraction, seed)
        }
        Command::Train { pairs, out, lmax, ngram, weights } => {
            let weights = Weights { fwd: weights.w_fwd, rev: weights.w_rev, lm: weights.w_lm, len: weights.w_len };
            cmd_train(&pairs, &out, TrainConfig { lmax: lmax as usize, order: ngram as usize }, weights)
        }
        Command::Translate { model, name, name_text, vars, words, context, beam } => {
            let query = DeveloperQuery { name_text, chosen_name: name, variables: vars, words, context };
            cmd_translate(&model, query, beam as usize)
        }
        Command::Suggest { model, text, k } => cmd_suggest(&model, &text, k as usize),
        Command::Eval { model, test, report, beam } => cmd_eval(&model, &test, &report, beam as usize),
        Command::Serve { model, port, host } => cmd_serve(&model, &host, port),
    }
}

fn load_model(path: &Path) -> Result<TranslationModel, CliError> {
    TranslationModel::load(path).map_err(|e| model_error(path, e))
}

fn load_pairs(path: &Path) -> Result<Vec<ParallelPair>, CliError> {
    load_corpus(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn save_pairs(path: &Path, pairs: &[ParallelPair]) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::input(format!("{}: {e}", path.display()));
    let mut out = BufWriter::new(File::create(path).map_err(fail)?);
    write_corpus(&mut out, pairs).map_err(fail)?;
    out.flush().map_err(fail)
}

fn cmd_extract(corpus: &Path, typedb: Option<&Path>, out: &Path, detailed: bool) -> Result<(), CliError> {
    if !corpus.exists() {
        return Err(CliError::input(format!("{}: no such file or directory", corpus.display())));
    }
    let db = match typedb {
        Some(p) => TypeDatabase::load(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?,
        None => TypeDatabase::bundled(),
    };
    let result = extract_corpus(corpus, &db, EncodeOptions { detailed })
        .map_err(|e| CliError::input(format!("{}: {e}", corpus.display())))?;
    save_pairs(out, &result.pairs)?;
    eprintln!("{}", result.stats);
    if result.pairs.is_empty() {
        eprintln!("warning: no invocation pairs extracted from {}", corpus.display());
    }
    Ok(())
}

fn cmd_split(pairs: &Path, train_out: &Path, test_out: &Path, fraction: f64, seed: u64) -> Result<(), CliError> {
    let all = load_pairs(pairs)?;
    let (train, test) = split_corpus(&all, fraction, seed).map_err(|e| CliError::input(e.to_string()))?;
    save_pairs(train_out, &train)?;
    save_pairs(test_out, &test)?;
    eprintln!("train: {} pairs, test: {} pairs", train.len(), test.len());
    Ok(())
}

fn cmd_train(pairs: &Path, out: &Path, config: TrainConfig, weights: Weights) -> Result<(), CliError> {
    let corpus = load_pairs(pairs)?;
    let mut model = train(&corpus, config).map_err(|e| CliError::input(format!("{}: {e}", pairs.display())))?;
    model.weights = weights;
    model.save(out).map_err(|e| CliError::input(format!("{}: {e}", out.display())))?;
    eprintln!(
        "trained on {} pairs: {} source phrases, {} method names",
        corpus.len(),
        model.phrases.len(),
        model.names.len()
    );
    Ok(())
}

fn cmd_translate(model_path: &Path, mut query: DeveloperQuery, beam: usize) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    if query.chosen_name.is_none() {
        let text = query.name_text.clone().unwrap_or_default();
        let top = match model.names.suggest(&text, 1) {
            Ok(s) => s.into_iter().next(),
            Err(QueryError::EmptyIndex) => None,
            Err(e) => return Err(CliError::input(e.to_string())),
        };
        let top = top.ok_or_else(|| CliError::input(format!("no known method name matches {text:?}")))?;
        eprintln!("using suggested name {} (score {:.4})", top.name, top.score);
        query.chosen_name = Some(top.name);
    }
    let result = translate_query(&model, &query, beam).map_err(|e| CliError::input(e.to_string()))?;
    println!("display: {}", result.display);
    println!("raw: {}", result.raw_target);
    println!("score: {}", result.score);
    if !result.renderable {
        eprintln!("note: the name is unknown to the model; it was copied through unchanged");
    }
    Ok(())
}

fn cmd_suggest(model_path: &Path, text: &str, k: usize) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let suggestions = match model.names.suggest(text, k) {
        Ok(s) => s,
        Err(QueryError::EmptyIndex) => {
            eprintln!("warning: the model knows no method names");
            Vec::new()
        }
        Err(e) => return Err(CliError::input(e.to_string())),
    };
    for s in suggestions {
        println!("{}\t{:.4}", s.name, s.score);
    }
    Ok(())
}

fn cmd_eval(model_path: &Path, test: &Path, report_path: &Path, beam: usize) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let pairs = load_pairs(test)?;
    let report = evaluate(&model, &pairs, beam).map_err(|e| CliError::input(format!("{}: {e}", test.display())))?;
    report.write(report_path).map_err(|e| CliError::input(format!("{}: {e}", report_path.display())))?;
    println!("{}", report.total_row());
    Ok(())
}

fn cmd_serve(model_path: &Path, host: &str, port: u16) -> Result<(), CliError> {
    let model = Arc::new(load_model(model_path)?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::input(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| CliError::input(format!("cannot listen on {host}:{port}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| CliError::input(e.to_string()))?;
        eprintln!("listening on http://{addr}");
        axum::serve(listener, service::router(model))
            .await
            .map_err(|e| CliError::input(format!("server error: {e}")))
    })
}
