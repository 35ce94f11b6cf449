//! Command-line front end for the pipeline.
//!
//! The interface is a thin orchestration layer: every subcommand resolves a
//! [`PipelineConfig`], calls into the library, writes its outputs plus a run
//! manifest, and prints a one-line summary. Configuration is resolved in a
//! fixed precedence order: built-in defaults, then `--config FILE`, then the
//! named flags, then repeated `--set key=value` overrides, then the
//! `CHARTLEX_OUTPUT_DIR` environment variable (output directory only).
//!
//! Reruns with unchanged inputs and configuration produce byte-identical
//! outputs; manifests record input digests rather than timestamps so this
//! holds for them too. On failure the process exits nonzero, and with
//! `--error-json` the error is also printed to stderr as a single JSON
//! object for machine consumption.

mod config;
mod manifest;
mod stages;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::abuse::AbuseError;
use crate::corpus::CorpusError;
use crate::langid::LangIdError;
use crate::lyricdoc::LyricError;
use crate::ngram::NgramError;
use crate::normalize::NormalizeError;
use crate::polarity::PolarityError;
use crate::sentiment::SentimentError;
use crate::trends::TrendsError;

pub use config::{PipelineConfig, PathsConfig, ThresholdConfig, TrainSettings, OUTPUT_DIR_ENV};
pub use manifest::{hash_file, write_atomic, RunManifest};
pub use stages::CaseStudyRow;

/// Anything a subcommand can fail with.
#[derive(Debug, Error)]
pub enum CliError {
    /// Configuration file or override rejected.
    #[error("configuration error: {0}")]
    Config(String),

    /// A required input file is absent or unreadable.
    #[error("missing input `{path}`: {detail}")]
    MissingInput { path: PathBuf, detail: String },

    /// `case-study` was asked about a song the parsed store does not hold.
    #[error("song `{0}` not found")]
    SongNotFound(String),

    /// A chunk of the case-study song has no prediction to join against.
    #[error("no prediction for chunk `{0}`")]
    MissingChunkPrediction(String),

    /// `sentiment` needs either a trained model or an imported predictions
    /// file, and neither was available.
    #[error("no predictions available: train a model or pass --import")]
    MissingPredictions,

    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Lyric(#[from] LyricError),
    #[error(transparent)]
    Abuse(#[from] AbuseError),
    #[error(transparent)]
    LangId(#[from] LangIdError),
    #[error(transparent)]
    Ngram(#[from] NgramError),
    #[error(transparent)]
    Sentiment(#[from] SentimentError),
    #[error(transparent)]
    Polarity(#[from] PolarityError),
    #[error(transparent)]
    Trends(#[from] TrendsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Stable machine-readable kind for the `--error-json` channel.
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::MissingInput { .. } => "missing_input",
            CliError::SongNotFound(_) => "song_not_found",
            CliError::MissingChunkPrediction(_) => "missing_chunk_prediction",
            CliError::MissingPredictions => "missing_predictions",
            CliError::Corpus(_) => "corpus",
            CliError::Normalize(_) => "normalize",
            CliError::Lyric(_) => "lyrics",
            CliError::Abuse(_) => "abuse",
            CliError::LangId(_) => "language",
            CliError::Ngram(_) => "ngram",
            CliError::Sentiment(_) => "sentiment",
            CliError::Polarity(_) => "polarity",
            CliError::Trends(_) => "trends",
            CliError::Io(_) => "io",
            CliError::Json(_) => "json",
            CliError::Csv(_) => "csv",
        }
    }
}

/// Longitudinal analysis of chart-song lyrics.
#[derive(Debug, Parser)]
#[command(name = "chartlex", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(flatten)]
    pub overrides: GlobalOverrides,

    #[command(subcommand)]
    pub command: Command,
}

/// Flags accepted by every subcommand, layered over the config file.
#[derive(Debug, Args)]
pub struct GlobalOverrides {
    /// Configuration file (JSON) to layer over the built-in defaults.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Seed for every stochastic step (splits, shuffles, training).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Polarity weights file.
    #[arg(long, global = true, value_name = "FILE")]
    pub weights: Option<PathBuf>,

    /// Abusive-term lexicon file.
    #[arg(long, global = true, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,

    /// Era partition as comma-separated year ranges, e.g.
    /// `1990-2005,2006-2016,2017-2024`.
    #[arg(long, global = true, value_name = "RANGES")]
    pub eras: Option<String>,

    /// Token budget per chunk when splitting long sections.
    #[arg(long, global = true, value_name = "N")]
    pub token_budget: Option<usize>,

    /// Language-detection margin in nats per trigram window.
    #[arg(long = "threshold-lang", global = true, value_name = "X")]
    pub threshold_lang: Option<f64>,

    /// Probability cutoff for setting an emotion label.
    #[arg(long = "threshold-decision", global = true, value_name = "X")]
    pub threshold_decision: Option<f64>,

    /// Polarity score at or below which a chunk or song counts as negative.
    #[arg(long = "threshold-polarity", global = true, value_name = "X")]
    pub threshold_polarity: Option<f64>,

    /// Occurrences of lexicon terms needed to flag a song as explicit.
    #[arg(long = "min-occurrences", global = true, value_name = "N")]
    pub min_occurrences: Option<usize>,

    /// Dotted-path config override, repeatable: `--set train.epochs=5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub sets: Vec<String>,

    /// Also print failures to stderr as one machine-readable JSON object.
    #[arg(long = "error-json", global = true)]
    pub error_json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read the chart CSV, dedupe songs under the configured scope.
    Ingest,
    /// Fill explicit flags, lyrics, and genres from metadata providers.
    Enrich,
    /// Keep songs from 1990 on whose every chunk reads as English.
    Filter,
    /// Split lyrics into sections and budget-bounded chunks.
    Parse,
    /// Rank the most frequent n-grams per era.
    Ngrams {
        /// N-gram size (overrides the configured value).
        #[arg(long)]
        n: Option<usize>,
        /// Rows per era table (overrides the configured value).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Count lexicon terms per chunk and per song; flag explicit songs.
    Abuse,
    /// Train the multi-label emotion classifier on the labeled CSV.
    Train,
    /// Score the trained model (or imported predictions) against gold labels.
    Eval {
        /// Use predictions from this file instead of running the model.
        #[arg(long, value_name = "FILE")]
        import: Option<PathBuf>,
    },
    /// Predict emotion labels for every chunk of the parsed corpus.
    Sentiment {
        /// Use predictions from this file instead of running the model.
        #[arg(long, value_name = "FILE")]
        import: Option<PathBuf>,
    },
    /// Score chunk and song polarity from the predicted labels.
    Polarity,
    /// Emit the longitudinal trend tables and provider comparison.
    Trends,
    /// Print one song's per-chunk analysis as an aligned table.
    CaseStudy {
        /// Song id to report on.
        #[arg(long, value_name = "SONG_ID")]
        song: String,
        /// Read this document dump instead of the parsed store.
        #[arg(long, value_name = "FILE")]
        document: Option<PathBuf>,
        /// Use predictions from this file instead of the predictions store.
        #[arg(long, value_name = "FILE")]
        import: Option<PathBuf>,
    },
    /// Build a language profile from a plain-text corpus.
    BuildLangProfile {
        /// Language tag to store in the profile, e.g. `en`.
        #[arg(long)]
        tag: String,
        /// Plain-text training corpus.
        #[arg(long, value_name = "FILE")]
        corpus: PathBuf,
        /// Where to write the profile JSON.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

/// Layers defaults, config file, named flags, `--set` pairs, and the
/// environment into one validated [`PipelineConfig`].
fn resolve_config(overrides: &GlobalOverrides) -> Result<PipelineConfig, CliError> {
    let mut config = match &overrides.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(weights) = &overrides.weights {
        config.paths.weights = Some(weights.clone());
    }
    if let Some(lexicon) = &overrides.lexicon {
        config.paths.lexicon = Some(lexicon.clone());
    }
    if let Some(eras) = &overrides.eras {
        config.eras = config::parse_eras(eras)?;
    }
    if let Some(budget) = overrides.token_budget {
        config.token_budget = budget;
    }
    if let Some(x) = overrides.threshold_lang {
        config.thresholds.lang_margin = x;
    }
    if let Some(x) = overrides.threshold_decision {
        config.thresholds.decision = x;
    }
    if let Some(x) = overrides.threshold_polarity {
        config.thresholds.polarity_binary = x;
    }
    if let Some(n) = overrides.min_occurrences {
        config.thresholds.lexicon_min_occurrences = n;
    }
    for pair in &overrides.sets {
        config.set(pair)?;
    }
    if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
        if !dir.trim().is_empty() {
            config.paths.output_dir = PathBuf::from(dir);
        }
    }
    config.validate()?;
    Ok(config)
}

/// Runs one parsed command against one resolved configuration.
///
/// Split out from [`run`] so tests can drive the CLI in-process.
pub fn execute(command: &Command, config: &PipelineConfig) -> Result<String, CliError> {
    let manifest = match command {
        Command::Ingest => stages::cmd_ingest(config)?,
        Command::Enrich => stages::cmd_enrich(config)?,
        Command::Filter => stages::cmd_filter(config)?,
        Command::Parse => stages::cmd_parse(config)?,
        Command::Ngrams { n, k } => stages::cmd_ngrams(config, *n, *k)?,
        Command::Abuse => stages::cmd_abuse(config)?,
        Command::Train => stages::cmd_train(config)?,
        Command::Eval { import } => stages::cmd_eval(config, import.as_deref())?,
        Command::Sentiment { import } => stages::cmd_sentiment(config, import.as_deref())?,
        Command::Polarity => stages::cmd_polarity(config)?,
        Command::Trends => stages::cmd_trends(config)?,
        Command::CaseStudy {
            song,
            document,
            import,
        } => {
            let (manifest, table) =
                stages::cmd_case_study(config, song, document.as_deref(), import.as_deref())?;
            println!("{table}");
            manifest
        }
        Command::BuildLangProfile { tag, corpus, out } => {
            stages::cmd_build_lang_profile(config, tag, corpus, out)?
        }
    };
    let mut line = format!("{}: {}", manifest.command, manifest.summary);
    for warning in &manifest.warnings {
        line.push_str(&format!("\n  warning: {warning}"));
    }
    Ok(line)
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own message (including --help/--version,
            // which are "errors" with exit code 0).
            let code = if err.use_stderr() { 2 } else { 0 };
            err.print().ok();
            return code;
        }
    };
    let error_json = cli.overrides.error_json;
    let outcome = resolve_config(&cli.overrides)
        .and_then(|config| execute(&cli.command, &config));
    match outcome {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(err) => {
            eprintln!("error: {err}");
            if error_json {
                let body = serde_json::json!({
                    "error": err.kind(),
                    "message": err.to_string(),
                });
                eprintln!("{body}");
            }
            1
        }
    }
}
