//! Pipeline configuration: one JSON document, every value overridable.
//!
//! Precedence, weakest to strongest: built-in defaults, the `--config`
//! file, named convenience flags (`--seed`, `--lexicon`, ...), generic
//! `--set dotted.name=value` overrides, and finally the
//! `CHARTLEX_OUTPUT_DIR` environment variable for the output directory.
//! The fully resolved config is echoed into every run manifest, so a run
//! can always be reproduced from its manifest alone.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::corpus::CorpusScope;
use crate::langid::DEFAULT_MARGIN_THRESHOLD;
use crate::lyricdoc::{DEFAULT_TOKEN_BUDGET, MIN_TOKEN_BUDGET};
use crate::ngram::{default_partition, Era, EraPartition};
use crate::polarity::DEFAULT_THRESHOLD as DEFAULT_POLARITY_THRESHOLD;
use crate::sentiment::DEFAULT_DECISION_THRESHOLD;

use super::CliError;

/// Environment variable that overrides `paths.output_dir`.
pub const OUTPUT_DIR_ENV: &str = "CHARTLEX_OUTPUT_DIR";

/// Every file the pipeline reads or writes, in one place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// Weekly chart rows (`date,rank,song,artist`).
    pub chart_csv: PathBuf,
    /// Directory holding the staged corpus files between subcommands.
    pub corpus_dir: PathBuf,
    /// Provider fixture files, most trusted first.
    pub providers: Vec<PathBuf>,
    /// Abusive-term lexicon; `null` means the built-in one.
    pub lexicon: Option<PathBuf>,
    /// Polarity weight table; `null` means the built-in defaults.
    pub weights: Option<PathBuf>,
    /// Language profile files; empty means the built-in profiles.
    pub profiles: Vec<PathBuf>,
    /// Labeled emotion examples for training and evaluation.
    pub senwave_csv: PathBuf,
    /// Predictions to import instead of running the classifier.
    pub predictions: Option<PathBuf>,
    /// Trained classifier; `null` means `<output_dir>/model.json`.
    pub model: Option<PathBuf>,
    /// Where reports, tables, and manifests land.
    pub output_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            chart_csv: PathBuf::from("data/fixtures/chart.csv"),
            corpus_dir: PathBuf::from("out/store"),
            providers: vec![
                PathBuf::from("data/fixtures/providers/spotify.json"),
                PathBuf::from("data/fixtures/providers/deezer.json"),
                PathBuf::from("data/fixtures/providers/lastfm.json"),
            ],
            lexicon: None,
            weights: None,
            profiles: Vec::new(),
            senwave_csv: PathBuf::from("data/fixtures/senwave.csv"),
            predictions: None,
            model: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// The cut-off knobs, each with its documented range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    /// Minimum per-window log-likelihood margin (nats) for an English
    /// verdict; must be >= 0.
    pub lang_margin: f64,
    /// Probability at or above which an emotion label is set; in (0, 1).
    pub decision: f64,
    /// Polarity at or below which a chunk counts as negative; finite.
    pub polarity_binary: f64,
    /// Occurrences needed before the lexicon calls a song explicit; >= 1.
    pub lexicon_min_occurrences: usize,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            lang_margin: DEFAULT_MARGIN_THRESHOLD,
            decision: DEFAULT_DECISION_THRESHOLD,
            polarity_binary: DEFAULT_POLARITY_THRESHOLD,
            lexicon_min_occurrences: 1,
        }
    }
}

/// Classifier training knobs (vocabulary plus optimizer settings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Minimum document frequency for a vocabulary token.
    pub min_df: usize,
    /// Vocabulary size cap.
    pub max_features: usize,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            learning_rate: 0.5,
            l2: 1e-4,
            epochs: 30,
            batch_size: 16,
            min_df: 1,
            max_features: 2000,
        }
    }
}

/// The whole pipeline's configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: PathsConfig,
    /// How chart appearances collapse into songs.
    pub scope: CorpusScope,
    /// Era partition for n-gram tables.
    pub eras: Vec<Era>,
    /// Token budget per classifier chunk.
    pub token_budget: usize,
    /// Gram length for n-gram tables.
    pub ngram_size: usize,
    /// Rows kept per n-gram table.
    pub top_k: usize,
    pub thresholds: ThresholdConfig,
    pub train: TrainSettings,
    /// Seed for every randomized step (splits, shuffles).
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            paths: PathsConfig::default(),
            scope: CorpusScope::TimeAgnostic,
            eras: default_partition().eras().to_vec(),
            token_budget: DEFAULT_TOKEN_BUDGET,
            ngram_size: 3,
            top_k: 10,
            thresholds: ThresholdConfig::default(),
            train: TrainSettings::default(),
            seed: 42,
        }
    }
}

impl PipelineConfig {
    /// Loads a config file and layers it over the defaults.
    pub fn load(path: &std::path::Path) -> Result<PipelineConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// Applies one `dotted.name=value` override.
    ///
    /// The value is parsed as JSON when it looks like JSON (numbers,
    /// booleans, arrays, quoted strings) and taken verbatim otherwise, so
    /// `--set seed=7`, `--set paths.lexicon=my.txt`, and
    /// `--set paths.providers=["a.json"]` all do what they read as.
    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, raw_value) = assignment.split_once('=').ok_or_else(|| {
            CliError::Config(format!("override {assignment:?} is not KEY=VALUE"))
        })?;
        let value: serde_json::Value = serde_json::from_str(raw_value)
            .unwrap_or_else(|_| serde_json::Value::String(raw_value.to_string()));

        let mut tree = serde_json::to_value(&*self).expect("config serializes");
        let mut node = &mut tree;
        let segments: Vec<&str> = key.split('.').collect();
        for (i, segment) in segments.iter().enumerate() {
            let object = node.as_object_mut().ok_or_else(|| {
                CliError::Config(format!("override key {key:?}: {segment:?} is not an object"))
            })?;
            if !object.contains_key(*segment) {
                return Err(CliError::Config(format!(
                    "override key {key:?}: unknown field {segment:?}"
                )));
            }
            if i == segments.len() - 1 {
                object.insert(segment.to_string(), value);
                break;
            }
            node = object.get_mut(*segment).expect("checked above");
        }
        *self = serde_json::from_value(tree)
            .map_err(|e| CliError::Config(format!("override {assignment:?}: {e}")))?;
        Ok(())
    }

    /// Checks the documented ranges. Called once per command, before any
    /// work.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.token_budget < MIN_TOKEN_BUDGET {
            return Err(CliError::Config(format!(
                "token_budget {} is below the minimum {MIN_TOKEN_BUDGET}",
                self.token_budget
            )));
        }
        if self.ngram_size == 0 {
            return Err(CliError::Config("ngram_size must be at least 1".into()));
        }
        if !(self.thresholds.decision > 0.0 && self.thresholds.decision < 1.0) {
            return Err(CliError::Config(format!(
                "thresholds.decision {} is outside (0, 1)",
                self.thresholds.decision
            )));
        }
        if !(self.thresholds.lang_margin >= 0.0) {
            return Err(CliError::Config(format!(
                "thresholds.lang_margin {} is negative",
                self.thresholds.lang_margin
            )));
        }
        if !self.thresholds.polarity_binary.is_finite() {
            return Err(CliError::Config(format!(
                "thresholds.polarity_binary {} is not finite",
                self.thresholds.polarity_binary
            )));
        }
        if self.thresholds.lexicon_min_occurrences == 0 {
            return Err(CliError::Config(
                "thresholds.lexicon_min_occurrences must be at least 1".into(),
            ));
        }
        self.era_partition()?;
        Ok(())
    }

    /// The validated era partition.
    pub fn era_partition(&self) -> Result<EraPartition, CliError> {
        EraPartition::new(self.eras.clone())
            .map_err(|e| CliError::Config(format!("eras: {e}")))
    }
}

/// Parses an `--eras` flag: comma-separated `START-END` year ranges,
/// each labeled by its own text.
pub fn parse_eras(flag: &str) -> Result<Vec<Era>, CliError> {
    let mut eras = Vec::new();
    for range in flag.split(',') {
        let range = range.trim();
        let (start, end) = range.split_once('-').ok_or_else(|| {
            CliError::Config(format!("era {range:?} is not START-END"))
        })?;
        let parse = |text: &str| -> Result<i32, CliError> {
            text.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("era {range:?}: {text:?} is not a year")))
        };
        eras.push(Era::new(range, parse(start)?, parse(end)?));
    }
    Ok(eras)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn dotted_overrides_reach_nested_fields() {
        let mut config = PipelineConfig::default();
        config.set("seed=7").unwrap();
        assert_eq!(config.seed, 7);
        config.set("thresholds.decision=0.25").unwrap();
        assert_eq!(config.thresholds.decision, 0.25);
        config.set("paths.lexicon=custom_lexicon.txt").unwrap();
        assert_eq!(
            config.paths.lexicon,
            Some(PathBuf::from("custom_lexicon.txt"))
        );
        config.set(r#"paths.providers=["one.json","two.json"]"#).unwrap();
        assert_eq!(config.paths.providers.len(), 2);
        config.set("scope=year").unwrap();
        assert_eq!(config.scope, CorpusScope::Year);
    }

    #[test]
    fn unknown_override_keys_are_rejected() {
        let mut config = PipelineConfig::default();
        assert!(config.set("no_such_field=1").is_err());
        assert!(config.set("thresholds.bogus=1").is_err());
        assert!(config.set("seed").is_err());
    }

    #[test]
    fn out_of_range_values_fail_validation() {
        let mut config = PipelineConfig::default();
        config.set("thresholds.decision=1.5").unwrap();
        assert!(config.validate().is_err());

        let mut config = PipelineConfig::default();
        config.set("token_budget=2").unwrap();
        assert!(config.validate().is_err());

        let mut config = PipelineConfig::default();
        config.set("thresholds.lexicon_min_occurrences=0").unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn eras_flag_parses_the_documented_shape() {
        let eras = parse_eras("1990-2005,2006-2016,2017-2024").unwrap();
        assert_eq!(eras.len(), 3);
        assert_eq!(eras[0].label, "1990-2005");
        assert_eq!(eras[0].start_year, 1990);
        assert_eq!(eras[2].end_year, 2024);
        assert!(parse_eras("1990").is_err());
        assert!(parse_eras("199x-2005").is_err());
    }

    #[test]
    fn config_files_layer_over_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        std::fs::write(&path, r#"{"seed": 9, "thresholds": {"decision": 0.4}}"#).unwrap();
        let config = PipelineConfig::load(&path).unwrap();
        assert_eq!(config.seed, 9);
        assert_eq!(config.thresholds.decision, 0.4);
        // Everything unmentioned keeps its default.
        assert_eq!(config.top_k, 10);
        assert_eq!(config.thresholds.lexicon_min_occurrences, 1);
    }
}
