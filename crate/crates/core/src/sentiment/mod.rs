//! Multi-label emotion classification over the ten fixed categories.
//!
//! The module covers the full classification loop at desk scale: loading
//! the labeled training CSV, fitting a TF-IDF vocabulary, training ten
//! one-vs-rest logistic heads with seeded, bit-reproducible gradient
//! descent, predicting label sets for lyric chunks, importing predictions
//! produced by external models, and scoring either source against gold
//! labels with the standard multi-label metric suite.

mod dataset;
mod labels;
mod metrics;
mod model;
mod predictions;

pub use dataset::{
    load_senwave, parse_senwave, split_train_val_test, LoadedDataset, SenWaveExample,
    SENWAVE_HEADER,
};
pub use labels::{EmotionLabel, LabelVector, LABEL_COUNT};
pub use metrics::{
    binary_accuracy, f1_score, hamming_loss, jaccard_score, lrap, subset_accuracy, F1Mode,
};
pub use model::{
    fit_vocabulary, gradient_check, train, ClassifierModel, TrainConfig, TrainReport, Vocabulary,
    DEFAULT_DECISION_THRESHOLD, MODEL_SCHEMA_VERSION,
};
pub use predictions::{export_predictions, import_predictions, PredictionRecord};

use thiserror::Error;

/// Errors across dataset loading, training, prediction import, metric
/// computation, and model persistence.
#[derive(Debug, Error)]
pub enum SentimentError {
    /// The dataset CSV lacks a required column.
    #[error("dataset is missing required column `{0}`")]
    MissingColumn(String),
    /// A label cell held something other than 0 or 1. `row` is the
    /// 1-based data-row index (the header is row 0).
    #[error("data row {row}: column `{column}` holds `{value}`; labels must be 0 or 1")]
    BadLabelValue {
        row: usize,
        column: String,
        value: String,
    },
    /// No token survived the document-frequency threshold.
    #[error("no token passed the document-frequency threshold")]
    EmptyVocabulary,
    /// Training needs at least two examples.
    #[error("training needs at least two examples, got {0}")]
    NotEnoughExamples(usize),
    /// Training needs at least one set and one unset label bit overall,
    /// or every head's optimum is at infinity.
    #[error("training labels are degenerate: every bit is {0}")]
    DegenerateLabels(bool),
    /// The training loss left the finite range, typically from an
    /// oversized learning rate.
    #[error("training loss became non-finite at epoch {epoch}")]
    Diverged { epoch: usize },
    /// A prediction line failed validation. `line` is 1-based.
    #[error("prediction line {line}: {reason}")]
    BadVector { line: usize, reason: String },
    /// The same unit id appeared on two prediction lines.
    #[error("duplicate unit id `{0}` in prediction file")]
    DuplicateUnitId(String),
    /// Metric inputs must be aligned sample-for-sample.
    #[error("prediction and gold lists differ in length: {preds} vs {golds}")]
    LengthMismatch { preds: usize, golds: usize },
    /// Metrics over samples are undefined on zero samples.
    #[error("metric needs at least one sample")]
    EmptyInput,
    /// The model file was written by an incompatible schema.
    #[error("model file schema version {found} unsupported (expected {expected})")]
    SchemaVersionMismatch { found: u32, expected: u32 },
    /// A loaded model failed an internal consistency check.
    #[error("model file is internally inconsistent: {0}")]
    CorruptModel(String),
    #[error("failed to read or write file")]
    Io(#[from] std::io::Error),
    #[error("failed to parse JSON")]
    Json(#[from] serde_json::Error),
    #[error("failed to parse CSV")]
    Csv(#[from] csv::Error),
}
