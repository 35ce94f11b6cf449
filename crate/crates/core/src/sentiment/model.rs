//! TF-IDF featurization and the trainable ten-head logistic classifier.
//!
//! The classifier is deliberately desk-scale: a shared bag-of-words TF-IDF
//! representation feeding ten independent one-vs-rest logistic heads,
//! trained by seeded mini-batch gradient descent on mean binary
//! cross-entropy plus an L2 penalty on the weights (never the biases).
//! Given the same examples and config, training is bit-reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LabelVector, PredictionRecord, SenWaveExample, SentimentError, LABEL_COUNT};

/// Version stamped into every model file; files from other versions are
/// refused rather than reinterpreted.
pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Default probability cutoff for turning head outputs into labels.
pub const DEFAULT_DECISION_THRESHOLD: f64 = 0.5;

/// A fitted vocabulary: token → dense column index, plus the matching
/// inverse-document-frequency weight per column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub index: BTreeMap<String, usize>,
    pub idf: Vec<f64>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.idf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idf.is_empty()
    }
}

/// Fits a vocabulary on tokenized example text.
///
/// Tokens with document frequency at least `min_df` are kept,
/// most-frequent-first (ties broken alphabetically) up to `max_features`
/// columns. The weight per column is `idf = ln((1+N)/(1+df)) + 1`, so a
/// token present in every document weighs exactly 1.
///
/// # Errors
///
/// [`SentimentError::EmptyVocabulary`] when nothing survives the
/// threshold.
pub fn fit_vocabulary(
    examples: &[SenWaveExample],
    min_df: usize,
    max_features: usize,
) -> Result<Vocabulary, SentimentError> {
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for example in examples {
        let unique: BTreeSet<&str> = example.text.split_whitespace().collect();
        for token in unique {
            *df.entry(token).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = df
        .into_iter()
        .filter(|&(_, count)| count >= min_df)
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    kept.truncate(max_features);
    if kept.is_empty() {
        return Err(SentimentError::EmptyVocabulary);
    }
    let n = examples.len() as f64;
    let mut index = BTreeMap::new();
    let mut idf = Vec::with_capacity(kept.len());
    for (column, (token, count)) in kept.into_iter().enumerate() {
        index.insert(token.to_string(), column);
        idf.push(((1.0 + n) / (1.0 + count as f64)).ln() + 1.0);
    }
    Ok(Vocabulary { index, idf })
}

/// Dense TF-IDF feature vector: per-column term count times idf, then
/// L2-normalized. Out-of-vocabulary tokens are ignored; text with no
/// in-vocabulary token maps to the zero vector.
pub fn featurize(text: &str, vocabulary: &Vocabulary) -> Vec<f64> {
    let mut features = vec![0.0; vocabulary.len()];
    for token in text.split_whitespace() {
        if let Some(&column) = vocabulary.index.get(token) {
            features[column] += 1.0;
        }
    }
    for (column, value) in features.iter_mut().enumerate() {
        *value *= vocabulary.idf[column];
    }
    let norm = features.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for value in &mut features {
            *value /= norm;
        }
    }
    features
}

/// Training hyperparameters. All five participate in the reproducibility
/// contract: same config plus same examples means bit-identical weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.5,
            l2: 1e-4,
            epochs: 30,
            batch_size: 16,
            seed: 42,
        }
    }
}

/// The trained classifier. Immutable in normal use; prediction is pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub schema_version: u32,
    pub vocabulary: Vocabulary,
    /// One weight row per label, each `vocabulary.len()` wide.
    pub weights: Vec<Vec<f64>>,
    /// One intercept per label.
    pub bias: Vec<f64>,
    pub train_config: TrainConfig,
    /// Probability cutoff in (0, 1) used by [`ClassifierModel::predict`].
    pub decision_threshold: f64,
}

/// Everything [`train`] produces: the model plus the full training-set
/// loss trajectory. `epoch_losses[0]` is the loss before any update and
/// `epoch_losses[e]` the loss after epoch `e`, so the vector holds
/// `epochs + 1` entries.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: ClassifierModel,
    pub epoch_losses: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Mean binary cross-entropy over every (example, label) cell plus
/// `(l2/2)·‖W‖²`. Computed naively on purpose: a blown-up run saturates
/// the sigmoid, the log goes infinite, and divergence becomes detectable
/// instead of being silently clipped away.
fn full_loss(
    features: &[Vec<f64>],
    golds: &[[f64; LABEL_COUNT]],
    weights: &[Vec<f64>],
    bias: &[f64],
    l2: f64,
) -> f64 {
    let mut total = 0.0;
    for (x, gold) in features.iter().zip(golds) {
        for label in 0..LABEL_COUNT {
            let z: f64 = weights[label]
                .iter()
                .zip(x)
                .map(|(w, xi)| w * xi)
                .sum::<f64>()
                + bias[label];
            let p = sigmoid(z);
            let y = gold[label];
            total -= y * p.ln() + (1.0 - y) * (1.0 - p).ln();
        }
    }
    let mean = total / (features.len() * LABEL_COUNT) as f64;
    let penalty: f64 = weights
        .iter()
        .flat_map(|row| row.iter())
        .map(|w| w * w)
        .sum();
    mean + l2 / 2.0 * penalty
}

/// Gradient of [`full_loss`] restricted to the given example indices
/// (the regularization term is global either way).
fn gradient_over(
    indices: &[usize],
    features: &[Vec<f64>],
    golds: &[[f64; LABEL_COUNT]],
    weights: &[Vec<f64>],
    bias: &[f64],
    l2: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let columns = weights[0].len();
    let mut grad_w = vec![vec![0.0; columns]; LABEL_COUNT];
    let mut grad_b = vec![0.0; LABEL_COUNT];
    let scale = 1.0 / (indices.len() * LABEL_COUNT) as f64;
    for &i in indices {
        let x = &features[i];
        for label in 0..LABEL_COUNT {
            let z: f64 = weights[label]
                .iter()
                .zip(x)
                .map(|(w, xi)| w * xi)
                .sum::<f64>()
                + bias[label];
            let err = (sigmoid(z) - golds[i][label]) * scale;
            for (slot, xi) in grad_w[label].iter_mut().zip(x) {
                *slot += err * xi;
            }
            grad_b[label] += err;
        }
    }
    for (row, grad_row) in weights.iter().zip(grad_w.iter_mut()) {
        for (w, slot) in row.iter().zip(grad_row.iter_mut()) {
            *slot += l2 * w;
        }
    }
    (grad_w, grad_b)
}

fn gold_matrix(examples: &[SenWaveExample]) -> Vec<[f64; LABEL_COUNT]> {
    examples
        .iter()
        .map(|example| {
            let bits = example.gold.bits();
            let mut row = [0.0; LABEL_COUNT];
            for (slot, &bit) in row.iter_mut().zip(&bits) {
                *slot = if bit { 1.0 } else { 0.0 };
            }
            row
        })
        .collect()
}

/// Trains the ten heads by seeded mini-batch gradient descent from a zero
/// initialization.
///
/// # Errors
///
/// [`SentimentError::NotEnoughExamples`] below two examples;
/// [`SentimentError::DegenerateLabels`] when every label bit in the set
/// has the same value; [`SentimentError::Diverged`] when the training
/// loss leaves the finite range, reported with the offending epoch.
pub fn train(
    examples: &[SenWaveExample],
    vocabulary: Vocabulary,
    config: TrainConfig,
) -> Result<TrainReport, SentimentError> {
    if examples.len() < 2 {
        return Err(SentimentError::NotEnoughExamples(examples.len()));
    }
    let positives: usize = examples.iter().map(|e| e.gold.count()).sum();
    if positives == 0 {
        return Err(SentimentError::DegenerateLabels(false));
    }
    if positives == examples.len() * LABEL_COUNT {
        return Err(SentimentError::DegenerateLabels(true));
    }

    let features: Vec<Vec<f64>> = examples
        .iter()
        .map(|e| featurize(&e.text, &vocabulary))
        .collect();
    let golds = gold_matrix(examples);

    let mut weights = vec![vec![0.0; vocabulary.len()]; LABEL_COUNT];
    let mut bias = vec![0.0; LABEL_COUNT];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let batch_size = config.batch_size.max(1);

    let mut epoch_losses = Vec::with_capacity(config.epochs + 1);
    epoch_losses.push(full_loss(&features, &golds, &weights, &bias, config.l2));

    let mut order: Vec<usize> = (0..examples.len()).collect();
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(batch_size) {
            let (grad_w, grad_b) =
                gradient_over(batch, &features, &golds, &weights, &bias, config.l2);
            for (row, grad_row) in weights.iter_mut().zip(&grad_w) {
                for (w, g) in row.iter_mut().zip(grad_row) {
                    *w -= config.learning_rate * g;
                }
            }
            for (b, g) in bias.iter_mut().zip(&grad_b) {
                *b -= config.learning_rate * g;
            }
        }
        let loss = full_loss(&features, &golds, &weights, &bias, config.l2);
        if !loss.is_finite() {
            return Err(SentimentError::Diverged { epoch });
        }
        epoch_losses.push(loss);
    }

    Ok(TrainReport {
        model: ClassifierModel {
            schema_version: MODEL_SCHEMA_VERSION,
            vocabulary,
            weights,
            bias,
            train_config: config,
            decision_threshold: DEFAULT_DECISION_THRESHOLD,
        },
        epoch_losses,
    })
}

impl ClassifierModel {
    /// Per-label probabilities `sigmoid(W·x + b)` for one text. Text with
    /// no in-vocabulary token scores exactly `sigmoid(bias)`.
    pub fn probabilities(&self, text: &str) -> [f64; LABEL_COUNT] {
        let x = featurize(text, &self.vocabulary);
        let mut probs = [0.0; LABEL_COUNT];
        for label in 0..LABEL_COUNT {
            let z: f64 = self.weights[label]
                .iter()
                .zip(&x)
                .map(|(w, xi)| w * xi)
                .sum::<f64>()
                + self.bias[label];
            probs[label] = sigmoid(z);
        }
        probs
    }

    /// Thresholded prediction for one unit of text. The empty label set is
    /// legitimate output (rendered "N/A" downstream).
    pub fn predict(&self, unit_id: &str, text: &str) -> PredictionRecord {
        let probs = self.probabilities(text);
        let mut bits = [false; LABEL_COUNT];
        for (bit, &p) in bits.iter_mut().zip(&probs) {
            *bit = p >= self.decision_threshold;
        }
        PredictionRecord {
            unit_id: unit_id.to_string(),
            probs: Some(probs.to_vec()),
            labels: LabelVector::from_bits(bits),
        }
    }

    /// Internal consistency checks applied to every loaded file.
    pub fn validate(&self) -> Result<(), SentimentError> {
        let corrupt = |reason: &str| SentimentError::CorruptModel(reason.to_string());
        let columns = self.vocabulary.len();
        if self.vocabulary.index.len() != columns {
            return Err(corrupt("vocabulary index and idf disagree on size"));
        }
        let mut seen: Vec<usize> = self.vocabulary.index.values().copied().collect();
        seen.sort_unstable();
        if seen != (0..columns).collect::<Vec<_>>() {
            return Err(corrupt("vocabulary column indices are not dense"));
        }
        if self.weights.len() != LABEL_COUNT || self.bias.len() != LABEL_COUNT {
            return Err(corrupt("expected one weight row and bias per label"));
        }
        if self.weights.iter().any(|row| row.len() != columns) {
            return Err(corrupt("weight row width disagrees with vocabulary"));
        }
        let finite = self
            .weights
            .iter()
            .flat_map(|row| row.iter())
            .chain(self.bias.iter())
            .chain(self.vocabulary.idf.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(corrupt("non-finite parameter"));
        }
        if !(self.decision_threshold > 0.0 && self.decision_threshold < 1.0) {
            return Err(corrupt("decision threshold outside (0, 1)"));
        }
        Ok(())
    }

    /// Writes the model as one schema-versioned JSON document.
    pub fn save(&self, path: &Path) -> Result<(), SentimentError> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json)?;
        Ok(())
    }

    /// Reads a model file, refusing other schema versions and internally
    /// inconsistent contents.
    pub fn load(path: &Path) -> Result<ClassifierModel, SentimentError> {
        let raw = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&raw)?;
        let found = value
            .get("schema_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| SentimentError::CorruptModel("missing schema_version".into()))?
            as u32;
        if found != MODEL_SCHEMA_VERSION {
            return Err(SentimentError::SchemaVersionMismatch {
                found,
                expected: MODEL_SCHEMA_VERSION,
            });
        }
        let model: ClassifierModel = serde_json::from_value(value)?;
        model.validate()?;
        Ok(model)
    }
}

/// Compares the analytic training gradient against central finite
/// differences with step `h` at a seeded random parameter point, returning
/// the worst per-parameter relative error. Small instances only: cost is
/// two full loss evaluations per parameter.
pub fn gradient_check(
    examples: &[SenWaveExample],
    vocabulary: &Vocabulary,
    l2: f64,
    h: f64,
    seed: u64,
) -> Result<f64, SentimentError> {
    if examples.is_empty() {
        return Err(SentimentError::EmptyInput);
    }
    let features: Vec<Vec<f64>> = examples
        .iter()
        .map(|e| featurize(&e.text, vocabulary))
        .collect();
    let golds = gold_matrix(examples);
    let columns = vocabulary.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = vec![vec![0.0; columns]; LABEL_COUNT];
    for row in &mut weights {
        for w in row.iter_mut() {
            *w = rng.gen_range(-0.5..0.5);
        }
    }
    let mut bias = vec![0.0; LABEL_COUNT];
    for b in &mut bias {
        *b = rng.gen_range(-0.5..0.5);
    }

    let all: Vec<usize> = (0..examples.len()).collect();
    let (grad_w, grad_b) = gradient_over(&all, &features, &golds, &weights, &bias, l2);

    let rel = |analytic: f64, numeric: f64| -> f64 {
        (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
    };

    let mut worst = 0.0f64;
    for label in 0..LABEL_COUNT {
        for column in 0..columns {
            let saved = weights[label][column];
            weights[label][column] = saved + h;
            let plus = full_loss(&features, &golds, &weights, &bias, l2);
            weights[label][column] = saved - h;
            let minus = full_loss(&features, &golds, &weights, &bias, l2);
            weights[label][column] = saved;
            worst = worst.max(rel(grad_w[label][column], (plus - minus) / (2.0 * h)));
        }
        let saved = bias[label];
        bias[label] = saved + h;
        let plus = full_loss(&features, &golds, &weights, &bias, l2);
        bias[label] = saved - h;
        let minus = full_loss(&features, &golds, &weights, &bias, l2);
        bias[label] = saved;
        worst = worst.max(rel(grad_b[label], (plus - minus) / (2.0 * h)));
    }
    Ok(worst)
}
