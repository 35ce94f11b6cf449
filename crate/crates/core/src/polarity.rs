//! Polarity scoring: collapsing emotion label sets into one signed number.
//!
//! A chunk's polarity is the sum of per-label weights over its set labels;
//! an empty label set scores 0. Song polarity is the unweighted mean over
//! chunk scores, and a threshold turns either into a binary
//! inappropriate-content flag (boundary inclusive: a score equal to the
//! threshold is flagged). Weights live in a JSON data file; the shipped
//! defaults give four labels that never occur in the reference tables
//! (Thankful, Pessimistic, Denial, Official) documented stand-in values.
//!
//! A small token-valence lexicon provides an independent reference score
//! per chunk so reports can show both scorers side by side.

use crate::sentiment::{EmotionLabel, LabelVector, LABEL_COUNT};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Errors from weight and valence-lexicon loading.
#[derive(Debug, Error)]
pub enum PolarityError {
    /// The weights file is missing a label.
    #[error("weights file has no entry for label {0:?}")]
    MissingWeight(String),
    /// The weights file names something that is not a label.
    #[error("weights file key {0:?} is not an emotion label")]
    UnknownLabel(String),
    /// A weight is non-finite or outside [-1, 1].
    #[error("weight {value} for label {label:?} is outside [-1, 1]")]
    BadWeight { label: String, value: f64 },
    /// A valence row is malformed or outside [-1, 1].
    #[error("valence line {line_no}: {reason}")]
    BadValence { line_no: usize, reason: String },
    /// A data file could not be read.
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// A data file could not be parsed.
    #[error("failed to parse {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Default binarization threshold for the inappropriate-content flag.
pub const DEFAULT_THRESHOLD: f64 = -0.15;

/// Per-label polarity weights, indexed in fixed label order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarityWeights {
    weights: [f64; LABEL_COUNT],
}

impl PolarityWeights {
    /// The weights shipped with the crate.
    pub fn default_weights() -> PolarityWeights {
        PolarityWeights::from_json("builtin weights", include_str!("../../../data/weights.json"))
            .expect("builtin weights are valid")
    }

    /// Loads weights from a JSON object of label key -> value.
    pub fn load(path: &Path) -> Result<PolarityWeights, PolarityError> {
        let text = std::fs::read_to_string(path).map_err(|source| PolarityError::Io {
            path: path.display().to_string(),
            source,
        })?;
        PolarityWeights::from_json(&path.display().to_string(), &text)
    }

    fn from_json(origin: &str, text: &str) -> Result<PolarityWeights, PolarityError> {
        let raw: BTreeMap<String, f64> =
            serde_json::from_str(text).map_err(|source| PolarityError::Json {
                path: origin.to_string(),
                source,
            })?;
        let mut weights = [f64::NAN; LABEL_COUNT];
        for (key, value) in &raw {
            let label: EmotionLabel = key
                .parse()
                .map_err(|_| PolarityError::UnknownLabel(key.clone()))?;
            if !value.is_finite() || !(-1.0..=1.0).contains(value) {
                return Err(PolarityError::BadWeight {
                    label: key.clone(),
                    value: *value,
                });
            }
            weights[label.index()] = *value;
        }
        for label in EmotionLabel::ALL {
            if weights[label.index()].is_nan() {
                return Err(PolarityError::MissingWeight(label.key().to_string()));
            }
        }
        Ok(PolarityWeights { weights })
    }

    /// The weight of one label.
    pub fn weight(&self, label: EmotionLabel) -> f64 {
        self.weights[label.index()]
    }
}

/// Sums the weights of the set labels; the empty set scores 0.
///
/// # Examples
///
/// ```
/// use chartlex::polarity::{chunk_polarity, PolarityWeights};
/// use chartlex::sentiment::{EmotionLabel, LabelVector};
///
/// let w = PolarityWeights::default_weights();
/// let optimistic = LabelVector::from_labels(&[EmotionLabel::Optimistic]);
/// assert_eq!(chunk_polarity(&optimistic, &w), 0.3);
///
/// let anxious_sad = LabelVector::from_labels(&[EmotionLabel::Anxious, EmotionLabel::Sad]);
/// assert_eq!(chunk_polarity(&anxious_sad, &w), -0.4);
///
/// assert_eq!(chunk_polarity(&LabelVector::empty(), &w), 0.0);
/// ```
pub fn chunk_polarity(labels: &LabelVector, weights: &PolarityWeights) -> f64 {
    // Seeded fold rather than `Iterator::sum`: the standard sum uses -0.0 as
    // its identity, and a negative zero here would render as "-0" in reports.
    labels
        .iter_set()
        .map(|l| weights.weight(l))
        .fold(0.0, |acc, w| acc + w)
}

/// True when the score is at or below the threshold (flagged inappropriate).
pub fn to_binary(score: f64, threshold: f64) -> bool {
    score <= threshold
}

/// Mean chunk polarity for one song.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SongPolarity {
    /// Arithmetic mean of the chunk scores; 0 when there are none.
    pub score: f64,
    /// Number of chunks that went into the mean.
    pub chunk_count: usize,
}

impl SongPolarity {
    /// True when the song had no chunks and the 0 score is a placeholder.
    pub fn no_chunks(&self) -> bool {
        self.chunk_count == 0
    }
}

/// Averages chunk scores into a song score; an empty list flags `no_chunks`.
pub fn song_polarity(chunk_scores: &[f64]) -> SongPolarity {
    if chunk_scores.is_empty() {
        return SongPolarity {
            score: 0.0,
            chunk_count: 0,
        };
    }
    SongPolarity {
        score: chunk_scores.iter().sum::<f64>() / chunk_scores.len() as f64,
        chunk_count: chunk_scores.len(),
    }
}

/// Token-to-valence lookup used for the side-by-side reference score.
#[derive(Debug, Clone)]
pub struct ValenceLexicon {
    valence: BTreeMap<String, f64>,
}

impl ValenceLexicon {
    /// The valence table shipped with the crate.
    pub fn builtin() -> ValenceLexicon {
        ValenceLexicon::from_csv_text(include_str!("../../../data/valence.csv"))
            .expect("builtin valence table is valid")
    }

    /// Loads a `token,valence` CSV with a header row.
    pub fn load(path: &Path) -> Result<ValenceLexicon, PolarityError> {
        let text = std::fs::read_to_string(path).map_err(|source| PolarityError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ValenceLexicon::from_csv_text(&text)
    }

    fn from_csv_text(text: &str) -> Result<ValenceLexicon, PolarityError> {
        let mut valence = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if idx == 0 || line.trim().is_empty() {
                continue;
            }
            let (token, value) =
                line.split_once(',')
                    .ok_or_else(|| PolarityError::BadValence {
                        line_no,
                        reason: "expected token,valence".into(),
                    })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| PolarityError::BadValence {
                    line_no,
                    reason: format!("{:?} is not a number", value.trim()),
                })?;
            if !value.is_finite() || !(-1.0..=1.0).contains(&value) {
                return Err(PolarityError::BadValence {
                    line_no,
                    reason: format!("valence {value} outside [-1, 1]"),
                });
            }
            valence.insert(token.trim().to_lowercase(), value);
        }
        Ok(ValenceLexicon { valence })
    }

    /// Number of tokens in the table.
    pub fn len(&self) -> usize {
        self.valence.len()
    }

    /// True when the table has no entries.
    pub fn is_empty(&self) -> bool {
        self.valence.is_empty()
    }
}

/// Mean valence over in-lexicon tokens; 0 when none match.
///
/// The result is clamped to [-1, 1] (already guaranteed by construction,
/// kept as a hard bound for arithmetic safety).
pub fn reference_valence(text: &str, lexicon: &ValenceLexicon) -> f64 {
    let mut sum = 0.0;
    let mut hits = 0usize;
    for token in text.split_whitespace() {
        if let Some(v) = lexicon.valence.get(token) {
            sum += v;
            hits += 1;
        }
    }
    if hits == 0 {
        return 0.0;
    }
    (sum / hits as f64).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_weight_values() {
        let w = PolarityWeights::default_weights();
        assert_eq!(w.weight(EmotionLabel::Optimistic), 0.3);
        assert_eq!(w.weight(EmotionLabel::Thankful), 0.2);
        assert_eq!(w.weight(EmotionLabel::Empathetic), 0.0);
        assert_eq!(w.weight(EmotionLabel::Pessimistic), -0.3);
        assert_eq!(w.weight(EmotionLabel::Anxious), -0.2);
        assert_eq!(w.weight(EmotionLabel::Sad), -0.2);
        assert_eq!(w.weight(EmotionLabel::Annoyed), -0.1);
        assert_eq!(w.weight(EmotionLabel::Denial), -0.1);
        assert_eq!(w.weight(EmotionLabel::Official), 0.0);
        assert_eq!(w.weight(EmotionLabel::Joking), 0.0);
    }

    #[test]
    fn weight_loading_validates() {
        assert!(matches!(
            PolarityWeights::from_json("t", r#"{"optimistic": 0.3}"#),
            Err(PolarityError::MissingWeight(_))
        ));
        assert!(matches!(
            PolarityWeights::from_json("t", r#"{"serene": 0.3}"#),
            Err(PolarityError::UnknownLabel(_))
        ));
        let mut all = String::from("{");
        for (i, label) in EmotionLabel::ALL.iter().enumerate() {
            if i > 0 {
                all.push(',');
            }
            let v = if i == 0 { 2.0 } else { 0.0 };
            all.push_str(&format!(r#""{}": {v}"#, label.key()));
        }
        all.push('}');
        assert!(matches!(
            PolarityWeights::from_json("t", &all),
            Err(PolarityError::BadWeight { .. })
        ));
    }

    #[test]
    fn polarity_is_additive_over_disjoint_sets() {
        let w = PolarityWeights::default_weights();
        let a = LabelVector::from_labels(&[EmotionLabel::Anxious, EmotionLabel::Optimistic]);
        let b = LabelVector::from_labels(&[EmotionLabel::Sad, EmotionLabel::Joking]);
        let mut both = a;
        for label in b.iter_set() {
            both.set(label, true);
        }
        let sum = chunk_polarity(&a, &w) + chunk_polarity(&b, &w);
        assert!((chunk_polarity(&both, &w) - sum).abs() < 1e-12);
    }

    #[test]
    fn empty_label_set_scores_positive_zero() {
        let w = PolarityWeights::default_weights();
        let score = chunk_polarity(&LabelVector::empty(), &w);
        // Bit-level check: -0.0 == 0.0 numerically but renders as "-0".
        assert_eq!(score.to_bits(), 0f64.to_bits());
        assert_eq!(format!("{score}"), "0");
    }

    #[test]
    fn binary_threshold_is_inclusive() {
        assert!(to_binary(-0.4, DEFAULT_THRESHOLD));
        assert!(!to_binary(0.0, DEFAULT_THRESHOLD));
        assert!(to_binary(DEFAULT_THRESHOLD, DEFAULT_THRESHOLD));
    }

    #[test]
    fn binary_is_monotone() {
        let scores = [-1.0, -0.5, -0.15, -0.1, 0.0, 0.5, 1.0];
        let mut last = true;
        for s in scores {
            let flag = to_binary(s, DEFAULT_THRESHOLD);
            assert!(last || !flag, "flag turned back on as score rose");
            last = flag;
        }
    }

    #[test]
    fn song_mean_and_empty_flag() {
        let p = song_polarity(&[0.3, -0.4]);
        assert!((p.score - (-0.05)).abs() < 1e-12);
        assert!(!p.no_chunks());

        let single = song_polarity(&[0.123]);
        assert_eq!(single.score, 0.123);

        let empty = song_polarity(&[]);
        assert_eq!(empty.score, 0.0);
        assert!(empty.no_chunks());
    }

    #[test]
    fn song_mean_bounded_and_permutation_invariant() {
        let scores = [0.3, -0.4, 0.0, -0.1, 0.2];
        let p = song_polarity(&scores);
        let mut reversed = scores;
        reversed.reverse();
        // Equal up to float summation-order rounding.
        assert!((song_polarity(&reversed).score - p.score).abs() < 1e-12);
        let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(p.score >= min && p.score <= max);
    }

    #[test]
    fn valence_scoring() {
        let lex = ValenceLexicon::builtin();
        assert_eq!(reference_valence("qwerty zxcvb", &lex), 0.0);
        assert_eq!(reference_valence("love", &lex), 0.8);
        // +0.8 and -0.8 average to zero.
        assert!(reference_valence("love hate", &lex).abs() < 1e-12);
        let bounded = reference_valence("love beautiful wonderful hate pain", &lex);
        assert!((-1.0..=1.0).contains(&bounded));
    }

    #[test]
    fn valence_rejects_bad_rows() {
        assert!(matches!(
            ValenceLexicon::from_csv_text("token,valence\nlove\n"),
            Err(PolarityError::BadValence { line_no: 2, .. })
        ));
        assert!(matches!(
            ValenceLexicon::from_csv_text("token,valence\nlove,1.5\n"),
            Err(PolarityError::BadValence { .. })
        ));
    }
}
