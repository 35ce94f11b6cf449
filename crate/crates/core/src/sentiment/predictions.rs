//! Import and export of per-unit predictions as newline-delimited JSON.
//!
//! This is the bridge for models trained outside the repository: each line
//! carries a unit id plus either a ten-entry probability vector, a
//! ten-entry 0/1 label vector, or both. Records with probabilities but no
//! labels get labels derived at the configured decision threshold.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{LabelVector, SentimentError, LABEL_COUNT};

/// One unit's prediction: probabilities when the producing model exposed
/// them, and always a label set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub unit_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    pub labels: LabelVector,
}

#[derive(Deserialize)]
struct RawLine {
    unit_id: String,
    #[serde(default)]
    probs: Option<Vec<f64>>,
    #[serde(default)]
    labels: Option<Vec<u8>>,
}

/// Reads newline-delimited JSON predictions. Blank lines are skipped;
/// line numbers in errors are 1-based over the raw file.
///
/// # Errors
///
/// [`SentimentError::BadVector`] for malformed JSON, wrong vector widths,
/// probabilities outside [0, 1], label values other than 0/1, or a line
/// with neither vector; [`SentimentError::DuplicateUnitId`] when two lines
/// name the same unit.
pub fn import_predictions<R: BufRead>(
    reader: R,
    decision_threshold: f64,
) -> Result<Vec<PredictionRecord>, SentimentError> {
    let mut records = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for (line_index, line) in reader.lines().enumerate() {
        let line_no = line_index + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| SentimentError::BadVector {
            line: line_no,
            reason,
        };
        let raw: RawLine =
            serde_json::from_str(&line).map_err(|e| bad(format!("invalid JSON: {e}")))?;
        if raw.probs.is_none() && raw.labels.is_none() {
            return Err(bad("line has neither probs nor labels".to_string()));
        }
        if let Some(probs) = &raw.probs {
            if probs.len() != LABEL_COUNT {
                return Err(bad(format!(
                    "probs has {} entries (expected {LABEL_COUNT})",
                    probs.len()
                )));
            }
            if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(bad(format!("probability {p} outside [0, 1]")));
            }
        }
        let labels = match &raw.labels {
            Some(ints) => LabelVector::from_ints(ints).map_err(bad)?,
            // A probs-only line gets labels from the threshold; the width
            // and range were just validated.
            None => {
                let probs = raw.probs.as_ref().expect("checked above");
                let mut bits = [false; LABEL_COUNT];
                for (bit, &p) in bits.iter_mut().zip(probs) {
                    *bit = p >= decision_threshold;
                }
                LabelVector::from_bits(bits)
            }
        };
        if !seen_ids.insert(raw.unit_id.clone()) {
            return Err(SentimentError::DuplicateUnitId(raw.unit_id));
        }
        records.push(PredictionRecord {
            unit_id: raw.unit_id,
            probs: raw.probs,
            labels,
        });
    }
    Ok(records)
}

/// Writes records as newline-delimited JSON, one record per line, omitting
/// absent probability vectors.
pub fn export_predictions<W: Write>(
    records: &[PredictionRecord],
    mut writer: W,
) -> Result<(), SentimentError> {
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
