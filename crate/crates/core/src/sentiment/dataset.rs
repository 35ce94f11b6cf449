//! Labeled-example loading and the seeded train/validation/test split.

use std::fs::File;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EmotionLabel, LabelVector, SentimentError, LABEL_COUNT};
use crate::normalize::{standardize_text, ContractionTable};

/// Expected CSV header: the text column followed by the ten label columns
/// in fixed label order. Columns are located by name, so extra columns and
/// reordering are tolerated.
pub const SENWAVE_HEADER: [&str; 11] = [
    "text",
    "optimistic",
    "thankful",
    "empathetic",
    "pessimistic",
    "anxious",
    "sad",
    "annoyed",
    "denial",
    "official",
    "joking",
];

/// One labeled training example. The text is already standardized and is
/// never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenWaveExample {
    pub text: String,
    pub gold: LabelVector,
}

/// Result of loading a labeled CSV: the usable examples plus a count of
/// rows skipped because their text standardized to nothing.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub examples: Vec<SenWaveExample>,
    pub skipped_empty: usize,
}

/// Loads a labeled CSV from disk. See [`parse_senwave`] for the format.
pub fn load_senwave(
    path: &Path,
    contractions: &ContractionTable,
) -> Result<LoadedDataset, SentimentError> {
    parse_senwave(File::open(path)?, contractions)
}

/// Parses a labeled CSV: a `text` column plus ten 0/1 label columns named
/// after the labels. Text is standardized on the way in; rows whose text
/// standardizes to nothing are skipped and counted rather than failing the
/// load.
///
/// # Errors
///
/// [`SentimentError::MissingColumn`] when a required column is absent and
/// [`SentimentError::BadLabelValue`] when a label cell is not 0 or 1.
pub fn parse_senwave<R: io::Read>(
    reader: R,
    contractions: &ContractionTable,
) -> Result<LoadedDataset, SentimentError> {
    let mut csv_reader = csv::ReaderBuilder::new().from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    let column_index = |name: &str| -> Result<usize, SentimentError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| SentimentError::MissingColumn(name.to_string()))
    };
    let text_col = column_index("text")?;
    let mut label_cols = [0usize; LABEL_COUNT];
    for label in EmotionLabel::ALL {
        label_cols[label.index()] = column_index(label.key())?;
    }

    let mut examples = Vec::new();
    let mut skipped_empty = 0usize;
    for (row_index, record) in csv_reader.records().enumerate() {
        let record = record?;
        let row = row_index + 1;
        let mut bits = [false; LABEL_COUNT];
        for label in EmotionLabel::ALL {
            let column = label_cols[label.index()];
            let cell = record.get(column).unwrap_or("").trim();
            bits[label.index()] = match cell {
                "0" => false,
                "1" => true,
                other => {
                    return Err(SentimentError::BadLabelValue {
                        row,
                        column: label.key().to_string(),
                        value: other.to_string(),
                    })
                }
            };
        }
        let text = standardize_text(record.get(text_col).unwrap_or(""), contractions);
        if text.is_empty() {
            skipped_empty += 1;
            continue;
        }
        examples.push(SenWaveExample {
            text,
            gold: LabelVector::from_bits(bits),
        });
    }
    Ok(LoadedDataset {
        examples,
        skipped_empty,
    })
}

/// Splits examples 80/10/10 by a seeded shuffle. Boundaries are
/// `floor(0.8·n)` and `floor(0.9·n)`, with the remainder going to test,
/// so every example lands in exactly one part and the same seed always
/// reproduces the same split.
pub fn split_train_val_test(
    examples: &[SenWaveExample],
    seed: u64,
) -> (
    Vec<SenWaveExample>,
    Vec<SenWaveExample>,
    Vec<SenWaveExample>,
) {
    let mut indices: Vec<usize> = (0..examples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let train_end = examples.len() * 8 / 10;
    let val_end = examples.len() * 9 / 10;
    let pick = |range: &[usize]| -> Vec<SenWaveExample> {
        range.iter().map(|&i| examples[i].clone()).collect()
    };
    (
        pick(&indices[..train_end]),
        pick(&indices[train_end..val_end]),
        pick(&indices[val_end..]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ContractionTable {
        ContractionTable::builtin()
    }

    fn parse(csv_text: &str) -> Result<LoadedDataset, SentimentError> {
        parse_senwave(csv_text.as_bytes(), &table())
    }

    fn header() -> String {
        SENWAVE_HEADER.join(",")
    }

    #[test]
    fn parses_a_labeled_row() {
        let data = format!("{}\ngreat news today,1,0,0,0,0,0,0,0,0,0\n", header());
        let loaded = parse(&data).unwrap();
        assert_eq!(loaded.examples.len(), 1);
        assert_eq!(loaded.skipped_empty, 0);
        let example = &loaded.examples[0];
        assert_eq!(example.text, "great news today");
        assert_eq!(
            example.gold,
            LabelVector::from_labels(&[EmotionLabel::Optimistic])
        );
    }

    #[test]
    fn text_is_standardized_on_load() {
        let data = format!("{}\n\"Don't STOP!!\",0,0,0,0,0,1,0,0,0,0\n", header());
        let loaded = parse(&data).unwrap();
        assert_eq!(loaded.examples[0].text, "do not stop");
    }

    #[test]
    fn bad_label_value_is_rejected_with_row_and_column() {
        let data = format!(
            "{}\nfine,1,0,0,0,0,0,0,0,0,0\nbroken,2,0,0,0,0,0,0,0,0,0\n",
            header()
        );
        match parse(&data) {
            Err(SentimentError::BadLabelValue { row, column, value }) => {
                assert_eq!(row, 2);
                assert_eq!(column, "optimistic");
                assert_eq!(value, "2");
            }
            other => panic!("expected BadLabelValue, got {other:?}"),
        }
    }

    #[test]
    fn empty_text_rows_are_skipped_and_counted() {
        let data = format!(
            "{}\n,1,0,0,0,0,0,0,0,0,0\n\"!!!\",0,1,0,0,0,0,0,0,0,0\nstill here,0,0,1,0,0,0,0,0,0,0\n",
            header()
        );
        let loaded = parse(&data).unwrap();
        assert_eq!(loaded.skipped_empty, 2);
        assert_eq!(loaded.examples.len(), 1);
        assert_eq!(loaded.examples[0].text, "still here");
    }

    #[test]
    fn missing_column_is_reported_by_name() {
        let data = "text,optimistic\nhello,1\n";
        match parse(data) {
            Err(SentimentError::MissingColumn(name)) => assert_eq!(name, "thankful"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn columns_are_located_by_name_not_position() {
        let data = "joking,text,optimistic,thankful,empathetic,pessimistic,anxious,sad,annoyed,denial,official\n1,laughing now,0,0,0,0,0,0,0,0,0\n";
        let loaded = parse(data).unwrap();
        assert_eq!(
            loaded.examples[0].gold,
            LabelVector::from_labels(&[EmotionLabel::Joking])
        );
    }

    #[test]
    fn split_is_seeded_and_partitions_the_input() {
        let examples: Vec<SenWaveExample> = (0..10)
            .map(|i| SenWaveExample {
                text: format!("example number {i}"),
                gold: LabelVector::empty(),
            })
            .collect();
        let (train, val, test) = split_train_val_test(&examples, 7);
        assert_eq!((train.len(), val.len(), test.len()), (8, 1, 1));

        // Same seed, same split; the three parts re-cover the input.
        let (train2, val2, test2) = split_train_val_test(&examples, 7);
        assert_eq!(train, train2);
        assert_eq!(val, val2);
        assert_eq!(test, test2);

        let mut recovered: Vec<String> = train
            .iter()
            .chain(val.iter())
            .chain(test.iter())
            .map(|e| e.text.clone())
            .collect();
        recovered.sort();
        let mut original: Vec<String> = examples.iter().map(|e| e.text.clone()).collect();
        original.sort();
        assert_eq!(recovered, original);
    }

    #[test]
    fn tiny_inputs_split_without_panic() {
        let examples = vec![SenWaveExample {
            text: "only one".into(),
            gold: LabelVector::empty(),
        }];
        let (train, val, test) = split_train_val_test(&examples, 1);
        assert_eq!(train.len() + val.len() + test.len(), 1);
        let (train, val, test) = split_train_val_test(&[], 1);
        assert!(train.is_empty() && val.is_empty() && test.is_empty());
    }
}
