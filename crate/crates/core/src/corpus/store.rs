//! Corpus persistence: newline-delimited JSON, one record per line.
//!
//! Every line carries a `schema_version` field so a corpus written by an
//! incompatible version of this crate is rejected up front instead of
//! half-parsing. Saving and re-loading a corpus yields records equal to
//! the originals, field for field.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, SongRecord};

/// Version stamp written into (and required on) every corpus line.
pub const CORPUS_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct StoredRecord {
    schema_version: u32,
    #[serde(flatten)]
    record: SongRecord,
}

/// Writes `records` to `writer`, one JSON object per line.
pub fn write_corpus<W: Write>(records: &[SongRecord], mut writer: W) -> Result<(), CorpusError> {
    for record in records {
        let stored = StoredRecord {
            schema_version: CORPUS_SCHEMA_VERSION,
            record: record.clone(),
        };
        serde_json::to_writer(&mut writer, &stored)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes `records` to the file at `path`. See [`write_corpus`].
pub fn save_corpus(records: &[SongRecord], path: &Path) -> Result<(), CorpusError> {
    let mut writer = BufWriter::new(File::create(path)?);
    write_corpus(records, &mut writer)?;
    writer.flush()?;
    Ok(())
}

/// Reads a corpus from `reader`, in file order. Blank lines are skipped.
///
/// The first line whose `schema_version` is not [`CORPUS_SCHEMA_VERSION`]
/// aborts the load with [`CorpusError::SchemaVersionMismatch`]; any other
/// malformed line reports its 1-based number.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<SongRecord>, CorpusError> {
    let mut records = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line_number = index + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| CorpusError::MalformedRecord {
                line: line_number,
                reason: e.to_string(),
            })?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(found) if found == u64::from(CORPUS_SCHEMA_VERSION) => {}
            Some(found) => {
                return Err(CorpusError::SchemaVersionMismatch {
                    found: found.try_into().unwrap_or(u32::MAX),
                    expected: CORPUS_SCHEMA_VERSION,
                })
            }
            None => {
                return Err(CorpusError::MalformedRecord {
                    line: line_number,
                    reason: "missing schema_version".to_string(),
                })
            }
        }
        let stored: StoredRecord =
            serde_json::from_value(value).map_err(|e| CorpusError::MalformedRecord {
                line: line_number,
                reason: e.to_string(),
            })?;
        records.push(stored.record);
    }
    Ok(records)
}

/// Reads a corpus from the file at `path`. See [`read_corpus`].
pub fn load_corpus(path: &Path) -> Result<Vec<SongRecord>, CorpusError> {
    read_corpus(BufReader::new(File::open(path)?))
}
