//! Chart ingestion and the song corpus built from it.
//!
//! The corpus starts as raw weekly chart rows (`date,rank,song,artist`) and
//! is collapsed into one [`SongRecord`] per distinct song, where "distinct"
//! depends on the chosen [`CorpusScope`]: a song that charted in several
//! years is one record under [`CorpusScope::TimeAgnostic`] but one record
//! per calendar year under [`CorpusScope::Year`]. Records carry identity
//! fields fixed at dedupe time (title, artist, first chart date) plus
//! enrichment slots (genre, explicit label, lyrics) that provider chains
//! fill in later — see [`providers`] — and persistence lives in [`store`].
//!
//! Song identity is a 64-bit stable hash over the normalized title and
//! primary artist, so raw spelling variants (`feat.` vs `Featuring`,
//! `(Radio Edit)` suffixes, case) collapse to the same record.

mod providers;
mod store;

pub use providers::{
    enrich, EnrichOutcome, FixtureProvider, MetadataProvider, ProviderChain, ProviderFailure,
    ProviderFields,
};
pub use store::{load_corpus, read_corpus, save_corpus, write_corpus, CORPUS_SCHEMA_VERSION};

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::normalize::{
    normalize_artist, normalize_title, ArtistOptions, ArtistParse, NormalizeError, PrimaryGenre,
};

/// No chart in this dataset predates this Monday in 1958.
pub const CHART_EPOCH: &str = "1958-01-01";

/// Errors for chart parsing, deduplication, enrichment, and persistence.
#[derive(Debug, Error)]
pub enum CorpusError {
    /// The chart CSV header lacks a required column.
    #[error("chart file is missing required column {0:?}")]
    MissingColumn(String),
    /// A chart row's date cell does not parse as an ISO-8601 calendar date.
    #[error("data row {row}: {value:?} is not a valid ISO-8601 date")]
    MalformedDate { row: usize, value: String },
    /// A chart row's date predates the chart epoch.
    #[error("data row {row}: date {date} is before the chart epoch {CHART_EPOCH}")]
    DateBeforeEpoch { row: usize, date: NaiveDate },
    /// A chart row's rank cell is not an integer in 1..=100.
    #[error("data row {row}: rank {value:?} is outside 1..=100")]
    RankOutOfRange { row: usize, value: String },
    /// A title or artist cell could not be normalized.
    #[error("data row {row}: {source}")]
    BadRow {
        row: usize,
        source: NormalizeError,
    },
    /// Every provider in an enrichment chain was unreachable.
    #[error("no provider in the chain could be reached")]
    AllProvidersFailed,
    /// A provider chain must hold at least one provider.
    #[error("provider chain is empty")]
    EmptyProviderChain,
    /// A provider fixture file does not have the expected shape.
    #[error("provider fixture {name:?}: {reason}")]
    BadFixture { name: String, reason: String },
    /// A corpus file line is not a valid record.
    #[error("corpus line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    /// A corpus file was written by an incompatible version of this crate.
    #[error("corpus schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: u32, expected: u32 },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// One row of a weekly chart file: a song held `rank` on `chart_date`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartEntry {
    pub chart_date: NaiveDate,
    /// Chart position, 1..=100.
    pub rank: u32,
    /// Title exactly as printed in the chart file.
    pub title_raw: String,
    /// Artist credit exactly as printed in the chart file.
    pub artist_raw: String,
}

/// Whether a song's lyrics were judged to be English.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LanguageStatus {
    English,
    NonEnglish,
    /// Not yet checked, or the check could not reach a verdict.
    Undetermined,
}

impl fmt::Display for LanguageStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            LanguageStatus::English => "english",
            LanguageStatus::NonEnglish => "non_english",
            LanguageStatus::Undetermined => "undetermined",
        };
        f.write_str(name)
    }
}

/// How chart appearances collapse into song records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusScope {
    /// One record per song, no matter when it charted.
    TimeAgnostic,
    /// One record per song per decade it charted in.
    Decade,
    /// One record per song per calendar year it charted in.
    Year,
}

/// One distinct song (within a [`CorpusScope`] partition).
///
/// Identity fields (`song_id` through `decade`) are fixed by
/// [`dedupe_songs`]; the rest start empty and are filled by enrichment and
/// later pipeline stages. Invariants: `first_chart_date` falls inside
/// `year`, and `decade` is `year` rounded down to a multiple of ten.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SongRecord {
    /// 64-bit stable hash of the normalized title and primary artist,
    /// printed as 16 lowercase hex digits.
    pub song_id: String,
    /// Normalized title (release decorations stripped).
    pub title: String,
    /// Normalized primary artist.
    pub artist_primary: String,
    /// Normalized collaborators, in credit order.
    pub artists_featured: Vec<String>,
    /// Earliest chart appearance within this record's partition.
    pub first_chart_date: NaiveDate,
    /// Year of `first_chart_date`.
    pub year: i32,
    /// `year` rounded down to a multiple of ten.
    pub decade: i32,
    pub genre: PrimaryGenre,
    /// Provider explicit-content label; `None` until a provider supplies one.
    pub explicit_label: Option<bool>,
    /// Lyrics as fetched, before any cleaning.
    pub lyrics_raw: Option<String>,
    /// Lyrics after promo-line stripping and text standardization.
    pub lyrics_clean: Option<String>,
    pub language_status: LanguageStatus,
}

/// Stable 64-bit song identity as 16 lowercase hex digits.
///
/// Hashes `lower(title)`, a US separator byte, and `lower(artist_primary)`,
/// then keeps the first 8 bytes of the SHA-256 digest. Inputs are expected
/// to be *normalized* title and artist, so spelling variants that normalize
/// alike get the same id.
///
/// ```
/// use chartlex::corpus::song_id;
///
/// let id = song_id("Umbrella", "Rihanna");
/// assert_eq!(id.len(), 16);
/// assert_eq!(id, song_id("UMBRELLA", "rihanna"));
/// assert_ne!(id, song_id("Umbrella", "Rihanna Jr."));
/// ```
pub fn song_id(title: &str, artist_primary: &str) -> String {
    let key = format!(
        "{}\u{1f}{}",
        title.to_lowercase(),
        artist_primary.to_lowercase()
    );
    let digest = Sha256::digest(key.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a weekly chart CSV from `path`. See [`parse_chart_csv`].
pub fn load_chart_csv(path: &Path) -> Result<Vec<ChartEntry>, CorpusError> {
    parse_chart_csv(File::open(path)?)
}

/// Parses a weekly chart CSV: a header declaring `date`, `rank`, `song`,
/// and `artist` columns (any order, extra columns ignored) followed by one
/// row per chart slot. Rows come back in file order, duplicates intact.
///
/// Errors name the offending 1-based data row: [`CorpusError::MalformedDate`]
/// for an unparseable date, [`CorpusError::DateBeforeEpoch`] for one before
/// [`CHART_EPOCH`], and [`CorpusError::RankOutOfRange`] for a rank cell that
/// is not an integer in 1..=100.
pub fn parse_chart_csv<R: io::Read>(reader: R) -> Result<Vec<ChartEntry>, CorpusError> {
    let mut csv_reader = csv::ReaderBuilder::new().flexible(true).from_reader(reader);

    let headers = csv_reader.headers()?.clone();
    let column = |name: &str| -> Result<usize, CorpusError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))
    };
    let date_col = column("date")?;
    let rank_col = column("rank")?;
    let song_col = column("song")?;
    let artist_col = column("artist")?;

    let epoch = NaiveDate::parse_from_str(CHART_EPOCH, "%Y-%m-%d").expect("epoch is a valid date");
    let mut entries = Vec::new();
    for (index, row) in csv_reader.records().enumerate() {
        let row_number = index + 1;
        let row = row?;
        let cell = |col: usize| row.get(col).unwrap_or("").trim();

        let date_text = cell(date_col);
        let chart_date = NaiveDate::parse_from_str(date_text, "%Y-%m-%d").map_err(|_| {
            CorpusError::MalformedDate {
                row: row_number,
                value: date_text.to_string(),
            }
        })?;
        if chart_date < epoch {
            return Err(CorpusError::DateBeforeEpoch {
                row: row_number,
                date: chart_date,
            });
        }

        let rank_text = cell(rank_col);
        let rank: u32 = match rank_text.parse() {
            Ok(rank) if (1..=100).contains(&rank) => rank,
            _ => {
                return Err(CorpusError::RankOutOfRange {
                    row: row_number,
                    value: rank_text.to_string(),
                })
            }
        };

        entries.push(ChartEntry {
            chart_date,
            rank,
            title_raw: cell(song_col).to_string(),
            artist_raw: cell(artist_col).to_string(),
        });
    }
    Ok(entries)
}

/// Collapses chart entries into one [`SongRecord`] per song per scope
/// partition.
///
/// Entries are grouped by [`song_id`] — computed from the *normalized*
/// title and primary artist — plus the partition the entry's chart date
/// falls in (`()` / decade / year). Within a group, `first_chart_date` is
/// the earliest chart date, and the title and artist credit are taken from
/// that earliest entry (first in file order on ties). Output is sorted by
/// `(first_chart_date, title)`.
///
/// Empty input yields an empty corpus. The only failures are normalization
/// failures on degenerate cells (e.g. an empty title), reported with the
/// 1-based entry position.
pub fn dedupe_songs(
    entries: &[ChartEntry],
    scope: CorpusScope,
) -> Result<Vec<SongRecord>, CorpusError> {
    struct Group {
        first_date: NaiveDate,
        title: String,
        artist: ArtistParse,
    }

    let mut groups: BTreeMap<(String, i32), Group> = BTreeMap::new();
    for (index, entry) in entries.iter().enumerate() {
        let bad_row = |source: NormalizeError| CorpusError::BadRow {
            row: index + 1,
            source,
        };
        let title = normalize_title(&entry.title_raw).map_err(bad_row)?;
        let artist =
            normalize_artist(&entry.artist_raw, ArtistOptions::default()).map_err(bad_row)?;
        let id = song_id(&title, &artist.primary);
        let partition = match scope {
            CorpusScope::TimeAgnostic => 0,
            CorpusScope::Decade => entry.chart_date.year() / 10 * 10,
            CorpusScope::Year => entry.chart_date.year(),
        };

        match groups.get_mut(&(id.clone(), partition)) {
            Some(group) => {
                // Strict `<` keeps the earliest file-order entry on date ties.
                if entry.chart_date < group.first_date {
                    group.first_date = entry.chart_date;
                    group.title = title;
                    group.artist = artist;
                }
            }
            None => {
                groups.insert(
                    (id, partition),
                    Group {
                        first_date: entry.chart_date,
                        title,
                        artist,
                    },
                );
            }
        }
    }

    let mut records: Vec<SongRecord> = groups
        .into_iter()
        .map(|((id, _), group)| {
            let year = group.first_date.year();
            SongRecord {
                song_id: id,
                title: group.title,
                artist_primary: group.artist.primary,
                artists_featured: group.artist.featured,
                first_chart_date: group.first_date,
                year,
                decade: year / 10 * 10,
                genre: PrimaryGenre::Unknown,
                explicit_label: None,
                lyrics_raw: None,
                lyrics_clean: None,
                language_status: LanguageStatus::Undetermined,
            }
        })
        .collect();
    records.sort_by(|a, b| {
        a.first_chart_date
            .cmp(&b.first_chart_date)
            .then_with(|| a.title.cmp(&b.title))
            .then_with(|| a.song_id.cmp(&b.song_id))
    });
    Ok(records)
}

/// Drops records whose first chart year predates 1990, preserving order.
///
/// The study window starts at 1990: earlier decades have too little lyric
/// coverage from the providers to compare fairly.
pub fn filter_pre1990(records: Vec<SongRecord>) -> Vec<SongRecord> {
    records.into_iter().filter(|r| r.year >= 1990).collect()
}
