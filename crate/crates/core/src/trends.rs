//! Longitudinal aggregation: how explicitness, emotion, abusive-word use,
//! and polarity move across years, decades, and genres.
//!
//! Every operation here produces a [`TrendTable`]: one key column (year,
//! decade, genre, or year:genre) plus named numeric metrics, with rows
//! sorted by key and cells that can be `null` when a ratio has no
//! denominator. Tables deliberately keep a fixed schema — a year with no
//! labeled songs still gets a row, a genre with no songs still gets a row
//! — so downstream plots never change shape between corpus revisions.
//!
//! Counting conventions worth knowing before reading any numbers:
//! - Explicit percentages are computed over *labeled* songs only; songs
//!   without a provider label are tallied in their own column, because
//!   label absence in early decades is structural, not random.
//! - Abusive-word trends count *occurrences* (every matching token
//!   position), not distinct terms.
//! - A multi-label chunk increments one cell per label it carries.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abuse::{count_chunk, AbuseLexicon};
use crate::corpus::SongRecord;
use crate::ngram::SongTokens;
use crate::normalize::PrimaryGenre;
use crate::sentiment::{binary_accuracy, EmotionLabel, PredictionRecord, SentimentError};

/// Errors for trend aggregation and emission.
#[derive(Debug, Error)]
pub enum TrendsError {
    /// Computed flags and provider labels share no song id.
    #[error("computed flags and provider labels have no song in common")]
    NoOverlap,
    #[error("metric error: {0}")]
    Metric(#[from] SentimentError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// What a table's key column ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendDimension {
    Year,
    Decade,
    Genre,
    YearByGenre,
    Era,
}

impl fmt::Display for TrendDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            TrendDimension::Year => "year",
            TrendDimension::Decade => "decade",
            TrendDimension::Genre => "genre",
            TrendDimension::YearByGenre => "year_by_genre",
            TrendDimension::Era => "era",
        };
        f.write_str(name)
    }
}

/// One table row: a key and one value per metric, aligned with
/// [`TrendTable::metric_names`]. `None` renders as an empty CSV cell and
/// JSON `null` — a ratio whose denominator was zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub key: String,
    pub values: Vec<Option<f64>>,
}

/// An ordered, schema-stable trend table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendTable {
    pub dimension: TrendDimension,
    /// Name of the key column in emitted files.
    pub key_name: String,
    pub metric_names: Vec<String>,
    /// Rows with unique keys in ascending key order.
    pub rows: Vec<TrendRow>,
}

impl TrendTable {
    fn new(dimension: TrendDimension, key_name: &str, metric_names: &[&str]) -> TrendTable {
        TrendTable {
            dimension,
            key_name: key_name.to_string(),
            metric_names: metric_names.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Looks a cell up by key and metric name. `None` when the row or
    /// metric is absent; `Some(None)` is a present-but-null cell.
    pub fn cell(&self, key: &str, metric: &str) -> Option<Option<f64>> {
        let column = self.metric_names.iter().position(|m| m == metric)?;
        let row = self.rows.iter().find(|r| r.key == key)?;
        row.values.get(column).copied()
    }
}

/// Hundredths-style percentage, `None` when the denominator is zero.
fn percentage(numerator: usize, denominator: usize) -> Option<f64> {
    if denominator == 0 {
        None
    } else {
        Some(100.0 * numerator as f64 / denominator as f64)
    }
}

/// Share of labeled songs marked explicit, year by year.
///
/// Every year that appears in the corpus gets a row with `labeled_count`,
/// `explicit_count`, `unlabeled_count`, and `pct_explicit` =
/// 100·explicit/labeled (null when no song that year carries a label).
pub fn pct_explicit_by_year(corpus: &[SongRecord]) -> TrendTable {
    #[derive(Default)]
    struct Tally {
        labeled: usize,
        explicit: usize,
        unlabeled: usize,
    }

    let mut by_year: BTreeMap<i32, Tally> = BTreeMap::new();
    for record in corpus {
        let tally = by_year.entry(record.year).or_default();
        match record.explicit_label {
            Some(true) => {
                tally.labeled += 1;
                tally.explicit += 1;
            }
            Some(false) => tally.labeled += 1,
            None => tally.unlabeled += 1,
        }
    }

    let mut table = TrendTable::new(
        TrendDimension::Year,
        "year",
        &[
            "labeled_count",
            "explicit_count",
            "unlabeled_count",
            "pct_explicit",
        ],
    );
    for (year, tally) in by_year {
        table.rows.push(TrendRow {
            key: year.to_string(),
            values: vec![
                Some(tally.labeled as f64),
                Some(tally.explicit as f64),
                Some(tally.unlabeled as f64),
                percentage(tally.explicit, tally.labeled),
            ],
        });
    }
    table
}

/// Song counts and shares per primary genre.
///
/// A non-empty corpus lists every primary genre — zero-count rows
/// included, `other` and `unknown` separate — sorted by genre name. An
/// empty corpus yields an empty table.
pub fn genre_distribution(corpus: &[SongRecord]) -> TrendTable {
    let mut table = TrendTable::new(TrendDimension::Genre, "genre", &["count", "pct"]);
    if corpus.is_empty() {
        return table;
    }

    let mut counts: BTreeMap<&str, usize> = PrimaryGenre::ALL.iter().map(|g| (g.name(), 0)).collect();
    for record in corpus {
        *counts.entry(record.genre.name()).or_default() += 1;
    }
    for (genre, count) in counts {
        table.rows.push(TrendRow {
            key: genre.to_string(),
            values: vec![Some(count as f64), percentage(count, corpus.len())],
        });
    }
    table
}

/// How emotion tables are keyed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmotionBreakdown {
    Decade,
    Genre,
}

/// The song id inside a chunk unit id.
///
/// Chunk-level prediction units are named `{song_id}#{chunk_id}`; a unit
/// id without `#` is taken to be a bare song id.
pub fn song_id_of_unit(unit_id: &str) -> &str {
    unit_id.split('#').next().unwrap_or(unit_id)
}

/// Chunk counts per emotion label, keyed by decade or genre.
///
/// Each predicted chunk is joined to its song via [`song_id_of_unit`] and
/// increments one cell per label it carries, so a chunk tagged both
/// `anxious` and `sad` counts once in each column. Rows cover every
/// decade (or every primary genre) present in the corpus, zero rows
/// included. Predictions whose song id is not in the corpus don't count
/// anywhere; their unit ids come back as warnings.
pub fn emotion_counts(
    predictions: &[PredictionRecord],
    corpus: &[SongRecord],
    by: EmotionBreakdown,
) -> (TrendTable, Vec<String>) {
    let key_of: BTreeMap<&str, String> = corpus
        .iter()
        .map(|record| {
            let key = match by {
                EmotionBreakdown::Decade => record.decade.to_string(),
                EmotionBreakdown::Genre => record.genre.name().to_string(),
            };
            (record.song_id.as_str(), key)
        })
        .collect();

    // Schema stability: a key exists because the *corpus* has songs there,
    // not because any chunk was predicted there.
    let mut counts: BTreeMap<String, [u64; 10]> =
        key_of.values().map(|key| (key.clone(), [0u64; 10])).collect();
    if by == EmotionBreakdown::Genre && !corpus.is_empty() {
        for genre in PrimaryGenre::ALL {
            counts.entry(genre.name().to_string()).or_insert([0u64; 10]);
        }
    }

    let mut unjoined = Vec::new();
    for prediction in predictions {
        let song_id = song_id_of_unit(&prediction.unit_id);
        match key_of.get(song_id) {
            Some(key) => {
                let cells = counts.get_mut(key).expect("key added above");
                for label in prediction.labels.iter_set() {
                    cells[label.index()] += 1;
                }
            }
            None => unjoined.push(prediction.unit_id.clone()),
        }
    }

    let dimension = match by {
        EmotionBreakdown::Decade => TrendDimension::Decade,
        EmotionBreakdown::Genre => TrendDimension::Genre,
    };
    let key_name = match by {
        EmotionBreakdown::Decade => "decade",
        EmotionBreakdown::Genre => "genre",
    };
    let metric_names: Vec<&str> = EmotionLabel::ALL.iter().map(|l| l.key()).collect();
    let mut table = TrendTable::new(dimension, key_name, &metric_names);
    for (key, cells) in counts {
        table.rows.push(TrendRow {
            key,
            values: cells.iter().map(|&c| Some(c as f64)).collect(),
        });
    }
    (table, unjoined)
}

/// Total tokens vs abusive-word occurrences, year by year.
///
/// `pct_abusive` = 100·occurrences/total_tokens, null for a year whose
/// songs carry no tokens at all.
pub fn word_counts_by_year(songs: &[SongTokens], lexicon: &AbuseLexicon) -> TrendTable {
    #[derive(Default)]
    struct Tally {
        tokens: usize,
        abusive: usize,
    }

    let mut by_year: BTreeMap<i32, Tally> = BTreeMap::new();
    for song in songs {
        let tally = by_year.entry(song.year).or_default();
        for chunk in &song.chunks {
            let (_, occurrences, _) = count_chunk(chunk, lexicon);
            tally.tokens += chunk.len();
            tally.abusive += occurrences;
        }
    }

    let mut table = TrendTable::new(
        TrendDimension::Year,
        "year",
        &["total_tokens", "abusive_occurrences", "pct_abusive"],
    );
    for (year, tally) in by_year {
        table.rows.push(TrendRow {
            key: year.to_string(),
            values: vec![
                Some(tally.tokens as f64),
                Some(tally.abusive as f64),
                percentage(tally.abusive, tally.tokens),
            ],
        });
    }
    table
}

/// How polarity tables are keyed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarityBreakdown {
    Year,
    YearByGenre,
}

/// Mean song polarity per year (or per year-and-genre).
///
/// `scores` maps song id to song-level polarity; corpus songs without a
/// score are skipped, and keys with no scored songs are omitted rather
/// than padded — a gap in a polarity trend means "no data", not zero.
/// Year-by-genre keys read `{year}:{genre}`.
pub fn avg_polarity(
    corpus: &[SongRecord],
    scores: &BTreeMap<String, f64>,
    by: PolarityBreakdown,
) -> TrendTable {
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for record in corpus {
        let Some(&score) = scores.get(&record.song_id) else {
            continue;
        };
        let key = match by {
            PolarityBreakdown::Year => record.year.to_string(),
            PolarityBreakdown::YearByGenre => format!("{}:{}", record.year, record.genre.name()),
        };
        let slot = sums.entry(key).or_insert((0.0, 0));
        slot.0 += score;
        slot.1 += 1;
    }

    let (dimension, key_name) = match by {
        PolarityBreakdown::Year => (TrendDimension::Year, "year"),
        PolarityBreakdown::YearByGenre => (TrendDimension::YearByGenre, "year:genre"),
    };
    let mut table = TrendTable::new(dimension, key_name, &["mean_polarity", "song_count"]);
    for (key, (sum, count)) in sums {
        table.rows.push(TrendRow {
            key,
            values: vec![Some(sum / count as f64), Some(count as f64)],
        });
    }
    table
}

/// Agreement between lexicon-computed explicitness and provider labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderComparison {
    /// Songs both sides call explicit.
    pub true_positive: usize,
    /// Computed explicit, provider clean.
    pub false_positive: usize,
    /// Computed clean, provider explicit.
    pub false_negative: usize,
    /// Songs both sides call clean.
    pub true_negative: usize,
    pub accuracy: f64,
    pub f1: f64,
}

/// Scores computed explicit flags against provider labels.
///
/// Only songs present in `computed` *and* carrying a provider label
/// participate; an empty intersection is [`TrendsError::NoOverlap`]. The
/// provider label is ground truth: a song the lexicon misses but the
/// provider marks explicit is a false negative. F1 uses the same
/// zero-denominator convention as the multi-label metrics (no positives
/// anywhere → 0.0).
pub fn compare_against_provider(
    computed: &BTreeMap<String, bool>,
    corpus: &[SongRecord],
) -> Result<ProviderComparison, TrendsError> {
    let mut flags = Vec::new();
    let mut golds = Vec::new();
    for record in corpus {
        let (Some(&flag), Some(label)) = (computed.get(&record.song_id), record.explicit_label)
        else {
            continue;
        };
        flags.push(flag);
        golds.push(label);
    }
    if flags.is_empty() {
        return Err(TrendsError::NoOverlap);
    }

    let mut comparison = ProviderComparison {
        true_positive: 0,
        false_positive: 0,
        false_negative: 0,
        true_negative: 0,
        accuracy: 0.0,
        f1: 0.0,
    };
    for (&flag, &gold) in flags.iter().zip(&golds) {
        match (flag, gold) {
            (true, true) => comparison.true_positive += 1,
            (true, false) => comparison.false_positive += 1,
            (false, true) => comparison.false_negative += 1,
            (false, false) => comparison.true_negative += 1,
        }
    }
    comparison.accuracy = binary_accuracy(&flags, &golds)?;
    let denominator =
        2 * comparison.true_positive + comparison.false_positive + comparison.false_negative;
    comparison.f1 = if denominator == 0 {
        0.0
    } else {
        2.0 * comparison.true_positive as f64 / denominator as f64
    };
    Ok(comparison)
}

/// Writes a table as RFC-4180 CSV: key column then metrics, null cells
/// empty.
pub fn write_table_csv<W: Write>(table: &TrendTable, writer: W) -> Result<(), TrendsError> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    let mut header = vec![table.key_name.clone()];
    header.extend(table.metric_names.iter().cloned());
    csv_writer.write_record(&header)?;
    for row in &table.rows {
        let mut record = vec![row.key.clone()];
        for value in &row.values {
            record.push(match value {
                Some(v) => format!("{v}"),
                None => String::new(),
            });
        }
        csv_writer.write_record(&record)?;
    }
    csv_writer.flush()?;
    Ok(())
}

/// Serializes a table as pretty JSON.
pub fn table_to_json(table: &TrendTable) -> Result<String, TrendsError> {
    Ok(serde_json::to_string_pretty(table)?)
}

/// A minimal plot description any charting tool can consume: which
/// column is x, which metrics are y series, and how to draw them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    /// `"line"` or `"bar"`.
    pub mark: String,
    pub x: String,
    pub y: Vec<String>,
    /// Key component to facet by (e.g. `"genre"` for year:genre keys).
    pub series: Option<String>,
}

/// Builds a plot spec for `table` over the given y metrics.
pub fn plot_spec(table: &TrendTable, mark: &str, y: &[&str], series: Option<&str>) -> PlotSpec {
    PlotSpec {
        mark: mark.to_string(),
        x: table.key_name.clone(),
        y: y.iter().map(|s| s.to_string()).collect(),
        series: series.map(str::to_string),
    }
}
