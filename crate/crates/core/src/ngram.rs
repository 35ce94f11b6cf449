//! N-gram counting and deterministic top-k tables per era.
//!
//! Songs are bucketed into eras by chart year, n-grams are counted over
//! every chunk of every song in the bucket, and each era yields a table of
//! the `k` most frequent grams. Windows never cross chunk boundaries:
//! chunks already break where textual continuity is artificial. No
//! stopword removal is applied anywhere.
//!
//! Tables are fully deterministic: rows sort by count descending, then by
//! gram ascending lexicographically, which is a total order because grams
//! within a table are distinct.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from era-partition construction and table emission.
#[derive(Debug, Error)]
pub enum NgramError {
    #[error("era partition has no eras")]
    EmptyPartition,
    #[error("era `{label}` has start year {start_year} after end year {end_year}")]
    ReversedEra {
        label: String,
        start_year: i32,
        end_year: i32,
    },
    #[error("era `{second}` must start after era `{first}` ends")]
    OutOfOrderEras { first: String, second: String },
    #[error("n-gram window width must be at least 1")]
    ZeroWindow,
    #[error("failed to write n-gram table")]
    Io(#[from] io::Error),
    #[error("failed to encode n-gram tables as JSON")]
    Json(#[from] serde_json::Error),
    #[error("failed to write n-gram CSV")]
    Csv(#[from] csv::Error),
}

/// One labeled span of chart years; both endpoints are inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Era {
    pub label: String,
    pub start_year: i32,
    pub end_year: i32,
}

impl Era {
    pub fn new(label: &str, start_year: i32, end_year: i32) -> Self {
        Era {
            label: label.to_string(),
            start_year,
            end_year,
        }
    }

    pub fn contains(&self, year: i32) -> bool {
        self.start_year <= year && year <= self.end_year
    }
}

/// An ordered list of non-overlapping eras. Gaps between eras are allowed;
/// years falling in a gap (or outside the span entirely) belong to no era.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EraPartition {
    eras: Vec<Era>,
}

impl EraPartition {
    /// Validates that eras are non-empty, individually well-formed, and
    /// strictly ascending without overlap.
    pub fn new(eras: Vec<Era>) -> Result<Self, NgramError> {
        if eras.is_empty() {
            return Err(NgramError::EmptyPartition);
        }
        for era in &eras {
            if era.start_year > era.end_year {
                return Err(NgramError::ReversedEra {
                    label: era.label.clone(),
                    start_year: era.start_year,
                    end_year: era.end_year,
                });
            }
        }
        for pair in eras.windows(2) {
            if pair[1].start_year <= pair[0].end_year {
                return Err(NgramError::OutOfOrderEras {
                    first: pair[0].label.clone(),
                    second: pair[1].label.clone(),
                });
            }
        }
        Ok(EraPartition { eras })
    }

    pub fn eras(&self) -> &[Era] {
        &self.eras
    }

    /// Index of the era containing `year`, if any.
    pub fn era_index(&self, year: i32) -> Option<usize> {
        self.eras.iter().position(|era| era.contains(year))
    }
}

/// The three default report eras.
pub fn default_partition() -> EraPartition {
    EraPartition::new(vec![
        Era::new("1990-2005", 1990, 2005),
        Era::new("2006-2016", 2006, 2016),
        Era::new("2017-2024", 2017, 2024),
    ])
    .expect("default eras are valid")
}

/// One table row: an n-token gram and how often it occurred in the era.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramRow {
    pub gram: Vec<String>,
    pub count: u64,
}

/// Top-k gram counts for one era. Rows are sorted by count descending,
/// then gram ascending; every count is at least 1. An era with no songs
/// (or no windows) has zero rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NgramTable {
    pub era_label: String,
    pub n: usize,
    pub rows: Vec<NgramRow>,
}

/// Minimal view of a song for era counting: its chart year plus the token
/// lists of its chunks.
#[derive(Debug, Clone)]
pub struct SongTokens {
    pub year: i32,
    pub chunks: Vec<Vec<String>>,
}

/// All consecutive windows of `n` tokens, in order. The output holds
/// exactly `max(0, tokens.len() - n + 1)` grams; duplicates appear once
/// per occurrence.
///
/// # Panics
///
/// Panics if `n` is zero.
pub fn extract_ngrams(tokens: &[String], n: usize) -> Vec<Vec<String>> {
    assert!(n >= 1, "window width must be at least 1");
    tokens.windows(n).map(|w| w.to_vec()).collect()
}

/// Builds one top-k table per era.
///
/// Counts are summed over every chunk of every song whose year falls in
/// the era; windows never cross chunk boundaries, and songs outside every
/// era are ignored. Counting is commutative, so permuting the corpus
/// leaves every table unchanged.
///
/// # Errors
///
/// [`NgramError::ZeroWindow`] when `n` is zero. An era that matched no
/// songs yields a zero-row table, not an error.
pub fn top_k(
    songs: &[SongTokens],
    partition: &EraPartition,
    n: usize,
    k: usize,
) -> Result<Vec<NgramTable>, NgramError> {
    if n == 0 {
        return Err(NgramError::ZeroWindow);
    }
    let mut per_era: Vec<BTreeMap<Vec<String>, u64>> =
        vec![BTreeMap::new(); partition.eras().len()];
    for song in songs {
        let Some(idx) = partition.era_index(song.year) else {
            continue;
        };
        for chunk in &song.chunks {
            for window in chunk.windows(n) {
                *per_era[idx].entry(window.to_vec()).or_insert(0) += 1;
            }
        }
    }
    let tables = partition
        .eras()
        .iter()
        .zip(per_era)
        .map(|(era, counts)| {
            let mut rows: Vec<NgramRow> = counts
                .into_iter()
                .map(|(gram, count)| NgramRow { gram, count })
                .collect();
            rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.gram.cmp(&b.gram)));
            rows.truncate(k);
            NgramTable {
                era_label: era.label.clone(),
                n,
                rows,
            }
        })
        .collect();
    Ok(tables)
}

/// Writes one table as CSV with header `gram_1,...,gram_n,count`. A
/// zero-row table produces the header alone.
pub fn write_table_csv<W: io::Write>(table: &NgramTable, writer: W) -> Result<(), NgramError> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=table.n).map(|i| format!("gram_{i}")).collect();
    header.push("count".to_string());
    out.write_record(&header)?;
    for row in &table.rows {
        let mut record: Vec<String> = row.gram.clone();
        record.push(row.count.to_string());
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

/// Serializes every table into one JSON document for plot emission.
pub fn tables_to_json(tables: &[NgramTable]) -> Result<String, NgramError> {
    Ok(serde_json::to_string_pretty(tables)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn single_era() -> EraPartition {
        EraPartition::new(vec![Era::new("all", 1990, 2024)]).unwrap()
    }

    #[test]
    fn extracts_consecutive_windows() {
        let grams = extract_ngrams(&toks(&["love", "love", "love", "love"]), 3);
        assert_eq!(grams.len(), 2);
        assert!(grams.iter().all(|g| g == &toks(&["love", "love", "love"])));

        assert!(extract_ngrams(&toks(&["a", "b"]), 3).is_empty());

        let unigrams = extract_ngrams(&toks(&["a", "b", "c"]), 1);
        assert_eq!(unigrams, vec![toks(&["a"]), toks(&["b"]), toks(&["c"])]);
    }

    #[test]
    fn repeated_word_song_counts_as_multiset() {
        let songs = vec![SongTokens {
            year: 1995,
            chunks: vec![toks(&["love", "love", "love", "love"])],
        }];
        let tables = top_k(&songs, &single_era(), 3, 10).unwrap();
        assert_eq!(tables.len(), 1);
        assert_eq!(tables[0].rows.len(), 1);
        assert_eq!(tables[0].rows[0].gram, toks(&["love", "love", "love"]));
        assert_eq!(tables[0].rows[0].count, 2);
    }

    #[test]
    fn grams_never_cross_eras() {
        let partition = default_partition();
        let songs = vec![
            SongTokens {
                year: 1999,
                chunks: vec![toks(&["hold", "me", "now"])],
            },
            SongTokens {
                year: 2020,
                chunks: vec![toks(&["hold", "me", "now"])],
            },
        ];
        let tables = top_k(&songs, &partition, 3, 10).unwrap();
        assert_eq!(tables[0].rows[0].count, 1);
        assert!(tables[1].rows.is_empty());
        assert_eq!(tables[2].rows[0].count, 1);
    }

    #[test]
    fn grams_never_cross_chunk_boundaries() {
        let songs = vec![SongTokens {
            year: 2000,
            chunks: vec![toks(&["a", "b"]), toks(&["c", "d"])],
        }];
        let tables = top_k(&songs, &single_era(), 2, 10).unwrap();
        let grams: Vec<&Vec<String>> = tables[0].rows.iter().map(|r| &r.gram).collect();
        assert_eq!(grams, vec![&toks(&["a", "b"]), &toks(&["c", "d"])]);
    }

    #[test]
    fn rows_sort_by_count_desc_then_gram_asc() {
        let songs = vec![SongTokens {
            year: 2000,
            chunks: vec![toks(&["b", "a", "b", "a", "c"])],
        }];
        let tables = top_k(&songs, &single_era(), 1, 10).unwrap();
        let rows = &tables[0].rows;
        assert_eq!(
            rows.iter()
                .map(|r| (r.gram[0].as_str(), r.count))
                .collect::<Vec<_>>(),
            vec![("a", 2), ("b", 2), ("c", 1)]
        );
    }

    #[test]
    fn k_truncates_after_sorting() {
        let songs = vec![SongTokens {
            year: 2000,
            chunks: vec![toks(&["c", "c", "c", "a", "a", "b"])],
        }];
        let tables = top_k(&songs, &single_era(), 1, 2).unwrap();
        let rows = &tables[0].rows;
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].gram[0], "c");
        assert_eq!(rows[1].gram[0], "a");
    }

    #[test]
    fn empty_era_yields_zero_row_table() {
        let partition = default_partition();
        let songs = vec![SongTokens {
            year: 1995,
            chunks: vec![toks(&["one", "two", "three"])],
        }];
        let tables = top_k(&songs, &partition, 2, 10).unwrap();
        assert_eq!(tables.len(), 3);
        assert_eq!(tables[0].era_label, "1990-2005");
        assert!(!tables[0].rows.is_empty());
        assert!(tables[1].rows.is_empty());
        assert!(tables[2].rows.is_empty());
    }

    #[test]
    fn songs_outside_every_era_are_ignored() {
        let partition = default_partition();
        let songs = vec![SongTokens {
            year: 1989,
            chunks: vec![toks(&["lost", "to", "time"])],
        }];
        let tables = top_k(&songs, &partition, 1, 10).unwrap();
        assert!(tables.iter().all(|t| t.rows.is_empty()));
    }

    #[test]
    fn table_totals_match_window_counts() {
        let songs = vec![
            SongTokens {
                year: 1991,
                chunks: vec![toks(&["a", "b", "c", "d"]), toks(&["e"])],
            },
            SongTokens {
                year: 1992,
                chunks: vec![toks(&["f", "g", "h"])],
            },
        ];
        let n = 2;
        let tables = top_k(&songs, &single_era(), n, usize::MAX).unwrap();
        let total: u64 = tables[0].rows.iter().map(|r| r.count).sum();
        let expected: u64 = songs
            .iter()
            .flat_map(|s| s.chunks.iter())
            .map(|c| c.len().saturating_sub(n - 1) as u64)
            .sum();
        assert_eq!(total, expected);
    }

    #[test]
    fn partition_validation() {
        assert!(matches!(
            EraPartition::new(vec![]),
            Err(NgramError::EmptyPartition)
        ));
        assert!(matches!(
            EraPartition::new(vec![Era::new("bad", 2000, 1990)]),
            Err(NgramError::ReversedEra { .. })
        ));
        assert!(matches!(
            EraPartition::new(vec![Era::new("a", 1990, 2000), Era::new("b", 2000, 2010)]),
            Err(NgramError::OutOfOrderEras { .. })
        ));
        assert!(matches!(
            EraPartition::new(vec![Era::new("b", 2006, 2010), Era::new("a", 1990, 2000)]),
            Err(NgramError::OutOfOrderEras { .. })
        ));
        // Contiguous, gapped, and single-year eras are all fine.
        assert!(EraPartition::new(vec![
            Era::new("a", 1990, 2000),
            Era::new("b", 2001, 2001),
            Era::new("c", 2010, 2020),
        ])
        .is_ok());
    }

    #[test]
    fn default_partition_boundaries() {
        let partition = default_partition();
        assert_eq!(partition.era_index(1990), Some(0));
        assert_eq!(partition.era_index(2005), Some(0));
        assert_eq!(partition.era_index(2006), Some(1));
        assert_eq!(partition.era_index(2016), Some(1));
        assert_eq!(partition.era_index(2017), Some(2));
        assert_eq!(partition.era_index(2024), Some(2));
        assert_eq!(partition.era_index(1989), None);
        assert_eq!(partition.era_index(2025), None);
    }

    #[test]
    fn csv_has_gram_columns_and_count() {
        let table = NgramTable {
            era_label: "all".into(),
            n: 2,
            rows: vec![NgramRow {
                gram: toks(&["hold", "me"]),
                count: 3,
            }],
        };
        let mut buf = Vec::new();
        write_table_csv(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "gram_1,gram_2,count\nhold,me,3\n");

        let empty = NgramTable {
            era_label: "none".into(),
            n: 2,
            rows: vec![],
        };
        let mut buf = Vec::new();
        write_table_csv(&empty, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "gram_1,gram_2,count\n");
    }

    #[test]
    fn tables_round_trip_through_json() {
        let songs = vec![SongTokens {
            year: 2001,
            chunks: vec![toks(&["x", "y", "x", "y"])],
        }];
        let tables = top_k(&songs, &single_era(), 2, 5).unwrap();
        let json = tables_to_json(&tables).unwrap();
        let parsed: Vec<NgramTable> = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, tables);
    }

    #[test]
    fn zero_window_is_rejected() {
        assert!(matches!(
            top_k(&[], &single_era(), 0, 10),
            Err(NgramError::ZeroWindow)
        ));
    }

    proptest! {
        // |extract_ngrams(tokens, n)| == max(0, len - n + 1)
        #[test]
        fn window_count_formula_holds(
            words in proptest::collection::vec("[a-z]{1,4}", 0..30),
            n in 1usize..6,
        ) {
            let grams = extract_ngrams(&words, n);
            let expected = if words.len() >= n { words.len() - n + 1 } else { 0 };
            prop_assert_eq!(grams.len(), expected);
            for gram in &grams {
                prop_assert_eq!(gram.len(), n);
            }
        }

        // Permuting song order never changes a table.
        #[test]
        fn tables_are_permutation_invariant(
            mut years_and_words in proptest::collection::vec(
                (1990i32..2025, proptest::collection::vec("[a-c]{1}", 0..8)),
                0..8,
            ),
        ) {
            let songs: Vec<SongTokens> = years_and_words
                .iter()
                .map(|(year, words)| SongTokens { year: *year, chunks: vec![words.clone()] })
                .collect();
            let forward = top_k(&songs, &default_partition(), 2, usize::MAX).unwrap();
            years_and_words.reverse();
            let reversed_songs: Vec<SongTokens> = years_and_words
                .iter()
                .map(|(year, words)| SongTokens { year: *year, chunks: vec![words.clone()] })
                .collect();
            let backward = top_k(&reversed_songs, &default_partition(), 2, usize::MAX).unwrap();
            prop_assert_eq!(forward, backward);
        }
    }
}
