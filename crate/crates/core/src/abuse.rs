//! Lexicon-based abusive-word detection over standardized tokens.
//!
//! Two counting views coexist because they answer different questions.
//! The per-chunk tables report DISTINCT canonical terms (a chunk chanting
//! "shit shit shit" counts 1), while longitudinal trend lines sum
//! OCCURRENCES (the same chunk contributes 3). Both come out of one pass.
//!
//! Matching is exact per token: `niggas` and `nigga` are separate lexicon
//! entries, and `passionate` can never match `ass`. Censored spellings are
//! resolved through an explicit pattern map (`bi*ch -> bitch`, one `*` per
//! hidden character) rather than fuzzy inference, so `b*nd`-style false
//! positives cannot happen.

use crate::lyricdoc::LyricsDocument;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use thiserror::Error;

/// Errors from lexicon loading.
#[derive(Debug, Error)]
pub enum AbuseError {
    /// The lexicon file contained no terms.
    #[error("lexicon {0:?} contains no terms")]
    EmptyLexicon(String),
    /// A line could not be parsed as a term or censored-pattern mapping.
    #[error("lexicon line {line_no}: {reason}")]
    MalformedPattern { line_no: usize, reason: String },
    /// The lexicon file could not be read.
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A set of abusive terms plus censored-spelling patterns.
#[derive(Debug, Clone)]
pub struct AbuseLexicon {
    terms: BTreeSet<String>,
    /// Censored pattern -> canonical term; each `*` matches one character.
    censored: BTreeMap<String, String>,
}

impl AbuseLexicon {
    /// The full lexicon shipped with the crate.
    pub fn builtin() -> AbuseLexicon {
        AbuseLexicon::from_text("builtin lexicon", include_str!("../../../data/lexicon.txt"))
            .expect("builtin lexicon is valid")
    }

    /// The minimal six-term lexicon the case-study reference tables count.
    pub fn core() -> AbuseLexicon {
        AbuseLexicon::from_text(
            "core lexicon",
            include_str!("../../../data/lexicon_core.txt"),
        )
        .expect("core lexicon is valid")
    }

    /// Loads a lexicon from a file.
    ///
    /// Format: one lowercase term per line; `pattern -> canonical` lines add
    /// censored spellings; `#` starts a comment; blank lines are skipped.
    pub fn load(path: &Path) -> Result<AbuseLexicon, AbuseError> {
        let text = std::fs::read_to_string(path).map_err(|source| AbuseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        AbuseLexicon::from_text(&path.display().to_string(), &text)
    }

    /// Parses lexicon text. See [`AbuseLexicon::load`] for the format.
    pub fn from_text(origin: &str, text: &str) -> Result<AbuseLexicon, AbuseError> {
        let mut terms = BTreeSet::new();
        let mut censored = BTreeMap::new();
        let mut patterns: Vec<(usize, String, String)> = Vec::new();

        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => raw_line[..pos].trim(),
                None => raw_line.trim(),
            };
            if line.is_empty() {
                continue;
            }
            if let Some((pattern, canonical)) = line.split_once("->") {
                let pattern = pattern.trim().to_lowercase();
                let canonical = canonical.trim().to_lowercase();
                if pattern.is_empty() || canonical.is_empty() {
                    return Err(AbuseError::MalformedPattern {
                        line_no,
                        reason: "empty pattern or canonical term".into(),
                    });
                }
                if !pattern.contains('*') {
                    return Err(AbuseError::MalformedPattern {
                        line_no,
                        reason: format!("pattern {pattern:?} has no `*` wildcard"),
                    });
                }
                if !pattern.chars().all(|c| c.is_ascii_lowercase() || c == '*') {
                    return Err(AbuseError::MalformedPattern {
                        line_no,
                        reason: format!("pattern {pattern:?} may only contain letters and `*`"),
                    });
                }
                patterns.push((line_no, pattern, canonical));
            } else {
                let term = line.to_lowercase();
                if term.split_whitespace().count() != 1 {
                    return Err(AbuseError::MalformedPattern {
                        line_no,
                        reason: format!("term {term:?} contains whitespace"),
                    });
                }
                terms.insert(term);
            }
        }

        if terms.is_empty() {
            return Err(AbuseError::EmptyLexicon(origin.to_string()));
        }
        // Patterns may precede their canonical term in the file, so resolve
        // them only after every term line has been read.
        for (line_no, pattern, canonical) in patterns {
            if !terms.contains(&canonical) {
                return Err(AbuseError::MalformedPattern {
                    line_no,
                    reason: format!("canonical term {canonical:?} is not in the lexicon"),
                });
            }
            censored.insert(pattern, canonical);
        }
        Ok(AbuseLexicon { terms, censored })
    }

    /// Number of terms in the lexicon.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when the lexicon has no terms (never, for a loaded lexicon).
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The terms in sorted order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }
}

/// Resolves one standardized token to its canonical abusive term, if any.
///
/// An exact term match wins; otherwise censored patterns are tried in
/// sorted order, each `*` matching exactly one character.
pub fn match_token<'l>(token: &str, lexicon: &'l AbuseLexicon) -> Option<&'l str> {
    if let Some(term) = lexicon.terms.get(token) {
        return Some(term);
    }
    for (pattern, canonical) in &lexicon.censored {
        if pattern_matches(pattern, token) {
            return Some(canonical);
        }
    }
    None
}

/// True when the pattern covers the token: equal length and every
/// non-`*` position equal.
fn pattern_matches(pattern: &str, token: &str) -> bool {
    if pattern.chars().count() != token.chars().count() {
        return false;
    }
    pattern
        .chars()
        .zip(token.chars())
        .all(|(p, t)| p == '*' || p == t)
}

/// Abusive-word counts for one chunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkAbuse {
    pub chunk_id: String,
    /// Number of different canonical terms present.
    pub distinct: usize,
    /// Number of token positions that matched anything.
    pub occurrences: usize,
    /// The canonical terms present, sorted.
    pub matched: Vec<String>,
}

/// Song-level abusive-word profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbuseProfile {
    pub song_id: String,
    pub per_chunk: Vec<ChunkAbuse>,
    /// Cardinality of the union of matched terms over all chunks.
    pub song_distinct: usize,
    /// Sum of chunk occurrence counts.
    pub song_occurrences: usize,
    /// Total token count across all chunks.
    pub total_tokens: usize,
}

/// Counts abusive terms in one token sequence.
pub fn count_chunk(
    tokens: &[String],
    lexicon: &AbuseLexicon,
) -> (usize, usize, BTreeSet<String>) {
    let mut matched = BTreeSet::new();
    let mut occurrences = 0usize;
    for token in tokens {
        if let Some(term) = match_token(token, lexicon) {
            occurrences += 1;
            matched.insert(term.to_string());
        }
    }
    (matched.len(), occurrences, matched)
}

/// Profiles a chunked document: per-chunk counts plus song totals.
pub fn song_profile(doc: &LyricsDocument, lexicon: &AbuseLexicon) -> AbuseProfile {
    let mut per_chunk = Vec::with_capacity(doc.chunks.len());
    let mut union: BTreeSet<String> = BTreeSet::new();
    let mut song_occurrences = 0usize;
    let mut total_tokens = 0usize;

    for chunk in &doc.chunks {
        let (distinct, occurrences, matched) = count_chunk(&chunk.tokens, lexicon);
        song_occurrences += occurrences;
        total_tokens += chunk.tokens.len();
        union.extend(matched.iter().cloned());
        per_chunk.push(ChunkAbuse {
            chunk_id: chunk.chunk_id.clone(),
            distinct,
            occurrences,
            matched: matched.into_iter().collect(),
        });
    }

    AbuseProfile {
        song_id: doc.song_id.clone(),
        per_chunk,
        song_distinct: union.len(),
        song_occurrences,
        total_tokens,
    }
}

/// Default occurrence threshold for lexicon-based explicitness.
pub const DEFAULT_MIN_OCCURRENCES: usize = 1;

/// True when the song has at least `min_occurrences` abusive-token hits.
pub fn explicit_by_lexicon(profile: &AbuseProfile, min_occurrences: usize) -> bool {
    profile.song_occurrences >= min_occurrences
}
