//! English-versus-non-English screening for lyric text.
//!
//! Detection is a rank-free character-trigram model. Each [`LangProfile`]
//! stores `ln(count / total)` for every trigram observed in its training
//! corpus, plus one fallback log probability charged for unseen trigrams.
//! A chunk is scored by averaging trigram log-likelihood per window against
//! every profile; [`LangVerdict::margin`] is the English average minus the
//! best rival's average, in nats per trigram window.
//!
//! Long lyrics are packed into chunks of at most [`MAX_CHUNK_CHARS`]
//! characters on whitespace boundaries, and a song counts as English only
//! when every determinate chunk scores English ([`is_english_song`]).
//! Chunks too short to call are indeterminate and carry no vote, except
//! that a song with no determinate chunk at all is not kept.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum canonical length, in characters, for a determinate verdict.
pub const MIN_SCORABLE_CHARS: usize = 20;

/// Budget per scoring chunk, in characters.
pub const MAX_CHUNK_CHARS: usize = 5000;

/// Default decision margin in nats per trigram window: English must beat
/// the best rival by at least this much for a chunk to count as English.
pub const DEFAULT_MARGIN_THRESHOLD: f64 = 0.05;

/// Tag the English profile must carry in a [`ProfileSet`].
pub const ENGLISH_TAG: &str = "en";

/// Slack allowed when checking that stored probabilities exp-sum to one.
const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Errors from profile construction, validation, and chunk scoring.
#[derive(Debug, Error)]
pub enum LangIdError {
    /// Fewer than [`MIN_SCORABLE_CHARS`] characters survived
    /// canonicalization; the chunk is indeterminate rather than evidence
    /// either way.
    #[error("text too short to identify a language: {chars} usable characters (minimum {MIN_SCORABLE_CHARS})")]
    TextTooShort { chars: usize },
    /// The training corpus produced no trigram at all.
    #[error("corpus for `{language_tag}` is too small to build a profile")]
    CorpusTooSmall { language_tag: String },
    /// A profile with no stored trigrams can never score anything.
    #[error("profile `{language_tag}` stores no trigrams")]
    EmptyProfile { language_tag: String },
    /// Stored probabilities must exp-sum to at most one.
    #[error("profile `{language_tag}` is not normalized: stored probabilities sum to {sum}")]
    NotNormalized { language_tag: String, sum: f64 },
    /// The fallback must undercut every stored log probability, or unseen
    /// trigrams would outscore seen ones.
    #[error("profile `{language_tag}` fallback log probability {fallback} is not below the minimum stored value {min_stored}")]
    FallbackTooHigh {
        language_tag: String,
        fallback: f64,
        min_stored: f64,
    },
    /// Trigram keys are exactly three characters, spaces included.
    #[error("profile `{language_tag}` has malformed trigram key `{key}`")]
    BadTrigramKey { language_tag: String, key: String },
    /// A usable set needs a profile tagged [`ENGLISH_TAG`].
    #[error("profile set has no `{ENGLISH_TAG}` profile")]
    MissingEnglish,
    /// A usable set needs at least one non-English rival to score against.
    #[error("profile set has no rival profile to score English against")]
    NoRival,
    /// Two profiles with the same tag would make the winner ambiguous.
    #[error("duplicate profile tag `{language_tag}`")]
    DuplicateTag { language_tag: String },
    #[error("failed to read or write profile file")]
    Io(#[from] std::io::Error),
    #[error("failed to parse profile JSON")]
    Json(#[from] serde_json::Error),
}

/// Reduces text to the scoring alphabet: lowercase ASCII letters and digits
/// separated by single spaces. Accented Latin letters fold to their base
/// letter so one function serves both corpus building and chunk scoring;
/// every other character is dropped.
fn canonicalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for raw in text.chars() {
        for c in raw.to_lowercase() {
            match c {
                'a'..='z' | '0'..='9' => out.push(c),
                'á' | 'à' | 'â' | 'ä' | 'ã' | 'å' => out.push('a'),
                'é' | 'è' | 'ê' | 'ë' => out.push('e'),
                'í' | 'ì' | 'î' | 'ï' => out.push('i'),
                'ó' | 'ò' | 'ô' | 'ö' | 'õ' => out.push('o'),
                'ú' | 'ù' | 'û' | 'ü' => out.push('u'),
                'ñ' => out.push('n'),
                'ç' => out.push('c'),
                'ß' => out.push_str("ss"),
                'œ' => out.push_str("oe"),
                c if c.is_whitespace() => {
                    if !out.is_empty() && !out.ends_with(' ') {
                        out.push(' ');
                    }
                }
                _ => {}
            }
        }
    }
    while out.ends_with(' ') {
        out.pop();
    }
    out
}

/// Successive three-character windows of canonical text. Canonical text is
/// pure ASCII, so byte indexing is safe.
fn trigram_windows(canonical: &str) -> impl Iterator<Item = &str> {
    (0..canonical.len().saturating_sub(2)).map(move |i| &canonical[i..i + 3])
}

/// A character-trigram language model.
///
/// Invariants (checked by [`LangProfile::validate`]): stored probabilities
/// exp-sum to at most one, and the fallback is strictly below every stored
/// log probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LangProfile {
    /// Short lowercase tag, e.g. `en` or `es`.
    pub language_tag: String,
    /// `ln(count / total)` for every trigram observed in the corpus. Keys
    /// are exactly three characters from the canonical alphabet; spaces
    /// count as characters.
    pub trigram_log_probs: BTreeMap<String, f64>,
    /// Log probability charged for trigrams absent from the map.
    pub fallback_log_prob: f64,
}

impl LangProfile {
    /// Builds a profile from a plain-text corpus. Probabilities are raw
    /// relative frequencies; the fallback is `ln(0.5 / total)`, half the
    /// weight of a single observation, so it always undercuts stored
    /// values.
    ///
    /// # Errors
    ///
    /// [`LangIdError::CorpusTooSmall`] when the corpus canonicalizes to
    /// fewer than three characters.
    pub fn build(language_tag: &str, corpus: &str) -> Result<Self, LangIdError> {
        let canonical = canonicalize(corpus);
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for gram in trigram_windows(&canonical) {
            *counts.entry(gram).or_insert(0) += 1;
        }
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(LangIdError::CorpusTooSmall {
                language_tag: language_tag.to_string(),
            });
        }
        let total = total as f64;
        let trigram_log_probs = counts
            .into_iter()
            .map(|(gram, count)| (gram.to_string(), (count as f64 / total).ln()))
            .collect();
        let profile = LangProfile {
            language_tag: language_tag.to_string(),
            trigram_log_probs,
            fallback_log_prob: (0.5 / total).ln(),
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Checks the structural invariants; loaded files go through this
    /// before they are trusted.
    pub fn validate(&self) -> Result<(), LangIdError> {
        if self.trigram_log_probs.is_empty() {
            return Err(LangIdError::EmptyProfile {
                language_tag: self.language_tag.clone(),
            });
        }
        for key in self.trigram_log_probs.keys() {
            if key.chars().count() != 3 {
                return Err(LangIdError::BadTrigramKey {
                    language_tag: self.language_tag.clone(),
                    key: key.clone(),
                });
            }
        }
        let sum: f64 = self.trigram_log_probs.values().map(|lp| lp.exp()).sum();
        // The negated comparison also rejects NaN.
        if !(sum <= 1.0 + NORMALIZATION_TOLERANCE) {
            return Err(LangIdError::NotNormalized {
                language_tag: self.language_tag.clone(),
                sum,
            });
        }
        let min_stored = self
            .trigram_log_probs
            .values()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if !(self.fallback_log_prob < min_stored) {
            return Err(LangIdError::FallbackTooHigh {
                language_tag: self.language_tag.clone(),
                fallback: self.fallback_log_prob,
                min_stored,
            });
        }
        Ok(())
    }

    fn log_prob(&self, gram: &str) -> f64 {
        self.trigram_log_probs
            .get(gram)
            .copied()
            .unwrap_or(self.fallback_log_prob)
    }

    /// Mean log probability per trigram window of already-canonical text.
    fn mean_log_prob(&self, canonical: &str) -> f64 {
        let mut sum = 0.0;
        let mut windows = 0usize;
        for gram in trigram_windows(canonical) {
            sum += self.log_prob(gram);
            windows += 1;
        }
        sum / windows.max(1) as f64
    }

    /// Writes the profile as pretty-printed JSON.
    pub fn save(&self, path: &Path) -> Result<(), LangIdError> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json)?;
        Ok(())
    }

    /// Reads and validates a profile written by [`LangProfile::save`].
    pub fn load(path: &Path) -> Result<Self, LangIdError> {
        let raw = fs::read_to_string(path)?;
        let profile: LangProfile = serde_json::from_str(&raw)?;
        profile.validate()?;
        Ok(profile)
    }
}

/// A validated set of profiles: exactly one English profile plus at least
/// one rival. Immutable after construction, so scoring is pure and safe to
/// share across threads.
#[derive(Debug, Clone)]
pub struct ProfileSet {
    english: LangProfile,
    rivals: Vec<LangProfile>,
}

impl ProfileSet {
    /// Validates every profile and splits English from its rivals.
    ///
    /// # Errors
    ///
    /// Any per-profile validation error, plus
    /// [`LangIdError::MissingEnglish`], [`LangIdError::NoRival`], or
    /// [`LangIdError::DuplicateTag`] for structural problems.
    pub fn new(profiles: Vec<LangProfile>) -> Result<Self, LangIdError> {
        let mut english = None;
        let mut rivals = Vec::new();
        let mut seen = BTreeSet::new();
        for profile in profiles {
            profile.validate()?;
            if !seen.insert(profile.language_tag.clone()) {
                return Err(LangIdError::DuplicateTag {
                    language_tag: profile.language_tag,
                });
            }
            if profile.language_tag == ENGLISH_TAG {
                english = Some(profile);
            } else {
                rivals.push(profile);
            }
        }
        let english = english.ok_or(LangIdError::MissingEnglish)?;
        if rivals.is_empty() {
            return Err(LangIdError::NoRival);
        }
        Ok(ProfileSet { english, rivals })
    }

    pub fn english(&self) -> &LangProfile {
        &self.english
    }

    pub fn rivals(&self) -> &[LangProfile] {
        &self.rivals
    }
}

/// The profile set built from the small corpora embedded in the binary:
/// English plus Spanish, French, German, and romanized Korean rivals.
/// Built once and cached for the life of the process.
pub fn builtin_profiles() -> &'static ProfileSet {
    static BUILTIN: OnceLock<ProfileSet> = OnceLock::new();
    BUILTIN.get_or_init(|| {
        let corpora = [
            (ENGLISH_TAG, include_str!("../../../data/corpora/en.txt")),
            ("es", include_str!("../../../data/corpora/es.txt")),
            ("fr", include_str!("../../../data/corpora/fr.txt")),
            ("de", include_str!("../../../data/corpora/de.txt")),
            ("ko", include_str!("../../../data/corpora/ko_rom.txt")),
        ];
        let profiles = corpora
            .iter()
            .map(|(tag, corpus)| {
                LangProfile::build(tag, corpus).expect("embedded corpus builds a valid profile")
            })
            .collect();
        ProfileSet::new(profiles).expect("embedded profiles form a valid set")
    })
}

/// Outcome of scoring one chunk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangVerdict {
    /// True when English beat the best rival by at least the configured
    /// margin threshold.
    pub is_english: bool,
    /// English mean window log-likelihood minus the best rival's, in nats
    /// per trigram window. Always finite.
    pub margin: f64,
}

/// Scores one chunk against every profile in the set.
///
/// Intended for chunks of at most [`MAX_CHUNK_CHARS`] characters; longer
/// text is scored in full, and [`is_english_song`] is the entry point that
/// enforces the cap by chunking. Deterministic: the verdict depends only on
/// the chunk text, the profiles, and the threshold.
///
/// # Errors
///
/// [`LangIdError::TextTooShort`] when fewer than [`MIN_SCORABLE_CHARS`]
/// characters survive canonicalization.
pub fn score_chunk(
    text: &str,
    profiles: &ProfileSet,
    margin_threshold: f64,
) -> Result<LangVerdict, LangIdError> {
    let canonical = canonicalize(text);
    let chars = canonical.chars().count();
    if chars < MIN_SCORABLE_CHARS {
        return Err(LangIdError::TextTooShort { chars });
    }
    let english_avg = profiles.english().mean_log_prob(&canonical);
    let best_rival = profiles
        .rivals()
        .iter()
        .map(|p| p.mean_log_prob(&canonical))
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = english_avg - best_rival;
    Ok(LangVerdict {
        is_english: margin >= margin_threshold,
        margin,
    })
}

/// Packs whitespace-delimited tokens greedily into chunks of at most
/// `max_chars` characters, never splitting a token. A single token longer
/// than the budget becomes its own oversized chunk: token integrity wins
/// over the budget.
pub fn chunk_for_scoring(text: &str, max_chars: usize) -> Vec<String> {
    let mut chunks = Vec::new();
    let mut current = String::new();
    let mut current_chars = 0usize;
    for token in text.split_whitespace() {
        let token_chars = token.chars().count();
        let added = if current.is_empty() {
            token_chars
        } else {
            token_chars + 1
        };
        if !current.is_empty() && current_chars + added > max_chars {
            chunks.push(std::mem::take(&mut current));
            current_chars = 0;
        }
        if current.is_empty() {
            current.push_str(token);
            current_chars = token_chars;
        } else {
            current.push(' ');
            current.push_str(token);
            current_chars += added;
        }
    }
    if !current.is_empty() {
        chunks.push(current);
    }
    chunks
}

/// True iff every determinate chunk of the lyrics scores English.
///
/// Lyrics are packed into chunks of at most [`MAX_CHUNK_CHARS`] characters
/// on whitespace boundaries. Chunks too short to call are indeterminate and
/// carry no vote; a song whose every chunk is indeterminate (or that has no
/// chunks at all) returns false.
///
/// # Examples
///
/// ```
/// use chartlex::langid::{builtin_profiles, is_english_song, DEFAULT_MARGIN_THRESHOLD};
///
/// let profiles = builtin_profiles();
/// assert!(is_english_song(
///     "the quick brown fox jumps over the lazy dog and keeps on running home",
///     profiles,
///     DEFAULT_MARGIN_THRESHOLD,
/// ));
/// assert!(!is_english_song("", profiles, DEFAULT_MARGIN_THRESHOLD));
/// ```
pub fn is_english_song(lyrics: &str, profiles: &ProfileSet, margin_threshold: f64) -> bool {
    let mut determinate = 0usize;
    for chunk in chunk_for_scoring(lyrics, MAX_CHUNK_CHARS) {
        match score_chunk(&chunk, profiles, margin_threshold) {
            Ok(verdict) => {
                if !verdict.is_english {
                    return false;
                }
                determinate += 1;
            }
            // A validated profile set only ever raises TextTooShort here;
            // such chunks are indeterminate and carry no vote.
            Err(_) => {}
        }
    }
    determinate > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set() -> &'static ProfileSet {
        builtin_profiles()
    }

    #[test]
    fn english_text_scores_english() {
        let verdict = score_chunk(
            "the quick brown fox jumps over the lazy dog and keeps on running home",
            set(),
            DEFAULT_MARGIN_THRESHOLD,
        )
        .unwrap();
        assert!(verdict.is_english);
        assert!(verdict.margin >= DEFAULT_MARGIN_THRESHOLD);
        assert!(verdict.margin.is_finite());
    }

    #[test]
    fn held_out_english_sentences_score_english() {
        let samples = [
            "nobody told me the road would bend this far from home but i kept walking anyway",
            "she sings every morning while the coffee brews and the radio hums an old familiar tune",
            "we were young and loud and certain that the summer would never have to end",
        ];
        for sample in samples {
            let verdict = score_chunk(sample, set(), DEFAULT_MARGIN_THRESHOLD).unwrap();
            assert!(verdict.is_english, "expected English for: {sample}");
        }
    }

    #[test]
    fn spanish_text_scores_non_english_with_negative_margin() {
        let verdict = score_chunk(
            "despacito quiero respirar tu cuello despacito deja que te diga cosas al oído",
            set(),
            DEFAULT_MARGIN_THRESHOLD,
        )
        .unwrap();
        assert!(!verdict.is_english);
        // The sign is the contract; the magnitude depends on the corpora.
        assert!(verdict.margin < 0.0);
    }

    #[test]
    fn held_out_rival_sentences_score_non_english() {
        let samples = [
            // Spanish
            "cuando llegue la noche vamos a bailar juntos hasta que salga el sol sobre la ciudad",
            // French
            "nous avons marché toute la nuit sous la pluie en parlant de tout ce que nous allions devenir",
            // German
            "wir fuhren am frühen morgen über die alte brücke und sahen den nebel über dem fluss",
            // Romanized Korean
            "oneul bam neoui nunbit soge nae mameul jeonhago sipeo saranghae uri hamkke isseo",
        ];
        for sample in samples {
            let verdict = score_chunk(sample, set(), DEFAULT_MARGIN_THRESHOLD).unwrap();
            assert!(!verdict.is_english, "expected non-English for: {sample}");
        }
    }

    #[test]
    fn short_text_is_undetermined() {
        match score_chunk("ten chars!", set(), DEFAULT_MARGIN_THRESHOLD) {
            Err(LangIdError::TextTooShort { chars }) => assert_eq!(chars, 9),
            other => panic!("expected TextTooShort, got {other:?}"),
        }
    }

    #[test]
    fn minimum_length_boundary_is_exact() {
        // 19 canonical characters: indeterminate.
        let nineteen = "abcde fghij klmno p";
        assert_eq!(nineteen.chars().count(), 19);
        assert!(matches!(
            score_chunk(nineteen, set(), DEFAULT_MARGIN_THRESHOLD),
            Err(LangIdError::TextTooShort { chars: 19 })
        ));
        // 20 canonical characters: determinate.
        let twenty = "abcde fghij klmno pq";
        assert_eq!(twenty.chars().count(), 20);
        assert!(score_chunk(twenty, set(), DEFAULT_MARGIN_THRESHOLD).is_ok());
    }

    #[test]
    fn punctuation_and_case_do_not_count_toward_length() {
        // Canonicalizes to "la la la" (8 characters): indeterminate.
        let result = score_chunk("La!! La!! La!!...", set(), DEFAULT_MARGIN_THRESHOLD);
        assert!(matches!(
            result,
            Err(LangIdError::TextTooShort { chars: 8 })
        ));
    }

    #[test]
    fn chunk_packing_is_greedy_and_budget_bounded() {
        // 1200 nine-character tokens: 500 fit in 4999 characters, so the
        // packing is 500 + 500 + 200.
        let text = vec!["abcdefghi"; 1200].join(" ");
        let chunks = chunk_for_scoring(&text, MAX_CHUNK_CHARS);
        assert_eq!(chunks.len(), 3);
        assert_eq!(chunks[0].chars().count(), 4999);
        assert_eq!(chunks[1].chars().count(), 4999);
        assert_eq!(chunks[2].chars().count(), 1999);
        let rejoined = chunks.join(" ");
        assert_eq!(rejoined, text);
    }

    #[test]
    fn oversized_token_is_kept_whole() {
        let long_token = "x".repeat(6000);
        let text = format!("start {long_token} end");
        let chunks = chunk_for_scoring(&text, MAX_CHUNK_CHARS);
        assert_eq!(chunks, vec!["start".to_string(), long_token, "end".to_string()]);
    }

    #[test]
    fn long_english_lyric_spans_three_chunks_and_stays_english() {
        let sentence = "i walked along the river in the evening light and sang the song my mother used to sing";
        let mut lyric = String::new();
        while lyric.chars().count() < 12_000 {
            if !lyric.is_empty() {
                lyric.push(' ');
            }
            lyric.push_str(sentence);
        }
        let chunks = chunk_for_scoring(&lyric, MAX_CHUNK_CHARS);
        assert_eq!(chunks.len(), 3);
        for chunk in &chunks {
            assert!(chunk.chars().count() <= MAX_CHUNK_CHARS);
        }
        assert!(is_english_song(&lyric, set(), DEFAULT_MARGIN_THRESHOLD));
    }

    #[test]
    fn mixed_language_single_chunk_song_is_rejected() {
        // One chunk, roughly half English and half Spanish: the Spanish
        // half drags the margin below the threshold.
        let english = "i remember the summer nights when we drove down to the water and talked until morning";
        let spanish = "recuerdo las noches de verano cuando bajábamos al agua y hablábamos hasta la madrugada";
        let lyric = format!("{english} {spanish}");
        assert!(lyric.chars().count() <= MAX_CHUNK_CHARS);
        assert!(!is_english_song(&lyric, set(), DEFAULT_MARGIN_THRESHOLD));
    }

    #[test]
    fn mixed_language_multi_chunk_song_is_rejected() {
        let english_line = "we sang together in the kitchen while the rain kept falling on the roof";
        let korean_line = "neoui nunbit soge bichin nae maeum saranghae oneul bam hamkke chumeul chueo";
        let mut english_part = String::new();
        while english_part.chars().count() < 6000 {
            english_part.push_str(english_line);
            english_part.push(' ');
        }
        let mut korean_part = String::new();
        while korean_part.chars().count() < 6000 {
            korean_part.push_str(korean_line);
            korean_part.push(' ');
        }
        let lyric = format!("{english_part}{korean_part}");
        let chunks = chunk_for_scoring(&lyric, MAX_CHUNK_CHARS);
        assert!(chunks.len() >= 2);
        assert!(!is_english_song(&lyric, set(), DEFAULT_MARGIN_THRESHOLD));
    }

    #[test]
    fn empty_and_indeterminate_only_lyrics_are_rejected() {
        assert!(!is_english_song("", set(), DEFAULT_MARGIN_THRESHOLD));
        assert!(!is_english_song("la la la", set(), DEFAULT_MARGIN_THRESHOLD));
        assert!(!is_english_song("   \n\t  ", set(), DEFAULT_MARGIN_THRESHOLD));
    }

    #[test]
    fn song_verdict_is_conjunction_over_determinate_chunks() {
        let texts = [
            "the quick brown fox jumps over the lazy dog and keeps on running home",
            "despacito quiero respirar tu cuello despacito deja que te diga cosas al oído",
            "la la",
            "we sang all night long under the stars la la la and nothing else mattered to us",
        ];
        for text in texts {
            let chunks = chunk_for_scoring(text, MAX_CHUNK_CHARS);
            let mut determinate = 0usize;
            let mut all_english = true;
            for chunk in &chunks {
                if let Ok(verdict) = score_chunk(chunk, set(), DEFAULT_MARGIN_THRESHOLD) {
                    determinate += 1;
                    all_english &= verdict.is_english;
                }
            }
            let expected = determinate > 0 && all_english;
            assert_eq!(
                is_english_song(text, set(), DEFAULT_MARGIN_THRESHOLD),
                expected,
                "conjunction mismatch for: {text}"
            );
        }
    }

    #[test]
    fn builtin_profiles_satisfy_invariants() {
        let profiles = set();
        assert_eq!(profiles.english().language_tag, ENGLISH_TAG);
        assert_eq!(profiles.rivals().len(), 4);
        for profile in std::iter::once(profiles.english()).chain(profiles.rivals()) {
            profile.validate().unwrap();
            let sum: f64 = profile.trigram_log_probs.values().map(|lp| lp.exp()).sum();
            assert!(sum <= 1.0 + NORMALIZATION_TOLERANCE);
            let min_stored = profile
                .trigram_log_probs
                .values()
                .copied()
                .fold(f64::INFINITY, f64::min);
            assert!(profile.fallback_log_prob < min_stored);
        }
    }

    #[test]
    fn profile_build_save_load_round_trip() {
        let profile = LangProfile::build(
            "tiny",
            "the cat sat on the mat and the dog lay by the door",
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tiny.json");
        profile.save(&path).unwrap();
        let loaded = LangProfile::load(&path).unwrap();
        assert_eq!(profile, loaded);
    }

    #[test]
    fn profile_set_requires_english_and_a_rival() {
        let en = LangProfile::build(ENGLISH_TAG, "the cat sat on the mat by the door").unwrap();
        let es = LangProfile::build("es", "el gato se sentó en la alfombra junto a la puerta").unwrap();
        assert!(matches!(
            ProfileSet::new(vec![es.clone()]),
            Err(LangIdError::MissingEnglish)
        ));
        assert!(matches!(
            ProfileSet::new(vec![en.clone()]),
            Err(LangIdError::NoRival)
        ));
        assert!(matches!(
            ProfileSet::new(vec![en.clone(), es.clone(), es.clone()]),
            Err(LangIdError::DuplicateTag { .. })
        ));
        assert!(ProfileSet::new(vec![en, es]).is_ok());
    }

    #[test]
    fn validation_rejects_malformed_profiles() {
        let empty = LangProfile {
            language_tag: "xx".into(),
            trigram_log_probs: BTreeMap::new(),
            fallback_log_prob: -10.0,
        };
        assert!(matches!(
            empty.validate(),
            Err(LangIdError::EmptyProfile { .. })
        ));

        let mut over = BTreeMap::new();
        over.insert("abc".to_string(), 0.9_f64.ln());
        over.insert("bcd".to_string(), 0.9_f64.ln());
        let unnormalized = LangProfile {
            language_tag: "xx".into(),
            trigram_log_probs: over,
            fallback_log_prob: -10.0,
        };
        assert!(matches!(
            unnormalized.validate(),
            Err(LangIdError::NotNormalized { .. })
        ));

        let mut ok_map = BTreeMap::new();
        ok_map.insert("abc".to_string(), 0.5_f64.ln());
        let high_fallback = LangProfile {
            language_tag: "xx".into(),
            trigram_log_probs: ok_map.clone(),
            fallback_log_prob: 0.0,
        };
        assert!(matches!(
            high_fallback.validate(),
            Err(LangIdError::FallbackTooHigh { .. })
        ));

        let mut bad_key = BTreeMap::new();
        bad_key.insert("ab".to_string(), 0.5_f64.ln());
        let malformed = LangProfile {
            language_tag: "xx".into(),
            trigram_log_probs: bad_key,
            fallback_log_prob: -10.0,
        };
        assert!(matches!(
            malformed.validate(),
            Err(LangIdError::BadTrigramKey { .. })
        ));
    }

    #[test]
    fn corpus_without_a_full_trigram_is_rejected() {
        assert!(matches!(
            LangProfile::build("xx", "ab"),
            Err(LangIdError::CorpusTooSmall { .. })
        ));
        // Exactly one window is enough.
        assert!(LangProfile::build("xx", "abc").is_ok());
    }

    #[test]
    fn canonical_form_folds_accents_case_and_punctuation() {
        let profile = LangProfile::build("xx", "¡Al oído, señor! Don't… (stop)").unwrap();
        // The canonical text behind the counts is "al oido senor dont stop";
        // apostrophes vanish rather than splitting the token.
        assert!(profile.trigram_log_probs.contains_key("ido"));
        assert!(profile.trigram_log_probs.contains_key("don"));
        assert!(profile.trigram_log_probs.contains_key("ont"));
        assert!(!profile.trigram_log_probs.keys().any(|k| k.contains('\'')));
        assert!(!profile.trigram_log_probs.keys().any(|k| k.contains('í')));
    }

    proptest! {
        // Packing never drops, reorders, or splits tokens, and only a
        // single oversized token may exceed the budget.
        #[test]
        fn packing_preserves_tokens(text in "[a-z ]{0,200}", max in 4usize..50) {
            let chunks = chunk_for_scoring(&text, max);
            let original: Vec<&str> = text.split_whitespace().collect();
            let packed: Vec<&str> = chunks
                .iter()
                .flat_map(|c| c.split_whitespace())
                .collect();
            prop_assert_eq!(original, packed);
            for chunk in &chunks {
                if chunk.chars().count() > max {
                    prop_assert!(!chunk.contains(' '));
                }
            }
        }

        // Scoring is a pure function of its inputs.
        #[test]
        fn scoring_is_deterministic(text in "[a-z ]{20,80}") {
            let first = score_chunk(&text, set(), DEFAULT_MARGIN_THRESHOLD);
            let second = score_chunk(&text, set(), DEFAULT_MARGIN_THRESHOLD);
            match (first, second) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(a.is_english, b.is_english);
                    prop_assert_eq!(a.margin.to_bits(), b.margin.to_bits());
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "verdicts disagree"),
            }
        }
    }
}
