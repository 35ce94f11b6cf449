//! Normalization of song titles, artist credits, genre labels, and lyric text.
//!
//! Chart rows and lyric providers disagree about how the same song is written:
//! medley titles carry a `/`-separated tail, remix and version notes ride in
//! parentheses, and artist credits use a zoo of collaboration tags
//! (`Featuring`, `Feat.`, `x`, `Duet With`, ...). Everything downstream keys
//! on the cleaned forms, so the rules here are deliberately small and
//! idempotent: running any normalizer on its own output is a no-op.
//!
//! Text standardization (lowercasing, contraction expansion, punctuation
//! stripping) lives here too because tokenizers, the abuse lexicon, and the
//! classifier all consume the same standardized form. The contraction table
//! ships as a data file so the expansion rules can grow without a recompile.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

/// Errors produced by the normalizers and their data-file loaders.
#[derive(Debug, Error)]
pub enum NormalizeError {
    /// The input was empty or whitespace-only before any rule ran.
    #[error("input is empty")]
    EmptyInput,
    /// Every character of the title was removed by the cleanup rules.
    #[error("title {0:?} is empty after normalization")]
    EmptyAfterNormalization(String),
    /// A genre map entry points at a label that is not a primary genre.
    #[error("genre map value {value:?} for key {key:?} is not a primary genre")]
    BadGenreValue { key: String, value: String },
    /// A data file could not be read.
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// A data file could not be parsed as JSON.
    #[error("failed to parse {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Cleans a chart title down to the form used for identity and lookup.
///
/// Rules, applied in order:
/// 1. cut the title at the first `/` (medleys keep only the lead song),
/// 2. remove every balanced `(...)` group, including nested groups,
/// 3. collapse whitespace runs to single spaces and trim the ends.
///
/// Case is preserved; display code decides its own casing. Unbalanced
/// parentheses are kept as literal characters rather than guessed at.
///
/// # Examples
///
/// ```
/// use chartlex::normalize::normalize_title;
///
/// assert_eq!(normalize_title("Never Too Far/Hero Medley").unwrap(), "Never Too Far");
/// assert_eq!(
///     normalize_title("The Cup Of Life (The Official Song Of The World Cup, France '98)").unwrap(),
///     "The Cup Of Life",
/// );
/// ```
pub fn normalize_title(raw: &str) -> Result<String, NormalizeError> {
    if raw.trim().is_empty() {
        return Err(NormalizeError::EmptyInput);
    }
    let head = match raw.find('/') {
        Some(pos) => &raw[..pos],
        None => raw,
    };
    let stripped = remove_balanced_parens(head);
    let collapsed = collapse_whitespace(&stripped);
    if collapsed.is_empty() {
        return Err(NormalizeError::EmptyAfterNormalization(raw.to_string()));
    }
    Ok(collapsed)
}

/// Removes every balanced `(...)` group from `text`, nested groups included.
///
/// Unbalanced parentheses survive untouched: a lone `(` or `)` is treated as
/// an ordinary character, never as the start of a group that silently eats
/// the rest of the string.
fn remove_balanced_parens(text: &str) -> String {
    // First pass: pair up parenthesis byte offsets so unbalanced ones can be
    // told apart from group delimiters.
    let mut stack = Vec::new();
    let mut spans = Vec::new();
    for (idx, ch) in text.char_indices() {
        match ch {
            '(' => stack.push(idx),
            ')' => {
                if let Some(start) = stack.pop() {
                    spans.push((start, idx + 1));
                }
            }
            _ => {}
        }
    }
    if spans.is_empty() {
        return text.to_string();
    }
    // Keep only outermost spans; inner spans are covered by their parents.
    spans.sort_unstable();
    let mut keep_from = 0;
    let mut out = String::with_capacity(text.len());
    for (start, end) in spans {
        if start >= keep_from {
            out.push_str(&text[keep_from..start]);
            keep_from = end;
        }
    }
    out.push_str(&text[keep_from..]);
    out
}

/// Collapses whitespace runs to single ASCII spaces and trims the ends.
fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// How a raw artist credit was split into a primary artist and collaborators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtistParse {
    /// The artist credited first, with collaboration tags removed.
    pub primary: String,
    /// Collaborators in credit order, deduplicated case-insensitively.
    pub featured: Vec<String>,
    /// The first collaboration tag matched in the raw credit, verbatim.
    /// Empty when the credit named a single artist.
    pub joiner_raw: String,
}

impl ArtistParse {
    /// Renders the parse back to a canonical credit string.
    ///
    /// All collaboration tags collapse to `Featuring`; collaborators are
    /// joined with `, `. Parsing the rendered form reproduces the same
    /// primary and featured list.
    pub fn render(&self) -> String {
        if self.featured.is_empty() {
            self.primary.clone()
        } else {
            format!("{} Featuring {}", self.primary, self.featured.join(", "))
        }
    }
}

/// Options for [`normalize_artist`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtistOptions {
    /// Treat a standalone `&` as a collaboration tag. Off by default because
    /// `&` is part of many band names (`Hall & Oates`).
    pub ampersand_joins: bool,
}

impl Default for ArtistOptions {
    fn default() -> Self {
        ArtistOptions {
            ampersand_joins: false,
        }
    }
}

/// One recognized collaboration tag occurrence inside a token stream.
struct TagHit {
    /// Index of the first token of the tag.
    token_index: usize,
    /// Number of tokens the tag spans (`Duet With` spans two).
    token_len: usize,
    /// The tag as it appeared, verbatim.
    raw: String,
}

/// Splits a raw artist credit into primary artist and featured collaborators.
///
/// Recognized tags (case-insensitive, at token boundaries): `Featuring`,
/// `Feat.`, `Feat`, `Ft.`, `Ft`, `With`, `Duet With`, a standalone `x`
/// between two non-empty sides, and `&` when [`ArtistOptions::ampersand_joins`]
/// is set. Parenthesized collaboration credits are folded into the featured
/// list, so `Anita Cochran (Duet With Steve Wariner)` and
/// `Anita Cochran Duet With Steve Wariner` parse identically.
///
/// # Examples
///
/// ```
/// use chartlex::normalize::{normalize_artist, ArtistOptions};
///
/// let p = normalize_artist("G-Eazy x Bebe Rexha", ArtistOptions::default()).unwrap();
/// assert_eq!(p.primary, "G-Eazy");
/// assert_eq!(p.featured, vec!["Bebe Rexha"]);
///
/// let p = normalize_artist("Chris Brown Feat. Ludacris", ArtistOptions::default()).unwrap();
/// assert_eq!(p.render(), "Chris Brown Featuring Ludacris");
/// ```
pub fn normalize_artist(raw: &str, options: ArtistOptions) -> Result<ArtistParse, NormalizeError> {
    if raw.trim().is_empty() {
        return Err(NormalizeError::EmptyInput);
    }

    // Fold parenthesized credit groups into the trailing text so one splitting
    // pass handles both `A (Feat. B)` and `A Feat. B`. The group content
    // contributes collaborators only, never a primary.
    let mut outside = String::new();
    let mut groups = Vec::new();
    let mut depth = 0usize;
    let mut group_start = 0usize;
    for (idx, ch) in raw.char_indices() {
        match ch {
            '(' => {
                if depth == 0 {
                    group_start = idx + ch.len_utf8();
                }
                depth += 1;
            }
            ')' => {
                if depth > 0 {
                    depth -= 1;
                    if depth == 0 {
                        groups.push(raw[group_start..idx].to_string());
                    }
                } else {
                    outside.push(ch);
                }
            }
            _ => {
                if depth == 0 {
                    outside.push(ch);
                }
            }
        }
    }
    if depth > 0 {
        // Unbalanced open parenthesis: treat the tail as an ordinary group.
        groups.push(raw[group_start..].to_string());
    }

    let (primary, mut featured, mut joiner_raw) = split_credit(&outside, options, true);
    for group in &groups {
        let (_, mut names, group_joiner) = split_credit(group, options, false);
        featured.append(&mut names);
        if joiner_raw.is_empty() {
            joiner_raw = group_joiner;
        }
    }

    if primary.is_empty() {
        return Err(NormalizeError::EmptyAfterNormalization(raw.to_string()));
    }

    // Deduplicate collaborators case-insensitively, keeping first spelling.
    let mut seen = Vec::new();
    let mut distinct = Vec::new();
    for name in featured {
        let key = name.to_lowercase();
        if !seen.contains(&key) {
            seen.push(key);
            distinct.push(name);
        }
    }

    Ok(ArtistParse {
        primary,
        featured: distinct,
        joiner_raw,
    })
}

/// Splits one credit fragment on collaboration tags and commas.
///
/// Returns `(head, names, first_tag_raw)`. For the top-level credit
/// (`head_is_primary`) the head is the primary artist and is never
/// comma-split, so names like `Earth, Wind & Fire` survive intact. For a
/// parenthesized group the head slot stays empty: a leading tag is allowed
/// (`Duet With Steve Wariner`) and every piece, comma-split, is a
/// collaborator name.
fn split_credit(
    fragment: &str,
    options: ArtistOptions,
    head_is_primary: bool,
) -> (String, Vec<String>, String) {
    let tokens: Vec<&str> = fragment.split_whitespace().collect();
    let hits = find_tag_hits(&tokens, options, head_is_primary);

    let mut joiner_raw = String::new();
    let mut segments = Vec::new();
    let mut cursor = 0usize;
    for hit in &hits {
        if joiner_raw.is_empty() {
            joiner_raw = hit.raw.clone();
        }
        segments.push(tokens[cursor..hit.token_index].join(" "));
        cursor = hit.token_index + hit.token_len;
    }
    segments.push(tokens[cursor..].join(" "));

    let mut names = Vec::new();
    let head = if head_is_primary {
        for segment in segments.iter().skip(1) {
            push_comma_names(segment, &mut names);
        }
        collapse_whitespace(&segments[0])
    } else {
        for segment in &segments {
            push_comma_names(segment, &mut names);
        }
        String::new()
    };
    (head, names, joiner_raw)
}

/// Appends the comma-separated names inside `segment` to `names`.
fn push_comma_names(segment: &str, names: &mut Vec<String>) {
    for part in segment.split(',') {
        let name = collapse_whitespace(part);
        if !name.is_empty() {
            names.push(name);
        }
    }
}

/// Finds collaboration tag occurrences in `tokens`, left to right.
///
/// `head_required` forbids a tag at token 0 so the primary artist is never
/// empty for top-level credits.
fn find_tag_hits(tokens: &[&str], options: ArtistOptions, head_required: bool) -> Vec<TagHit> {
    let mut hits: Vec<TagHit> = Vec::new();
    let mut i = 0usize;
    while i < tokens.len() {
        // A tag at token 0 would leave the primary artist empty; group
        // credits may open with one (`(Duet With ...)`).
        let left_ok = i > 0 || !head_required;
        let lower = tokens[i].to_lowercase();
        // Trailing commas stick to tokens (`Feat. A, B`); match the bare word.
        let word = lower.trim_end_matches(',');
        let hit = if left_ok {
            if word == "duet" && tokens.get(i + 1).map(|t| t.eq_ignore_ascii_case("with")) == Some(true) {
                Some((2, format!("{} {}", tokens[i], tokens[i + 1])))
            } else if matches!(word, "featuring" | "feat." | "feat" | "ft." | "ft" | "with") {
                Some((1, tokens[i].to_string()))
            } else if word == "x" && i > 0 && i + 1 < tokens.len() {
                Some((1, tokens[i].to_string()))
            } else if word == "&" && options.ampersand_joins && i > 0 && i + 1 < tokens.len() {
                Some((1, tokens[i].to_string()))
            } else {
                None
            }
        } else {
            None
        };
        match hit {
            Some((len, raw)) => {
                hits.push(TagHit {
                    token_index: i,
                    token_len: len,
                    raw,
                });
                i += len;
            }
            None => i += 1,
        }
    }
    hits
}

/// The primary genres every provider label collapses into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimaryGenre {
    Pop,
    HipHop,
    Country,
    Rock,
    RnB,
    Electronic,
    /// A provider labeled the song, but no mapping rule claimed the label.
    Other,
    /// No provider supplied any genre label at all.
    Unknown,
}

impl PrimaryGenre {
    /// All variants in display order.
    pub const ALL: [PrimaryGenre; 8] = [
        PrimaryGenre::Pop,
        PrimaryGenre::HipHop,
        PrimaryGenre::Country,
        PrimaryGenre::Rock,
        PrimaryGenre::RnB,
        PrimaryGenre::Electronic,
        PrimaryGenre::Other,
        PrimaryGenre::Unknown,
    ];

    /// The canonical lowercase display name.
    pub fn name(self) -> &'static str {
        match self {
            PrimaryGenre::Pop => "pop",
            PrimaryGenre::HipHop => "hip hop",
            PrimaryGenre::Country => "country",
            PrimaryGenre::Rock => "rock",
            PrimaryGenre::RnB => "r&b",
            PrimaryGenre::Electronic => "electronic",
            PrimaryGenre::Other => "other",
            PrimaryGenre::Unknown => "unknown",
        }
    }
}

impl fmt::Display for PrimaryGenre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrimaryGenre {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        for genre in PrimaryGenre::ALL {
            if genre.name() == s {
                return Ok(genre);
            }
        }
        Err(format!("{s:?} is not a primary genre"))
    }
}

impl Serialize for PrimaryGenre {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for PrimaryGenre {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Mapping from provider sub-genre labels to primary genres.
///
/// Loaded from a JSON object of `"sub-genre": "primary"` pairs. Keys are
/// matched after lowercasing and trimming. The map may not target `unknown`:
/// that variant is reserved for songs no provider labeled at all.
#[derive(Debug, Clone)]
pub struct GenreMap {
    mapping: BTreeMap<String, PrimaryGenre>,
}

impl GenreMap {
    /// The mapping shipped with the crate.
    pub fn builtin() -> GenreMap {
        GenreMap::from_json("builtin genre map", include_str!("../../../data/genre_map.json"))
            .expect("builtin genre map is valid")
    }

    /// Loads a mapping from a JSON file.
    pub fn load(path: &Path) -> Result<GenreMap, NormalizeError> {
        let text = std::fs::read_to_string(path).map_err(|source| NormalizeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        GenreMap::from_json(&path.display().to_string(), &text)
    }

    fn from_json(origin: &str, text: &str) -> Result<GenreMap, NormalizeError> {
        let raw: BTreeMap<String, String> =
            serde_json::from_str(text).map_err(|source| NormalizeError::Json {
                path: origin.to_string(),
                source,
            })?;
        let mut mapping = BTreeMap::new();
        for (key, value) in raw {
            let genre: PrimaryGenre =
                value
                    .parse()
                    .map_err(|_| NormalizeError::BadGenreValue {
                        key: key.clone(),
                        value: value.clone(),
                    })?;
            if genre == PrimaryGenre::Unknown {
                return Err(NormalizeError::BadGenreValue { key, value });
            }
            mapping.insert(key.trim().to_lowercase(), genre);
        }
        Ok(GenreMap { mapping })
    }

    /// Maps one provider label to its primary genre.
    ///
    /// Labels the map does not know collapse to [`PrimaryGenre::Other`].
    pub fn map(&self, raw_label: &str) -> PrimaryGenre {
        let key = raw_label.trim().to_lowercase();
        self.mapping.get(&key).copied().unwrap_or(PrimaryGenre::Other)
    }

    /// Number of sub-genre entries in the map.
    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    /// True when the map has no entries.
    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }
}

/// Contraction expansion rules, loaded from a JSON data file.
///
/// The file is a single JSON object. Keys that start with an apostrophe,
/// plus the literal key `n't`, are suffix rules: a token ending in the key
/// expands to the remaining stem followed by the value (an empty value drops
/// the suffix, which is how possessive `'s` is erased). Every other key is an
/// exact token match. Exact matches win over suffix rules.
#[derive(Debug, Clone)]
pub struct ContractionTable {
    exact: BTreeMap<String, String>,
    /// Suffix rules ordered longest-first so `n't` beats `'s`-style overlaps.
    suffixes: Vec<(String, String)>,
}

impl ContractionTable {
    /// The table shipped with the crate.
    pub fn builtin() -> ContractionTable {
        ContractionTable::from_json(
            "builtin contraction table",
            include_str!("../../../data/contractions.json"),
        )
        .expect("builtin contraction table is valid")
    }

    /// Loads a table from a JSON file.
    pub fn load(path: &Path) -> Result<ContractionTable, NormalizeError> {
        let text = std::fs::read_to_string(path).map_err(|source| NormalizeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ContractionTable::from_json(&path.display().to_string(), &text)
    }

    fn from_json(origin: &str, text: &str) -> Result<ContractionTable, NormalizeError> {
        let raw: BTreeMap<String, String> =
            serde_json::from_str(text).map_err(|source| NormalizeError::Json {
                path: origin.to_string(),
                source,
            })?;
        let mut exact = BTreeMap::new();
        let mut suffixes = Vec::new();
        for (key, value) in raw {
            if key.starts_with('\'') || key == "n't" {
                suffixes.push((key, value));
            } else {
                exact.insert(key, value);
            }
        }
        suffixes.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        Ok(ContractionTable { exact, suffixes })
    }

    /// Expands one lowercase token, or returns it unchanged.
    fn expand(&self, token: &str) -> String {
        if let Some(expansion) = self.exact.get(token) {
            return expansion.clone();
        }
        for (suffix, replacement) in &self.suffixes {
            if token.len() > suffix.len() && token.ends_with(suffix.as_str()) {
                let stem = &token[..token.len() - suffix.len()];
                return format!("{stem}{replacement}");
            }
        }
        token.to_string()
    }
}

/// Standardizes lyric text for tokenization, matching, and classification.
///
/// Applied in order: lowercase, expand contractions, strip every character
/// outside lowercase ASCII letters, digits, whitespace, and `*`, then
/// collapse whitespace. The asterisk survives so censored spellings like
/// `bi*ch` stay matchable. Curly apostrophes are treated as straight ones.
/// The function is idempotent.
///
/// # Examples
///
/// ```
/// use chartlex::normalize::{standardize_text, ContractionTable};
///
/// let table = ContractionTable::builtin();
/// assert_eq!(standardize_text("I'm lying to myself.", &table), "i am lying to myself");
/// assert_eq!(standardize_text("Don't STOP!!", &table), "do not stop");
/// ```
pub fn standardize_text(raw: &str, table: &ContractionTable) -> String {
    let mut words = Vec::new();
    for raw_token in raw.split_whitespace() {
        let lowered: String = raw_token
            .chars()
            .flat_map(char::to_lowercase)
            .map(|c| if c == '\u{2019}' { '\'' } else { c })
            .collect();
        // Keep apostrophes through the contraction lookup, drop everything
        // else that cannot appear in standardized output.
        let kept: String = lowered
            .chars()
            .filter(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || *c == '\'' || *c == '*')
            .collect();
        if kept.is_empty() {
            continue;
        }
        let expanded = table.expand(&kept);
        for word in expanded.split_whitespace() {
            let cleaned: String = word
                .chars()
                .filter(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || *c == '*')
                .collect();
            if !cleaned.is_empty() {
                words.push(cleaned);
            }
        }
    }
    words.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn title_cuts_medley_tail() {
        assert_eq!(
            normalize_title("Never Too Far/Hero Medley").unwrap(),
            "Never Too Far"
        );
    }

    #[test]
    fn title_removes_parenthetical() {
        assert_eq!(
            normalize_title("The Cup Of Life (The Official Song Of The World Cup, France '98)")
                .unwrap(),
            "The Cup Of Life"
        );
    }

    #[test]
    fn title_removes_nested_groups_and_collapses_whitespace() {
        assert_eq!(
            normalize_title("Song  (one (two) three)   Name").unwrap(),
            "Song Name"
        );
    }

    #[test]
    fn title_keeps_unbalanced_parens() {
        assert_eq!(normalize_title("Smile :(").unwrap(), "Smile :(");
        assert_eq!(normalize_title("(Open").unwrap(), "(Open");
    }

    #[test]
    fn title_preserves_case() {
        assert_eq!(normalize_title("mIxEd CaSe").unwrap(), "mIxEd CaSe");
    }

    #[test]
    fn title_empty_after_rules_is_an_error() {
        assert!(matches!(
            normalize_title("(Instrumental)"),
            Err(NormalizeError::EmptyAfterNormalization(_))
        ));
        assert!(matches!(
            normalize_title("   "),
            Err(NormalizeError::EmptyInput)
        ));
    }

    #[test]
    fn title_is_idempotent() {
        for raw in ["Never Too Far/Hero Medley", "A (B) C", "Smile :(", "Plain"] {
            let once = normalize_title(raw).unwrap();
            assert_eq!(normalize_title(&once).unwrap(), once);
        }
    }

    #[test]
    fn artist_x_tag_between_names() {
        let p = normalize_artist("G-Eazy x Bebe Rexha", ArtistOptions::default()).unwrap();
        assert_eq!(p.primary, "G-Eazy");
        assert_eq!(p.featured, vec!["Bebe Rexha"]);
        assert_eq!(p.joiner_raw, "x");
    }

    #[test]
    fn artist_feat_dot_tag() {
        let p = normalize_artist("Chris Brown Feat. Ludacris", ArtistOptions::default()).unwrap();
        assert_eq!(p.primary, "Chris Brown");
        assert_eq!(p.featured, vec!["Ludacris"]);
        assert_eq!(p.joiner_raw, "Feat.");
    }

    #[test]
    fn artist_parenthesized_duet() {
        let p = normalize_artist(
            "Anita Cochran (Duet With Steve Wariner)",
            ArtistOptions::default(),
        )
        .unwrap();
        assert_eq!(p.primary, "Anita Cochran");
        assert_eq!(p.featured, vec!["Steve Wariner"]);
    }

    #[test]
    fn artist_multiple_featured_split_on_commas() {
        let p = normalize_artist(
            "DJ Khaled Featuring Justin Bieber, Chance The Rapper",
            ArtistOptions::default(),
        )
        .unwrap();
        assert_eq!(p.primary, "DJ Khaled");
        assert_eq!(p.featured, vec!["Justin Bieber", "Chance The Rapper"]);
    }

    #[test]
    fn artist_leading_x_is_not_a_tag() {
        let p = normalize_artist("X Ambassadors", ArtistOptions::default()).unwrap();
        assert_eq!(p.primary, "X Ambassadors");
        assert!(p.featured.is_empty());
    }

    #[test]
    fn artist_ampersand_only_when_enabled() {
        let off = normalize_artist("Hall & Oates", ArtistOptions::default()).unwrap();
        assert_eq!(off.primary, "Hall & Oates");
        assert!(off.featured.is_empty());

        let on = normalize_artist(
            "Hall & Oates",
            ArtistOptions {
                ampersand_joins: true,
            },
        )
        .unwrap();
        assert_eq!(on.primary, "Hall");
        assert_eq!(on.featured, vec!["Oates"]);
    }

    #[test]
    fn artist_render_round_trips() {
        let credits = [
            "G-Eazy x Bebe Rexha",
            "Chris Brown Feat. Ludacris",
            "Anita Cochran (Duet With Steve Wariner)",
            "DJ Khaled Featuring Justin Bieber, Chance The Rapper",
            "Lil Nas X",
            "Beyonce",
        ];
        for raw in credits {
            let parsed = normalize_artist(raw, ArtistOptions::default()).unwrap();
            let reparsed = normalize_artist(&parsed.render(), ArtistOptions::default()).unwrap();
            assert_eq!(reparsed.primary, parsed.primary, "credit {raw:?}");
            assert_eq!(reparsed.featured, parsed.featured, "credit {raw:?}");
        }
    }

    #[test]
    fn artist_dedupes_featured_case_insensitively() {
        let p = normalize_artist(
            "A Featuring B, b, C",
            ArtistOptions::default(),
        )
        .unwrap();
        assert_eq!(p.featured, vec!["B", "C"]);
    }

    #[test]
    fn genre_map_canonical_families() {
        let map = GenreMap::builtin();
        assert_eq!(map.map("Hip-Hop"), PrimaryGenre::HipHop);
        assert_eq!(map.map("hip hop"), PrimaryGenre::HipHop);
        assert_eq!(map.map("RAP"), PrimaryGenre::HipHop);
        assert_eq!(map.map("electro"), PrimaryGenre::Electronic);
        assert_eq!(map.map("house"), PrimaryGenre::Electronic);
        assert_eq!(map.map("polka fusion"), PrimaryGenre::Other);
    }

    #[test]
    fn genre_map_rejects_unknown_target() {
        let err = GenreMap::from_json("test", r#"{"mystery": "unknown"}"#);
        assert!(matches!(err, Err(NormalizeError::BadGenreValue { .. })));
    }

    #[test]
    fn genre_display_names() {
        assert_eq!(PrimaryGenre::HipHop.to_string(), "hip hop");
        assert_eq!(PrimaryGenre::RnB.to_string(), "r&b");
        assert_eq!("hip hop".parse::<PrimaryGenre>().unwrap(), PrimaryGenre::HipHop);
    }

    #[test]
    fn standardize_expands_contractions() {
        let table = ContractionTable::builtin();
        assert_eq!(
            standardize_text("I'm lying to myself.", &table),
            "i am lying to myself"
        );
        assert_eq!(standardize_text("doesn't", &table), "does not");
        assert_eq!(standardize_text("you'll see, we've won", &table), "you will see we have won");
        assert_eq!(standardize_text("That's John's car", &table), "that is john car");
    }

    #[test]
    fn standardize_keeps_digits_and_asterisks() {
        let table = ContractionTable::builtin();
        assert_eq!(standardize_text("bi*ch, $99!", &table), "bi*ch 99");
        assert_eq!(standardize_text("n****s", &table), "n****s");
    }

    #[test]
    fn standardize_handles_curly_apostrophe() {
        let table = ContractionTable::builtin();
        assert_eq!(standardize_text("don\u{2019}t stop", &table), "do not stop");
    }

    #[test]
    fn standardize_is_idempotent() {
        let table = ContractionTable::builtin();
        for raw in [
            "I'm lying to myself.",
            "Don't STOP!!",
            "bi*ch $99",
            "plain words here",
        ] {
            let once = standardize_text(raw, &table);
            assert_eq!(standardize_text(&once, &table), once);
        }
    }

    #[test]
    fn standardize_output_alphabet() {
        let table = ContractionTable::builtin();
        let out = standardize_text("Weird—input… with\t“quotes” & 100% emoji 🎵", &table);
        assert!(out
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == ' ' || c == '*'));
    }
}
