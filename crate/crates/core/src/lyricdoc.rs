//! Structural parsing of raw lyrics into sections and token-budgeted chunks.
//!
//! Scraped lyrics arrive as one text blob: promotional debris glued to the
//! words, `[Verse 1]`-style headers marking song structure, and no guarantee
//! of consistent casing or punctuation. This module peels those layers in
//! order: [`strip_promo`] removes scraper artifacts verbatim-preserving
//! everything else, [`parse_sections`] splits on bracketed headers and
//! standardizes each body, and [`chunk_sections`] cuts every section into
//! chunks of at most `token_budget` words so classifier inputs have a bounded
//! length.
//!
//! Chunk naming follows the section display form: an unsplit section yields
//! one chunk `[<Name>]`, a split one yields `[<Name>]_1`, `[<Name>]_2`, ...
//! When the same section name recurs (a chorus sung three times), later
//! occurrences carry a parenthesized occurrence marker (`[Chorus](2)_1`) so
//! chunk ids stay unique across the whole document while the display label
//! (`[Chorus]_1`) keeps the familiar form.

use crate::normalize::{standardize_text, ContractionTable};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Errors from chunking and document import.
#[derive(Debug, Error)]
pub enum LyricError {
    /// The requested token budget is below the supported minimum.
    #[error("token budget {0} is below the minimum of {MIN_TOKEN_BUDGET}")]
    BudgetTooSmall(usize),
    /// A serialized document violated a structural invariant.
    #[error("invalid document dump: {0}")]
    DumpInvalid(String),
    /// A serialized document was not valid JSON.
    #[error("document dump is not valid JSON: {0}")]
    DumpJson(#[from] serde_json::Error),
}

/// Smallest chunking budget the splitter accepts.
pub const MIN_TOKEN_BUDGET: usize = 8;

/// Default chunk size in whole-word tokens.
pub const DEFAULT_TOKEN_BUDGET: usize = 40;

/// One structural unit of a song: a verse, chorus, bridge, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    /// Header name as parsed, credits removed (`Chorus`, `Verse 1`).
    pub name: String,
    /// 1-based occurrence index of this name within the song.
    pub ordinal: u32,
    /// Standardized body text; empty only for instrumental-style markers.
    pub body: String,
}

/// A classifier-sized piece of one section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    /// Document-unique id, e.g. `[Chorus]`, `[Verse 1]_2`, `[Chorus](3)_1`.
    pub chunk_id: String,
    /// Index of the owning section in the document's section list.
    pub section_index: usize,
    /// 1-based split index; `None` when the section fit in one chunk.
    pub split: Option<u32>,
    /// Whitespace tokens of `text`.
    pub tokens: Vec<String>,
    /// Standardized chunk text.
    pub text: String,
}

impl Chunk {
    /// The display form used in reports: section name in brackets plus the
    /// split suffix, without the occurrence marker.
    pub fn display_label(&self, sections: &[Section]) -> String {
        let name = &sections[self.section_index].name;
        match self.split {
            Some(k) => format!("[{name}]_{k}"),
            None => format!("[{name}]"),
        }
    }
}

/// A fully parsed song: ordered sections and their ordered chunks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LyricsDocument {
    pub song_id: String,
    pub sections: Vec<Section>,
    pub chunks: Vec<Chunk>,
}

/// Removes scraper boilerplate from raw lyrics, preserving everything else.
///
/// Patterns handled:
/// - `You might also like` interstitials,
/// - `See <artist> Live` ticket teasers (same line, bounded lookahead),
/// - `Get tickets as low as` through the price digits that follow,
/// - the trailing `Embed` marker with its glued-on digit run (`42Embed`).
///
/// # Examples
///
/// ```
/// use chartlex::lyricdoc::strip_promo;
///
/// let raw = "hold on See Taylor Swift LiveGet tickets as low as $69You might also like I kept";
/// assert_eq!(strip_promo(raw), "hold on  I kept");
/// assert_eq!(strip_promo("fade away42Embed"), "fade away");
/// assert_eq!(strip_promo("clean text"), "clean text");
/// ```
pub fn strip_promo(raw: &str) -> String {
    let mut text = raw.to_string();
    loop {
        let before = text.len();
        text = remove_literal(&text, "You might also like");
        text = remove_see_live(&text);
        text = remove_ticket_teaser(&text);
        if text.len() == before {
            break;
        }
    }
    remove_embed_trailer(&text)
}

/// Removes every occurrence of `needle` from `text`.
fn remove_literal(text: &str, needle: &str) -> String {
    if text.contains(needle) {
        text.replace(needle, "")
    } else {
        text.to_string()
    }
}

/// Removes `See <artist> Live` spans. The artist name is bounded to one line
/// and 60 characters so an ordinary lyric containing "see" much earlier than
/// an unrelated "live" is left alone.
fn remove_see_live(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("See ") {
        let after = &rest[start + 4..];
        let window = &after[..after.len().min(60)];
        let candidate = window
            .find(" Live")
            .filter(|&pos| !window[..pos].contains('\n'));
        match candidate {
            Some(pos) => {
                out.push_str(&rest[..start]);
                rest = &rest[start + 4 + pos + 5..];
            }
            None => {
                out.push_str(&rest[..start + 4]);
                rest = &rest[start + 4..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Removes `Get tickets as low as` through the end of the next digit run.
fn remove_ticket_teaser(text: &str) -> String {
    const NEEDLE: &str = "Get tickets as low as";
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find(NEEDLE) {
        out.push_str(&rest[..start]);
        let after = &rest[start + NEEDLE.len()..];
        let mut chars = after.char_indices().peekable();
        let mut cut = 0;
        // Scan to the first digit on the same line, then through the run.
        while let Some(&(idx, ch)) = chars.peek() {
            if ch == '\n' {
                break;
            }
            if ch.is_ascii_digit() {
                let mut end = idx;
                for (offset, c) in after[idx..].char_indices() {
                    if c.is_ascii_digit() {
                        end = idx + offset + c.len_utf8();
                    } else {
                        break;
                    }
                }
                cut = end;
                break;
            }
            chars.next();
        }
        rest = &after[cut..];
    }
    out.push_str(rest);
    out
}

/// Removes a trailing `Embed` marker and the digit run glued to it.
fn remove_embed_trailer(text: &str) -> String {
    let trimmed = text.trim_end();
    let Some(without) = trimmed.strip_suffix("Embed") else {
        return text.to_string();
    };
    let without = without.trim_end_matches(' ');
    let without = without.trim_end_matches(|c: char| c.is_ascii_digit());
    without.trim_end().to_string()
}

/// Splits promo-stripped lyrics into named sections with standardized bodies.
///
/// A line of the form `[<Name>]` or `[<Name>: <credits>]` opens a new
/// section; credits are discarded. Text before the first header becomes a
/// section named `Intro`; a lyric with no headers at all becomes a single
/// section named `Full`. Each section's `ordinal` counts occurrences of its
/// name, so a thrice-sung chorus yields ordinals 1, 2, 3.
pub fn parse_sections(song_id: &str, raw: &str, table: &ContractionTable) -> LyricsDocument {
    let mut pending: Vec<(String, Vec<&str>)> = Vec::new();
    let mut saw_header = false;
    let mut lead_lines: Vec<&str> = Vec::new();

    for line in raw.lines() {
        match parse_header(line) {
            Some(name) => {
                saw_header = true;
                pending.push((name, Vec::new()));
            }
            None => match pending.last_mut() {
                Some((_, body)) => body.push(line),
                None => lead_lines.push(line),
            },
        }
    }

    let lead_text = lead_lines.join("\n");
    let mut raw_sections: Vec<(String, String)> = Vec::new();
    if !lead_text.trim().is_empty() {
        let name = if saw_header { "Intro" } else { "Full" };
        raw_sections.push((name.to_string(), lead_text));
    }
    for (name, body) in pending {
        raw_sections.push((name, body.join("\n")));
    }

    let mut sections = Vec::with_capacity(raw_sections.len());
    for (name, body) in raw_sections {
        let ordinal = sections
            .iter()
            .filter(|s: &&Section| s.name == name)
            .count() as u32
            + 1;
        sections.push(Section {
            name,
            ordinal,
            body: standardize_text(&body, table),
        });
    }

    LyricsDocument {
        song_id: song_id.to_string(),
        sections,
        chunks: Vec::new(),
    }
}

/// Parses one line as a section header, returning the cleaned name.
fn parse_header(line: &str) -> Option<String> {
    let trimmed = line.trim();
    let inner = trimmed.strip_prefix('[')?.strip_suffix(']')?;
    if inner.contains('[') || inner.contains(']') {
        return None;
    }
    let name = match inner.find(':') {
        Some(pos) => inner[..pos].trim(),
        None => inner.trim(),
    };
    if name.is_empty() {
        return None;
    }
    Some(name.to_string())
}

/// Splits standardized text on whitespace. `*` and digits survive intact.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

/// Populates `doc.chunks` by cutting each section into runs of at most
/// `token_budget` tokens, greedily left to right.
///
/// A section that fits in one chunk is named `[<Name>]`; a split section
/// yields `[<Name>]_1`, `[<Name>]_2`, and so on. Later occurrences of the
/// same section name gain a `(ordinal)` marker in the chunk id (never in the
/// display label) so ids are document-unique. Empty sections produce no
/// chunks. Concatenating a section's chunks in order reproduces its body.
pub fn chunk_sections(
    mut doc: LyricsDocument,
    token_budget: usize,
) -> Result<LyricsDocument, LyricError> {
    if token_budget < MIN_TOKEN_BUDGET {
        return Err(LyricError::BudgetTooSmall(token_budget));
    }
    let mut chunks = Vec::new();
    for (section_index, section) in doc.sections.iter().enumerate() {
        let tokens = tokenize(&section.body);
        if tokens.is_empty() {
            continue;
        }
        let pieces: Vec<&[String]> = tokens.chunks(token_budget).collect();
        let split_section = pieces.len() > 1;
        for (i, piece) in pieces.iter().enumerate() {
            let split = if split_section {
                Some(i as u32 + 1)
            } else {
                None
            };
            chunks.push(Chunk {
                chunk_id: chunk_id(&section.name, section.ordinal, split),
                section_index,
                split,
                tokens: piece.to_vec(),
                text: piece.join(" "),
            });
        }
    }
    doc.chunks = chunks;
    Ok(doc)
}

/// Builds the canonical chunk id from section name, occurrence, and split.
pub fn chunk_id(section_name: &str, ordinal: u32, split: Option<u32>) -> String {
    let mut id = format!("[{section_name}]");
    if ordinal > 1 {
        id.push_str(&format!("({ordinal})"));
    }
    if let Some(k) = split {
        id.push_str(&format!("_{k}"));
    }
    id
}

/// Renders a document back to header-and-body text form.
///
/// Parsing the rendered text again reproduces the same section names and
/// bodies, which is the round-trip property the tests pin down.
pub fn render_sections(doc: &LyricsDocument) -> String {
    let mut out = String::new();
    for section in &doc.sections {
        out.push_str(&format!("[{}]\n", section.name));
        out.push_str(&section.body);
        out.push_str("\n\n");
    }
    out
}

/// Serialized form of a document, used for debug dumps and imports.
#[derive(Debug, Serialize, Deserialize)]
struct DumpDocument {
    song_id: String,
    sections: Vec<Section>,
    chunks: Vec<DumpChunk>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DumpChunk {
    chunk_id: String,
    text: String,
}

impl LyricsDocument {
    /// Serializes the document to the dump JSON form.
    pub fn to_dump_json(&self) -> String {
        let dump = DumpDocument {
            song_id: self.song_id.clone(),
            sections: self.sections.clone(),
            chunks: self
                .chunks
                .iter()
                .map(|c| DumpChunk {
                    chunk_id: c.chunk_id.clone(),
                    text: c.text.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dump).expect("dump serializes")
    }

    /// Reconstructs a document from dump JSON, revalidating invariants.
    ///
    /// Chunks must appear in section order, each section's chunks contiguous
    /// and concatenating to its body; chunk ids must be unique and consistent
    /// with their section's name and ordinal.
    pub fn from_dump_json(json: &str) -> Result<LyricsDocument, LyricError> {
        let dump: DumpDocument = serde_json::from_str(json)?;
        let mut seen = BTreeSet::new();
        let mut chunks: Vec<Chunk> = Vec::with_capacity(dump.chunks.len());
        let mut section_index = 0usize;

        for raw in &dump.chunks {
            if !seen.insert(raw.chunk_id.clone()) {
                return Err(LyricError::DumpInvalid(format!(
                    "duplicate chunk id {:?}",
                    raw.chunk_id
                )));
            }
            let (name, ordinal, split) = parse_chunk_id(&raw.chunk_id)?;
            // Advance to the owning section; chunks arrive in section order.
            loop {
                let section = dump.sections.get(section_index).ok_or_else(|| {
                    LyricError::DumpInvalid(format!(
                        "chunk {:?} has no matching section",
                        raw.chunk_id
                    ))
                })?;
                if section.name == name && section.ordinal == ordinal {
                    break;
                }
                section_index += 1;
            }
            chunks.push(Chunk {
                chunk_id: raw.chunk_id.clone(),
                section_index,
                split,
                tokens: tokenize(&raw.text),
                text: raw.text.clone(),
            });
        }

        let doc = LyricsDocument {
            song_id: dump.song_id,
            sections: dump.sections,
            chunks,
        };
        for (i, section) in doc.sections.iter().enumerate() {
            let joined = doc
                .chunks
                .iter()
                .filter(|c| c.section_index == i)
                .map(|c| c.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            if joined != section.body {
                return Err(LyricError::DumpInvalid(format!(
                    "section {:?} (ordinal {}) body does not equal its chunks",
                    section.name, section.ordinal
                )));
            }
        }
        Ok(doc)
    }
}

/// Parses `[<Name>](<ordinal>)_<split>` back into its parts; the marker and
/// split suffix are both optional.
fn parse_chunk_id(id: &str) -> Result<(String, u32, Option<u32>), LyricError> {
    let bad = || LyricError::DumpInvalid(format!("malformed chunk id {id:?}"));
    let inner_end = id.rfind(']').ok_or_else(bad)?;
    if !id.starts_with('[') || inner_end < 1 {
        return Err(bad());
    }
    let name = id[1..inner_end].to_string();
    if name.is_empty() {
        return Err(bad());
    }
    let mut rest = &id[inner_end + 1..];

    let mut ordinal = 1u32;
    if let Some(after) = rest.strip_prefix('(') {
        let close = after.find(')').ok_or_else(bad)?;
        ordinal = after[..close].parse().map_err(|_| bad())?;
        if ordinal < 2 {
            return Err(bad());
        }
        rest = &after[close + 1..];
    }

    let split = if rest.is_empty() {
        None
    } else {
        let digits = rest.strip_prefix('_').ok_or_else(bad)?;
        let k: u32 = digits.parse().map_err(|_| bad())?;
        if k < 1 {
            return Err(bad());
        }
        Some(k)
    };
    Ok((name, ordinal, split))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::ContractionTable;

    fn table() -> ContractionTable {
        ContractionTable::builtin()
    }

    #[test]
    fn promo_ticket_teaser_and_interstitial() {
        let raw = "hold on See Taylor Swift LiveGet tickets as low as $69You might also like I kept";
        assert_eq!(strip_promo(raw), "hold on  I kept");
    }

    #[test]
    fn promo_embed_trailer_variants() {
        assert_eq!(strip_promo("fade away42Embed"), "fade away");
        assert_eq!(strip_promo("fade away 42 Embed"), "fade away");
        assert_eq!(strip_promo("fade awayEmbed"), "fade away");
        assert_eq!(strip_promo("embedded reporter"), "embedded reporter");
    }

    #[test]
    fn promo_leaves_clean_text_alone() {
        let raw = "nothing to see here\njust lyrics";
        assert_eq!(strip_promo(raw), raw);
    }

    #[test]
    fn promo_leaves_plain_see_alone() {
        let raw = "i can see the light";
        assert_eq!(strip_promo(raw), raw);
    }

    #[test]
    fn sections_with_credits_and_ordinals() {
        let raw = "[Verse 1]\nfirst words\n[Chorus: Lil Durk]\nchorus words\n[Verse 1]\nsecond time";
        let doc = parse_sections("s1", raw, &table());
        let names: Vec<(&str, u32)> = doc
            .sections
            .iter()
            .map(|s| (s.name.as_str(), s.ordinal))
            .collect();
        assert_eq!(
            names,
            vec![("Verse 1", 1), ("Chorus", 1), ("Verse 1", 2)]
        );
        assert_eq!(doc.sections[1].body, "chorus words");
    }

    #[test]
    fn leading_text_becomes_intro_only_with_headers() {
        let doc = parse_sections("s1", "hum hum\n[Verse 1]\nwords", &table());
        assert_eq!(doc.sections[0].name, "Intro");
        assert_eq!(doc.sections[0].body, "hum hum");

        let headerless = parse_sections("s1", "line one\nline two", &table());
        assert_eq!(headerless.sections.len(), 1);
        assert_eq!(headerless.sections[0].name, "Full");
    }

    #[test]
    fn section_bodies_are_standardized() {
        let doc = parse_sections("s1", "[Chorus]\nDon't STOP!\nI'm here", &table());
        assert_eq!(doc.sections[0].body, "do not stop i am here");
    }

    #[test]
    fn tokenize_splits_on_whitespace() {
        assert_eq!(tokenize("back in blood"), vec!["back", "in", "blood"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(
            tokenize("bi*ch got 99 problems"),
            vec!["bi*ch", "got", "99", "problems"]
        );
    }

    #[test]
    fn small_section_is_one_unsuffixed_chunk() {
        let doc = parse_sections("s1", "[Chorus]\nshort and sweet", &table());
        let doc = chunk_sections(doc, 40).unwrap();
        assert_eq!(doc.chunks.len(), 1);
        assert_eq!(doc.chunks[0].chunk_id, "[Chorus]");
        assert_eq!(doc.chunks[0].split, None);
    }

    #[test]
    fn long_section_splits_greedily() {
        let words = vec!["word"; 90].join(" ");
        let doc = parse_sections("s1", &format!("[Verse 1]\n{words}"), &table());
        let doc = chunk_sections(doc, 40).unwrap();
        let ids: Vec<&str> = doc.chunks.iter().map(|c| c.chunk_id.as_str()).collect();
        assert_eq!(ids, vec!["[Verse 1]_1", "[Verse 1]_2", "[Verse 1]_3"]);
        assert_eq!(doc.chunks[0].tokens.len(), 40);
        assert_eq!(doc.chunks[1].tokens.len(), 40);
        assert_eq!(doc.chunks[2].tokens.len(), 10);
    }

    #[test]
    fn repeated_sections_get_occurrence_markers() {
        let raw = "[Chorus]\none two three\n[Verse]\nmiddle\n[Chorus]\none two three";
        let doc = chunk_sections(parse_sections("s1", raw, &table()), 40).unwrap();
        let ids: Vec<&str> = doc.chunks.iter().map(|c| c.chunk_id.as_str()).collect();
        assert_eq!(ids, vec!["[Chorus]", "[Verse]", "[Chorus](2)"]);
        // Display labels keep the familiar unmarked form.
        assert_eq!(doc.chunks[2].display_label(&doc.sections), "[Chorus]");
    }

    #[test]
    fn empty_section_yields_no_chunks() {
        let doc = parse_sections("s1", "[Instrumental]\n[Verse 1]\nwords here", &table());
        let doc = chunk_sections(doc, 40).unwrap();
        assert_eq!(doc.chunks.len(), 1);
        assert_eq!(doc.chunks[0].chunk_id, "[Verse 1]");
    }

    #[test]
    fn budget_below_minimum_is_rejected() {
        let doc = parse_sections("s1", "[Verse]\nwords", &table());
        assert!(matches!(
            chunk_sections(doc, 7),
            Err(LyricError::BudgetTooSmall(7))
        ));
    }

    #[test]
    fn chunks_partition_sections_losslessly() {
        let raw = "[Verse 1]\nthe quick brown fox jumps over the lazy dog again and again until dawn\n[Chorus]\nshort";
        let doc = chunk_sections(parse_sections("s1", raw, &table()), 8).unwrap();
        for (i, section) in doc.sections.iter().enumerate() {
            let joined: Vec<String> = doc
                .chunks
                .iter()
                .filter(|c| c.section_index == i)
                .flat_map(|c| c.tokens.clone())
                .collect();
            assert_eq!(joined, tokenize(&section.body));
        }
    }

    #[test]
    fn render_parse_round_trip() {
        let raw = "intro hum\n[Verse 1]\nDon't stop now\n[Chorus]\nhey hey\n[Verse 1]\nback again";
        let doc = parse_sections("s1", raw, &table());
        let rendered = render_sections(&doc);
        let reparsed = parse_sections("s1", &rendered, &table());
        assert_eq!(doc.sections, reparsed.sections);
    }

    #[test]
    fn dump_round_trip_preserves_document() {
        let raw = "[Chorus]\none two three four five six seven eight nine ten eleven twelve\n[Chorus]\none two three";
        let doc = chunk_sections(parse_sections("s1", raw, &table()), 8).unwrap();
        let dump = doc.to_dump_json();
        let loaded = LyricsDocument::from_dump_json(&dump).unwrap();
        assert_eq!(loaded, doc);
    }

    #[test]
    fn dump_rejects_duplicate_chunk_ids() {
        let json = r#"{
            "song_id": "s1",
            "sections": [{"name": "Chorus", "ordinal": 1, "body": "a b"}],
            "chunks": [
                {"chunk_id": "[Chorus]", "text": "a"},
                {"chunk_id": "[Chorus]", "text": "b"}
            ]
        }"#;
        assert!(matches!(
            LyricsDocument::from_dump_json(json),
            Err(LyricError::DumpInvalid(_))
        ));
    }

    #[test]
    fn dump_rejects_body_chunk_mismatch() {
        let json = r#"{
            "song_id": "s1",
            "sections": [{"name": "Chorus", "ordinal": 1, "body": "a b c"}],
            "chunks": [{"chunk_id": "[Chorus]", "text": "a b"}]
        }"#;
        assert!(matches!(
            LyricsDocument::from_dump_json(json),
            Err(LyricError::DumpInvalid(_))
        ));
    }

    #[test]
    fn chunk_id_parser_handles_all_forms() {
        assert_eq!(parse_chunk_id("[Chorus]").unwrap(), ("Chorus".into(), 1, None));
        assert_eq!(
            parse_chunk_id("[Verse 1]_3").unwrap(),
            ("Verse 1".into(), 1, Some(3))
        );
        assert_eq!(
            parse_chunk_id("[Chorus](2)_13").unwrap(),
            ("Chorus".into(), 2, Some(13))
        );
        assert!(parse_chunk_id("Chorus").is_err());
        assert!(parse_chunk_id("[Chorus](1)").is_err());
    }
}
