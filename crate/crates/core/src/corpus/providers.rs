//! Metadata providers and first-wins enrichment.
//!
//! A [`ProviderChain`] is an ordered list of metadata sources. Enrichment
//! asks every provider about a song and fills each record field — explicit
//! label, lyrics, genre — from the *first* provider in chain order that has
//! a value for it, so a high-trust source can sit in front of a noisy one
//! without masking fields it does not carry. An unreachable provider is
//! recorded and skipped; enrichment only fails outright when the whole
//! chain was unreachable.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, SongRecord};
use crate::normalize::GenreMap;

/// The subset of enrichable fields one provider knows for one song.
///
/// `None` (or an empty string) means "this provider has no value here",
/// which is an ordinary answer, not a failure.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderFields {
    #[serde(default)]
    pub explicit: Option<bool>,
    #[serde(default)]
    pub lyrics: Option<String>,
    #[serde(default)]
    pub genre: Option<String>,
}

/// A provider that could not answer at all for one lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderFailure {
    pub provider: String,
    pub cause: String,
}

/// One source of song metadata, addressed by [`super::song_id`].
pub trait MetadataProvider {
    /// Short name used in failure reports and run logs.
    fn name(&self) -> &str;

    /// Looks the song up. `Ok` with empty fields means the provider was
    /// reachable but has nothing for this song; `Err` means the provider
    /// itself was unusable (missing file, network down, quota exhausted).
    fn lookup(&self, song_id: &str) -> Result<ProviderFields, ProviderFailure>;
}

/// An ordered, non-empty list of providers. Order encodes trust: earlier
/// providers win field conflicts.
pub struct ProviderChain {
    providers: Vec<Box<dyn MetadataProvider>>,
}

impl ProviderChain {
    pub fn new(providers: Vec<Box<dyn MetadataProvider>>) -> Result<Self, CorpusError> {
        if providers.is_empty() {
            return Err(CorpusError::EmptyProviderChain);
        }
        Ok(ProviderChain { providers })
    }

    pub fn providers(&self) -> &[Box<dyn MetadataProvider>] {
        &self.providers
    }
}

/// An enriched record together with the providers that could not be
/// reached while building it.
#[derive(Debug)]
pub struct EnrichOutcome {
    pub record: SongRecord,
    pub failures: Vec<ProviderFailure>,
}

/// Fills a record's enrichment slots from `chain`, first provider wins
/// per field.
///
/// Each field is resolved independently: the explicit label, lyrics, and
/// genre may each come from a different provider. Provider genre labels
/// are collapsed through `genres`; a label no rule claims maps to
/// `other`, while a song no provider labels at all keeps `unknown`.
/// Identity fields (title, artist, dates) are never touched, and fields
/// no provider supplies keep their existing value.
///
/// Unreachable providers are skipped and reported in
/// [`EnrichOutcome::failures`]. Only a chain with *zero* reachable
/// providers raises [`CorpusError::AllProvidersFailed`].
pub fn enrich(
    record: SongRecord,
    chain: &ProviderChain,
    genres: &GenreMap,
) -> Result<EnrichOutcome, CorpusError> {
    let mut answers: Vec<ProviderFields> = Vec::new();
    let mut failures = Vec::new();
    for provider in chain.providers() {
        match provider.lookup(&record.song_id) {
            Ok(fields) => answers.push(fields),
            Err(failure) => failures.push(failure),
        }
    }
    if answers.is_empty() {
        return Err(CorpusError::AllProvidersFailed);
    }

    let non_empty = |value: &Option<String>| -> Option<String> {
        value
            .as_deref()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
    };

    let mut record = record;
    if let Some(explicit) = answers.iter().find_map(|a| a.explicit) {
        record.explicit_label = Some(explicit);
    }
    if let Some(lyrics) = answers.iter().find_map(|a| non_empty(&a.lyrics)) {
        record.lyrics_raw = Some(lyrics);
    }
    if let Some(genre) = answers.iter().find_map(|a| non_empty(&a.genre)) {
        record.genre = genres.map(&genre);
    }
    Ok(EnrichOutcome { record, failures })
}

/// A provider backed by a JSON file: an object mapping `song_id` to the
/// fields the provider knows (`explicit`, `lyrics`, `genre`, each
/// optional).
///
/// Lookups never fail once the file has loaded; unknown songs get empty
/// fields. This is both the test double and the offline stand-in for the
/// real services the pipeline would query.
pub struct FixtureProvider {
    name: String,
    entries: BTreeMap<String, ProviderFields>,
}

impl FixtureProvider {
    /// Parses fixture JSON. The provider `name` is used in reports only.
    pub fn from_json(name: &str, text: &str) -> Result<Self, CorpusError> {
        let entries: BTreeMap<String, ProviderFields> =
            serde_json::from_str(text).map_err(|e| CorpusError::BadFixture {
                name: name.to_string(),
                reason: e.to_string(),
            })?;
        Ok(FixtureProvider {
            name: name.to_string(),
            entries,
        })
    }

    /// Loads fixture JSON from `path`, named after the file stem.
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("fixture")
            .to_string();
        let text = fs::read_to_string(path)?;
        FixtureProvider::from_json(&name, &text)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl MetadataProvider for FixtureProvider {
    fn name(&self) -> &str {
        &self.name
    }

    fn lookup(&self, song_id: &str) -> Result<ProviderFields, ProviderFailure> {
        Ok(self.entries.get(song_id).cloned().unwrap_or_default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{song_id, LanguageStatus};
    use crate::normalize::PrimaryGenre;
    use chrono::NaiveDate;

    /// A provider whose lookups always fail, as if the service were down.
    struct DownProvider(&'static str);

    impl MetadataProvider for DownProvider {
        fn name(&self) -> &str {
            self.0
        }

        fn lookup(&self, _song_id: &str) -> Result<ProviderFields, ProviderFailure> {
            Err(ProviderFailure {
                provider: self.0.to_string(),
                cause: "connection refused".to_string(),
            })
        }
    }

    fn record(title: &str, artist: &str) -> SongRecord {
        let year = 2007;
        SongRecord {
            song_id: song_id(title, artist),
            title: title.to_string(),
            artist_primary: artist.to_string(),
            artists_featured: Vec::new(),
            first_chart_date: NaiveDate::from_ymd_opt(year, 6, 2).unwrap(),
            year,
            decade: 2000,
            genre: PrimaryGenre::Unknown,
            explicit_label: None,
            lyrics_raw: None,
            lyrics_clean: None,
            language_status: LanguageStatus::Undetermined,
        }
    }

    fn fixture(name: &str, song: &SongRecord, fields: ProviderFields) -> FixtureProvider {
        let mut entries = BTreeMap::new();
        entries.insert(song.song_id.clone(), fields);
        let text = serde_json::to_string(&entries).unwrap();
        FixtureProvider::from_json(name, &text).unwrap()
    }

    #[test]
    fn first_provider_wins_conflicting_fields() {
        let song = record("Umbrella", "Rihanna");
        let first = fixture(
            "first",
            &song,
            ProviderFields {
                explicit: Some(false),
                lyrics: None,
                genre: Some("dance pop".to_string()),
            },
        );
        let second = fixture(
            "second",
            &song,
            ProviderFields {
                explicit: Some(true),
                lyrics: Some("under my umbrella".to_string()),
                genre: Some("rap".to_string()),
            },
        );
        let chain = ProviderChain::new(vec![Box::new(first), Box::new(second)]).unwrap();
        let outcome = enrich(song, &chain, &GenreMap::builtin()).unwrap();
        assert_eq!(outcome.record.explicit_label, Some(false));
        assert_eq!(outcome.record.genre, PrimaryGenre::Pop);
        // Lyrics came from the second provider: the first had none, and
        // fields resolve independently.
        assert_eq!(
            outcome.record.lyrics_raw.as_deref(),
            Some("under my umbrella")
        );
        assert!(outcome.failures.is_empty());
    }

    #[test]
    fn empty_strings_do_not_count_as_values() {
        let song = record("Umbrella", "Rihanna");
        let first = fixture(
            "first",
            &song,
            ProviderFields {
                explicit: None,
                lyrics: Some("   ".to_string()),
                genre: Some(String::new()),
            },
        );
        let second = fixture(
            "second",
            &song,
            ProviderFields {
                explicit: None,
                lyrics: Some("under my umbrella".to_string()),
                genre: Some("contemporary r&b".to_string()),
            },
        );
        let chain = ProviderChain::new(vec![Box::new(first), Box::new(second)]).unwrap();
        let outcome = enrich(song, &chain, &GenreMap::builtin()).unwrap();
        assert_eq!(
            outcome.record.lyrics_raw.as_deref(),
            Some("under my umbrella")
        );
        assert_eq!(outcome.record.genre, PrimaryGenre::RnB);
    }

    #[test]
    fn unsupplied_fields_stay_empty_and_identity_is_untouched() {
        let song = record("Instrumental Jam", "The Band");
        let before = song.clone();
        let empty = fixture("first", &song, ProviderFields::default());
        let chain = ProviderChain::new(vec![Box::new(empty)]).unwrap();
        let outcome = enrich(song, &chain, &GenreMap::builtin()).unwrap();
        assert_eq!(outcome.record, before);
        assert_eq!(outcome.record.genre, PrimaryGenre::Unknown);
    }

    #[test]
    fn unmapped_genre_label_collapses_to_other() {
        let song = record("Polka Medley", "Somebody");
        let provider = fixture(
            "first",
            &song,
            ProviderFields {
                explicit: None,
                lyrics: None,
                genre: Some("polka".to_string()),
            },
        );
        let chain = ProviderChain::new(vec![Box::new(provider)]).unwrap();
        let outcome = enrich(song, &chain, &GenreMap::builtin()).unwrap();
        assert_eq!(outcome.record.genre, PrimaryGenre::Other);
    }

    #[test]
    fn down_providers_are_skipped_and_reported() {
        let song = record("Umbrella", "Rihanna");
        let backup = fixture(
            "backup",
            &song,
            ProviderFields {
                explicit: Some(true),
                lyrics: None,
                genre: None,
            },
        );
        let chain =
            ProviderChain::new(vec![Box::new(DownProvider("primary")), Box::new(backup)]).unwrap();
        let outcome = enrich(song, &chain, &GenreMap::builtin()).unwrap();
        assert_eq!(outcome.record.explicit_label, Some(true));
        assert_eq!(outcome.failures.len(), 1);
        assert_eq!(outcome.failures[0].provider, "primary");
    }

    #[test]
    fn whole_chain_down_is_an_error() {
        let song = record("Umbrella", "Rihanna");
        let chain = ProviderChain::new(vec![
            Box::new(DownProvider("a")),
            Box::new(DownProvider("b")),
        ])
        .unwrap();
        match enrich(song, &chain, &GenreMap::builtin()) {
            Err(CorpusError::AllProvidersFailed) => {}
            other => panic!("unexpected outcome: {other:?}"),
        }
    }

    #[test]
    fn chains_must_not_be_empty() {
        match ProviderChain::new(Vec::new()) {
            Err(CorpusError::EmptyProviderChain) => {}
            Err(other) => panic!("unexpected error: {other}"),
            Ok(_) => panic!("empty chain was accepted"),
        }
    }

    #[test]
    fn fixture_files_round_trip_and_reject_junk() {
        let song = record("Umbrella", "Rihanna");
        let json = format!(
            r#"{{"{}": {{"explicit": true, "genre": "hip hop"}}}}"#,
            song.song_id
        );
        let provider = FixtureProvider::from_json("spotify", &json).unwrap();
        assert_eq!(provider.len(), 1);
        let fields = provider.lookup(&song.song_id).unwrap();
        assert_eq!(fields.explicit, Some(true));
        assert_eq!(fields.genre.as_deref(), Some("hip hop"));
        assert_eq!(fields.lyrics, None);
        // Unknown songs answer with empty fields, not an error.
        assert_eq!(provider.lookup("0000000000000000").unwrap(), ProviderFields::default());

        match FixtureProvider::from_json("bad", "[1, 2, 3]") {
            Err(CorpusError::BadFixture { name, .. }) => assert_eq!(name, "bad"),
            other => panic!("unexpected outcome: {:?}", other.map(|p| p.len())),
        }
    }
}
