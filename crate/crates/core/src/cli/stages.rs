//! The subcommand implementations.
//!
//! Each stage is a pure function of (inputs, config, seed): it reads its
//! declared inputs, writes its outputs atomically, and returns a
//! [`RunManifest`] whose summary line the dispatcher prints. Staged corpus
//! files live in `paths.corpus_dir` under numbered names so the pipeline
//! order is visible in a directory listing:
//!
//! - `10_ingested.jsonl` — deduped records straight off the charts
//! - `20_enriched.jsonl` — provider fields filled in
//! - `30_filtered.jsonl` — study window + English-only
//! - `40_parsed.jsonl` / `40_docs.jsonl` — cleaned records + chunked docs
//!
//! Everything else (tables, models, predictions, manifests) lands in
//! `paths.output_dir`.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use crate::abuse::{count_chunk, explicit_by_lexicon, song_profile, AbuseLexicon};
use crate::corpus::{
    dedupe_songs, enrich, filter_pre1990, load_chart_csv, load_corpus, write_corpus,
    FixtureProvider, LanguageStatus, MetadataProvider, ProviderChain, SongRecord,
};
use crate::langid::{builtin_profiles, is_english_song, LangProfile, ProfileSet};
use crate::lyricdoc::{
    chunk_sections, parse_sections, render_sections, strip_promo, LyricsDocument,
};
use crate::ngram::{tables_to_json, top_k, write_table_csv as write_ngram_csv, SongTokens};
use crate::normalize::{ContractionTable, GenreMap};
use crate::polarity::{
    chunk_polarity, reference_valence, song_polarity, to_binary, PolarityWeights, ValenceLexicon,
};
use crate::sentiment::{
    f1_score, fit_vocabulary, hamming_loss, import_predictions, jaccard_score, load_senwave, lrap,
    split_train_val_test, subset_accuracy, train, ClassifierModel, F1Mode, LabelVector,
    PredictionRecord, SenWaveExample, TrainConfig, LABEL_COUNT,
};
use crate::trends::{
    avg_polarity, compare_against_provider, emotion_counts, genre_distribution,
    pct_explicit_by_year, plot_spec, song_id_of_unit, table_to_json, word_counts_by_year,
    write_table_csv, EmotionBreakdown, PolarityBreakdown, TrendTable,
};

use super::config::PipelineConfig;
use super::manifest::{write_atomic, RunManifest};
use super::CliError;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn stage_path(config: &PipelineConfig, name: &str) -> PathBuf {
    config.paths.corpus_dir.join(name)
}

fn require(path: &Path, hint: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::MissingInput {
            path: path.to_path_buf(),
            detail: hint.to_string(),
        })
    }
}

/// Hint for a missing staged file: name the stage that produces it.
fn produced_by(stage: &str) -> String {
    format!("run `chartlex {stage}` first")
}

fn save_records(records: &[SongRecord], path: &Path) -> Result<(), CliError> {
    let mut buffer = Vec::new();
    write_corpus(records, &mut buffer)?;
    write_atomic(path, &buffer)
}

fn save_docs(docs: &[LyricsDocument], path: &Path) -> Result<(), CliError> {
    let mut buffer = Vec::new();
    for doc in docs {
        // The dump form is pretty-printed; compact it to one line so the
        // store stays newline-delimited.
        let value: serde_json::Value = serde_json::from_str(&doc.to_dump_json())?;
        buffer.extend_from_slice(serde_json::to_string(&value)?.as_bytes());
        buffer.push(b'\n');
    }
    write_atomic(path, &buffer)
}

fn load_docs(path: &Path) -> Result<Vec<LyricsDocument>, CliError> {
    let text = fs::read_to_string(path)?;
    let mut docs = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        docs.push(LyricsDocument::from_dump_json(line)?);
    }
    Ok(docs)
}

/// The configured lexicon, or the built-in one. Records the file as an
/// input when a path is configured.
fn load_lexicon(
    config: &PipelineConfig,
    manifest: &mut RunManifest,
) -> Result<AbuseLexicon, CliError> {
    match &config.paths.lexicon {
        Some(path) => {
            require(path, "the configured lexicon file does not exist")?;
            manifest.record_input(path)?;
            Ok(AbuseLexicon::load(path)?)
        }
        None => Ok(AbuseLexicon::builtin()),
    }
}

fn load_weights(
    config: &PipelineConfig,
    manifest: &mut RunManifest,
) -> Result<PolarityWeights, CliError> {
    match &config.paths.weights {
        Some(path) => {
            require(path, "the configured weights file does not exist")?;
            manifest.record_input(path)?;
            Ok(PolarityWeights::load(path)?)
        }
        None => Ok(PolarityWeights::default_weights()),
    }
}

/// The configured language profiles, or `None` meaning "use the built-in
/// set".
fn load_profiles(
    config: &PipelineConfig,
    manifest: &mut RunManifest,
) -> Result<Option<ProfileSet>, CliError> {
    if config.paths.profiles.is_empty() {
        return Ok(None);
    }
    let mut profiles = Vec::new();
    for path in &config.paths.profiles {
        require(path, &produced_by("build-lang-profile"))?;
        manifest.record_input(path)?;
        profiles.push(LangProfile::load(path)?);
    }
    Ok(Some(ProfileSet::new(profiles)?))
}

fn model_path(config: &PipelineConfig) -> PathBuf {
    config
        .paths
        .model
        .clone()
        .unwrap_or_else(|| config.paths.output_dir.join("model.json"))
}

fn predictions_store_path(config: &PipelineConfig) -> PathBuf {
    config.paths.output_dir.join("predictions.jsonl")
}

fn read_predictions(
    path: &Path,
    decision_threshold: f64,
) -> Result<Vec<PredictionRecord>, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::MissingInput {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    Ok(import_predictions(BufReader::new(file), decision_threshold)?)
}

/// Joins chunked documents to corpus years for the token-level tables.
fn song_tokens(
    docs: &[LyricsDocument],
    corpus: &[SongRecord],
    manifest: &mut RunManifest,
) -> Vec<SongTokens> {
    let year_of: BTreeMap<&str, i32> = corpus
        .iter()
        .map(|r| (r.song_id.as_str(), r.year))
        .collect();
    let mut songs = Vec::new();
    for doc in docs {
        match year_of.get(doc.song_id.as_str()) {
            Some(&year) => songs.push(SongTokens {
                year,
                chunks: doc.chunks.iter().map(|c| c.tokens.clone()).collect(),
            }),
            None => manifest.warn(format!(
                "document {} has no corpus record; skipped",
                doc.song_id
            )),
        }
    }
    songs
}

/// Floats in CSV cells: shortest form that round-trips.
fn fmt_float(value: f64) -> String {
    format!("{value}")
}

// ---------------------------------------------------------------------------
// Stage 1: ingest, enrich, filter, parse
// ---------------------------------------------------------------------------

pub fn cmd_ingest(config: &PipelineConfig) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("ingest", config);
    require(&config.paths.chart_csv, "point paths.chart_csv at the chart CSV")?;
    manifest.record_input(&config.paths.chart_csv)?;

    let entries = load_chart_csv(&config.paths.chart_csv)?;
    let records = dedupe_songs(&entries, config.scope)?;
    save_records(&records, &stage_path(config, "10_ingested.jsonl"))?;

    manifest.summary = format!("in={} out={}", entries.len(), records.len());
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

pub fn cmd_enrich(config: &PipelineConfig) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("enrich", config);
    let input = stage_path(config, "10_ingested.jsonl");
    require(&input, &produced_by("ingest"))?;
    manifest.record_input(&input)?;

    let mut providers: Vec<Box<dyn MetadataProvider>> = Vec::new();
    for path in &config.paths.providers {
        require(path, "the configured provider fixture does not exist")?;
        manifest.record_input(path)?;
        providers.push(Box::new(FixtureProvider::load(path)?));
    }
    let chain = ProviderChain::new(providers)?;
    let genres = GenreMap::builtin();

    let records = load_corpus(&input)?;
    let total = records.len();
    let mut enriched = Vec::with_capacity(total);
    let mut failure_counts: BTreeMap<String, usize> = BTreeMap::new();
    for record in records {
        let outcome = enrich(record, &chain, &genres)?;
        for failure in outcome.failures {
            *failure_counts
                .entry(format!("{}: {}", failure.provider, failure.cause))
                .or_default() += 1;
        }
        enriched.push(outcome.record);
    }
    for (what, count) in failure_counts {
        manifest.warn(format!("provider failure x{count}: {what}"));
    }
    save_records(&enriched, &stage_path(config, "20_enriched.jsonl"))?;

    manifest.summary = format!("in={total} out={}", enriched.len());
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

pub fn cmd_filter(config: &PipelineConfig) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("filter", config);
    let input = stage_path(config, "20_enriched.jsonl");
    require(&input, &produced_by("enrich"))?;
    manifest.record_input(&input)?;
    let owned_profiles = load_profiles(config, &mut manifest)?;
    let profiles = owned_profiles.as_ref().unwrap_or_else(|| builtin_profiles());

    let records = load_corpus(&input)?;
    let total = records.len();
    let in_window = filter_pre1990(records);
    let window_dropped = total - in_window.len();

    let mut kept = Vec::new();
    let mut non_english = 0usize;
    let mut no_lyrics = 0usize;
    for mut record in in_window {
        let Some(raw) = record.lyrics_raw.as_deref() else {
            no_lyrics += 1;
            continue;
        };
        if is_english_song(&strip_promo(raw), profiles, config.thresholds.lang_margin) {
            record.language_status = LanguageStatus::English;
            kept.push(record);
        } else {
            non_english += 1;
        }
    }
    if no_lyrics > 0 {
        manifest.warn(format!("{no_lyrics} songs dropped: no lyrics from any provider"));
    }
    manifest.warn(format!(
        "dropped {window_dropped} pre-1990 songs and {non_english} non-English songs"
    ));
    save_records(&kept, &stage_path(config, "30_filtered.jsonl"))?;

    manifest.summary = format!("in={total} out={}", kept.len());
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

pub fn cmd_parse(config: &PipelineConfig) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("parse", config);
    let input = stage_path(config, "30_filtered.jsonl");
    require(&input, &produced_by("filter"))?;
    manifest.record_input(&input)?;
    let contractions = ContractionTable::builtin();

    let mut records = load_corpus(&input)?;
    let total = records.len();
    let mut docs = Vec::new();
    for record in &mut records {
        let Some(raw) = record.lyrics_raw.as_deref() else {
            manifest.warn(format!("{}: no lyrics; not parsed", record.song_id));
            continue;
        };
        let doc = parse_sections(&record.song_id, &strip_promo(raw), &contractions);
        let doc = chunk_sections(doc, config.token_budget)?;
        record.lyrics_clean = Some(render_sections(&doc));
        docs.push(doc);
    }
    save_records(&records, &stage_path(config, "40_parsed.jsonl"))?;
    save_docs(&docs, &stage_path(config, "40_docs.jsonl"))?;

    manifest.summary = format!("in={total} out={}", docs.len());
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Stage 2: corpus analyses
// ---------------------------------------------------------------------------

pub fn cmd_ngrams(
    config: &PipelineConfig,
    n: Option<usize>,
    k: Option<usize>,
) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("ngrams", config);
    let corpus_path = stage_path(config, "30_filtered.jsonl");
    let docs_path = stage_path(config, "40_docs.jsonl");
    require(&corpus_path, &produced_by("filter"))?;
    require(&docs_path, &produced_by("parse"))?;
    manifest.record_input(&corpus_path)?;
    manifest.record_input(&docs_path)?;

    let corpus = load_corpus(&corpus_path)?;
    let docs = load_docs(&docs_path)?;
    let songs = song_tokens(&docs, &corpus, &mut manifest);
    let partition = config.era_partition()?;
    let n = n.unwrap_or(config.ngram_size);
    let k = k.unwrap_or(config.top_k);
    if n == 0 {
        return Err(CliError::Config("ngram size must be at least 1".into()));
    }

    let tables = top_k(&songs, &partition, n, k)?;
    for table in &tables {
        let mut buffer = Vec::new();
        write_ngram_csv(table, &mut buffer)?;
        write_atomic(
            &config
                .paths
                .output_dir
                .join(format!("ngrams_{}.csv", table.era_label)),
            &buffer,
        )?;
    }
    write_atomic(
        &config.paths.output_dir.join("ngrams.json"),
        tables_to_json(&tables)?.as_bytes(),
    )?;

    manifest.summary = format!("songs={} n={n} k={k} tables={}", songs.len(), tables.len());
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

pub fn cmd_abuse(config: &PipelineConfig) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("abuse", config);
    let docs_path = stage_path(config, "40_docs.jsonl");
    require(&docs_path, &produced_by("parse"))?;
    manifest.record_input(&docs_path)?;
    let lexicon = load_lexicon(config, &mut manifest)?;

    let docs = load_docs(&docs_path)?;
    let mut buffer = Vec::new();
    let mut flags: BTreeMap<String, bool> = BTreeMap::new();
    let mut flagged = 0usize;
    for doc in &docs {
        let profile = song_profile(doc, &lexicon);
        let explicit =
            explicit_by_lexicon(&profile, config.thresholds.lexicon_min_occurrences);
        flagged += usize::from(explicit);
        flags.insert(profile.song_id.clone(), explicit);
        buffer.extend_from_slice(serde_json::to_string(&profile)?.as_bytes());
        buffer.push(b'\n');
    }
    write_atomic(&config.paths.output_dir.join("abuse_profiles.jsonl"), &buffer)?;
    let mut flags_json = serde_json::to_string_pretty(&flags)?;
    flags_json.push('\n');
    write_atomic(
        &config.paths.output_dir.join("explicit_flags.json"),
        flags_json.as_bytes(),
    )?;

    manifest.summary = format!("in={} flagged={flagged}", docs.len());
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Stage 3: classifier
// ---------------------------------------------------------------------------

pub fn cmd_train(config: &PipelineConfig) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("train", config);
    require(&config.paths.senwave_csv, "point paths.senwave_csv at the labeled CSV")?;
    manifest.record_input(&config.paths.senwave_csv)?;

    let contractions = ContractionTable::builtin();
    let loaded = load_senwave(&config.paths.senwave_csv, &contractions)?;
    if loaded.skipped_empty > 0 {
        manifest.warn(format!(
            "{} rows skipped: empty after standardization",
            loaded.skipped_empty
        ));
    }
    let (train_split, _, _) = split_train_val_test(&loaded.examples, config.seed);
    let vocabulary =
        fit_vocabulary(&train_split, config.train.min_df, config.train.max_features)?;
    let train_config = TrainConfig {
        learning_rate: config.train.learning_rate,
        l2: config.train.l2,
        epochs: config.train.epochs,
        batch_size: config.train.batch_size,
        seed: config.seed,
    };
    let report = train(&train_split, vocabulary, train_config)?;
    let mut model = report.model;
    model.decision_threshold = config.thresholds.decision;
    model.validate()?;

    let mut model_json = serde_json::to_string_pretty(&model)?;
    model_json.push('\n');
    write_atomic(&model_path(config), model_json.as_bytes())?;

    let mut losses = String::from("epoch,loss\n");
    for (epoch, loss) in report.epoch_losses.iter().enumerate() {
        losses.push_str(&format!("{epoch},{}\n", fmt_float(*loss)));
    }
    write_atomic(
        &config.paths.output_dir.join("epoch_losses.csv"),
        losses.as_bytes(),
    )?;

    manifest.summary = format!(
        "examples={} vocabulary={} epochs={} final_loss={:.6}",
        train_split.len(),
        model.vocabulary.len(),
        config.train.epochs,
        report.epoch_losses.last().copied().unwrap_or(f64::NAN),
    );
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

/// One row of the evaluation report.
struct EvalRow {
    split: &'static str,
    preds: Vec<LabelVector>,
    probs: Vec<[f64; LABEL_COUNT]>,
    golds: Vec<LabelVector>,
}

fn eval_model_split(
    model: &ClassifierModel,
    split: &'static str,
    examples: &[SenWaveExample],
) -> EvalRow {
    let mut preds = Vec::with_capacity(examples.len());
    let mut probs = Vec::with_capacity(examples.len());
    let golds = examples.iter().map(|e| e.gold.clone()).collect();
    for (i, example) in examples.iter().enumerate() {
        let record = model.predict(&format!("{split}_{i}"), &example.text);
        probs.push(model.probabilities(&example.text));
        preds.push(record.labels);
    }
    EvalRow {
        split,
        preds,
        probs,
        golds,
    }
}

pub fn cmd_eval(config: &PipelineConfig, import: Option<&Path>) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("eval", config);
    require(&config.paths.senwave_csv, "point paths.senwave_csv at the labeled CSV")?;
    manifest.record_input(&config.paths.senwave_csv)?;

    let contractions = ContractionTable::builtin();
    let loaded = load_senwave(&config.paths.senwave_csv, &contractions)?;
    let rows = match import {
        Some(path) => {
            // Imported predictions line up with the CSV rows by position.
            require(path, "the predictions file does not exist")?;
            manifest.record_input(path)?;
            let records = read_predictions(path, config.thresholds.decision)?;
            let golds: Vec<LabelVector> =
                loaded.examples.iter().map(|e| e.gold.clone()).collect();
            let probs = records
                .iter()
                .map(|r| match &r.probs {
                    Some(p) => {
                        let mut row = [0.0; LABEL_COUNT];
                        row.copy_from_slice(p);
                        row
                    }
                    None => {
                        let mut row = [0.0; LABEL_COUNT];
                        for (cell, &bit) in row.iter_mut().zip(&r.labels.to_ints()) {
                            *cell = f64::from(bit);
                        }
                        row
                    }
                })
                .collect();
            vec![EvalRow {
                split: "Imported",
                preds: records.into_iter().map(|r| r.labels).collect(),
                probs,
                golds,
            }]
        }
        None => {
            let path = model_path(config);
            require(&path, &produced_by("train"))?;
            manifest.record_input(&path)?;
            let model = ClassifierModel::load(&path)?;
            let (_, validation, test) = split_train_val_test(&loaded.examples, config.seed);
            vec![
                eval_model_split(&model, "Validation", &validation),
                eval_model_split(&model, "Test", &test),
            ]
        }
    };

    let mut csv_text = String::from(
        "split,hamming_loss,jaccard_score,lrap,f1_micro,f1_macro,subset_accuracy\n",
    );
    let mut report = Vec::new();
    for row in &rows {
        let metrics: BTreeMap<&str, f64> = BTreeMap::from([
            ("hamming_loss", hamming_loss(&row.preds, &row.golds)?),
            ("jaccard_score", jaccard_score(&row.preds, &row.golds)?),
            ("lrap", lrap(&row.probs, &row.golds)?),
            ("f1_micro", f1_score(&row.preds, &row.golds, F1Mode::Micro)?),
            ("f1_macro", f1_score(&row.preds, &row.golds, F1Mode::Macro)?),
            ("subset_accuracy", subset_accuracy(&row.preds, &row.golds)?),
        ]);
        csv_text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.split,
            fmt_float(metrics["hamming_loss"]),
            fmt_float(metrics["jaccard_score"]),
            fmt_float(metrics["lrap"]),
            fmt_float(metrics["f1_micro"]),
            fmt_float(metrics["f1_macro"]),
            fmt_float(metrics["subset_accuracy"]),
        ));
        report.push(serde_json::json!({
            "split": row.split,
            "examples": row.golds.len(),
            "metrics": metrics,
        }));
    }
    write_atomic(
        &config.paths.output_dir.join("eval_report.csv"),
        csv_text.as_bytes(),
    )?;
    let mut json_text = serde_json::to_string_pretty(&report)?;
    json_text.push('\n');
    write_atomic(
        &config.paths.output_dir.join("eval_report.json"),
        json_text.as_bytes(),
    )?;

    manifest.summary = format!(
        "rows={} examples={}",
        rows.len(),
        rows.iter().map(|r| r.golds.len()).sum::<usize>()
    );
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Stage 4: chunk predictions and polarity
// ---------------------------------------------------------------------------

pub fn cmd_sentiment(
    config: &PipelineConfig,
    import: Option<&Path>,
) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("sentiment", config);
    let docs_path = stage_path(config, "40_docs.jsonl");

    let import = import.or(config.paths.predictions.as_deref());
    let predictions = match import {
        Some(path) => {
            require(path, "the predictions file does not exist")?;
            manifest.record_input(path)?;
            read_predictions(path, config.thresholds.decision)?
        }
        None => {
            let path = model_path(config);
            if !path.is_file() {
                return Err(CliError::MissingPredictions);
            }
            require(&docs_path, &produced_by("parse"))?;
            manifest.record_input(&docs_path)?;
            manifest.record_input(&path)?;
            let mut model = ClassifierModel::load(&path)?;
            model.decision_threshold = config.thresholds.decision;
            model.validate()?;
            let docs = load_docs(&docs_path)?;
            let mut predictions = Vec::new();
            for doc in &docs {
                for chunk in &doc.chunks {
                    let unit_id = format!("{}#{}", doc.song_id, chunk.chunk_id);
                    predictions.push(model.predict(&unit_id, &chunk.text));
                }
            }
            predictions
        }
    };

    let mut buffer = Vec::new();
    crate::sentiment::export_predictions(&predictions, &mut buffer)?;
    write_atomic(&predictions_store_path(config), &buffer)?;

    manifest.summary = format!(
        "chunks={} source={}",
        predictions.len(),
        if import.is_some() { "imported" } else { "model" }
    );
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

pub fn cmd_polarity(config: &PipelineConfig) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("polarity", config);
    let preds_path = predictions_store_path(config);
    require(&preds_path, &produced_by("sentiment"))?;
    manifest.record_input(&preds_path)?;
    let weights = load_weights(config, &mut manifest)?;

    let predictions = read_predictions(&preds_path, config.thresholds.decision)?;
    let threshold = config.thresholds.polarity_binary;

    let mut chunk_csv = String::from("unit_id,score,negative\n");
    let mut by_song: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for prediction in &predictions {
        let score = chunk_polarity(&prediction.labels, &weights);
        chunk_csv.push_str(&format!(
            "{},{},{}\n",
            prediction.unit_id,
            fmt_float(score),
            to_binary(score, threshold),
        ));
        by_song
            .entry(song_id_of_unit(&prediction.unit_id).to_string())
            .or_default()
            .push(score);
    }
    write_atomic(
        &config.paths.output_dir.join("polarity_chunks.csv"),
        chunk_csv.as_bytes(),
    )?;

    let mut song_csv = String::from("song_id,chunk_count,mean_score,negative\n");
    for (song_id, scores) in &by_song {
        let song = song_polarity(scores);
        song_csv.push_str(&format!(
            "{song_id},{},{},{}\n",
            song.chunk_count,
            fmt_float(song.score),
            to_binary(song.score, threshold),
        ));
    }
    write_atomic(
        &config.paths.output_dir.join("polarity_songs.csv"),
        song_csv.as_bytes(),
    )?;

    manifest.summary = format!("chunks={} songs={}", predictions.len(), by_song.len());
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Stage 5: trends
// ---------------------------------------------------------------------------

/// Writes one trend table as CSV + JSON + plot-spec JSON.
fn emit_table(
    config: &PipelineConfig,
    name: &str,
    table: &TrendTable,
    mark: &str,
    y: &[&str],
    series: Option<&str>,
) -> Result<(), CliError> {
    let dir = &config.paths.output_dir;
    let mut buffer = Vec::new();
    write_table_csv(table, &mut buffer)?;
    write_atomic(&dir.join(format!("{name}.csv")), &buffer)?;
    let mut json = table_to_json(table)?;
    json.push('\n');
    write_atomic(&dir.join(format!("{name}.json")), json.as_bytes())?;
    let spec = plot_spec(table, mark, y, series);
    let mut spec_json = serde_json::to_string_pretty(&spec)?;
    spec_json.push('\n');
    write_atomic(&dir.join(format!("{name}.plot.json")), spec_json.as_bytes())?;
    Ok(())
}

pub fn cmd_trends(config: &PipelineConfig) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("trends", config);
    let corpus_path = stage_path(config, "30_filtered.jsonl");
    let docs_path = stage_path(config, "40_docs.jsonl");
    let preds_path = predictions_store_path(config);
    require(&corpus_path, &produced_by("filter"))?;
    require(&docs_path, &produced_by("parse"))?;
    require(&preds_path, &produced_by("sentiment"))?;
    manifest.record_input(&corpus_path)?;
    manifest.record_input(&docs_path)?;
    manifest.record_input(&preds_path)?;
    let lexicon = load_lexicon(config, &mut manifest)?;
    let weights = load_weights(config, &mut manifest)?;

    let corpus = load_corpus(&corpus_path)?;
    let docs = load_docs(&docs_path)?;
    let predictions = read_predictions(&preds_path, config.thresholds.decision)?;

    emit_table(
        config,
        "pct_explicit_by_year",
        &pct_explicit_by_year(&corpus),
        "line",
        &["pct_explicit"],
        None,
    )?;
    emit_table(
        config,
        "genre_distribution",
        &genre_distribution(&corpus),
        "bar",
        &["count"],
        None,
    )?;

    let (by_decade, unjoined) = emotion_counts(&predictions, &corpus, EmotionBreakdown::Decade);
    for unit_id in &unjoined {
        manifest.warn(format!("prediction {unit_id} has no corpus song"));
    }
    let decade_metrics: Vec<&str> = by_decade.metric_names.iter().map(String::as_str).collect();
    emit_table(
        config,
        "emotion_by_decade",
        &by_decade,
        "bar",
        &decade_metrics,
        None,
    )?;
    let (by_genre, _) = emotion_counts(&predictions, &corpus, EmotionBreakdown::Genre);
    let genre_metrics: Vec<&str> = by_genre.metric_names.iter().map(String::as_str).collect();
    emit_table(
        config,
        "emotion_by_genre",
        &by_genre,
        "bar",
        &genre_metrics,
        None,
    )?;

    let songs = song_tokens(&docs, &corpus, &mut manifest);
    emit_table(
        config,
        "word_counts_by_year",
        &word_counts_by_year(&songs, &lexicon),
        "line",
        &["total_tokens", "abusive_occurrences", "pct_abusive"],
        None,
    )?;

    // Song polarity recomputed from the predictions with the same weights
    // the polarity stage uses, so the two stages can never disagree.
    let mut by_song: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for prediction in &predictions {
        by_song
            .entry(song_id_of_unit(&prediction.unit_id).to_string())
            .or_default()
            .push(chunk_polarity(&prediction.labels, &weights));
    }
    let scores: BTreeMap<String, f64> = by_song
        .into_iter()
        .map(|(song_id, chunk_scores)| (song_id, song_polarity(&chunk_scores).score))
        .collect();
    emit_table(
        config,
        "polarity_by_year",
        &avg_polarity(&corpus, &scores, PolarityBreakdown::Year),
        "line",
        &["mean_polarity"],
        None,
    )?;
    emit_table(
        config,
        "polarity_by_year_genre",
        &avg_polarity(&corpus, &scores, PolarityBreakdown::YearByGenre),
        "line",
        &["mean_polarity"],
        Some("genre"),
    )?;

    // Lexicon verdicts vs provider labels, where both exist.
    let mut computed: BTreeMap<String, bool> = BTreeMap::new();
    let mut profiled = 0usize;
    for doc in &docs {
        let profile = song_profile(doc, &lexicon);
        computed.insert(
            profile.song_id.clone(),
            explicit_by_lexicon(&profile, config.thresholds.lexicon_min_occurrences),
        );
        profiled += 1;
    }
    match compare_against_provider(&computed, &corpus) {
        Ok(comparison) => {
            let mut json = serde_json::to_string_pretty(&comparison)?;
            json.push('\n');
            write_atomic(
                &config.paths.output_dir.join("provider_comparison.json"),
                json.as_bytes(),
            )?;
        }
        Err(crate::trends::TrendsError::NoOverlap) => {
            manifest.warn(
                "provider comparison skipped: no song has both a computed flag and a provider label",
            );
        }
        Err(other) => return Err(other.into()),
    }

    manifest.summary = format!(
        "songs={} chunks={} tables=7 profiled={profiled}",
        corpus.len(),
        predictions.len()
    );
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Case studies
// ---------------------------------------------------------------------------

/// One row of the appendix-style case-study table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CaseStudyRow {
    pub section: String,
    pub chunk_text: String,
    /// Comma-joined emotion names, or `N/A` when the chunk carries none.
    pub emotions: String,
    pub abusive_distinct: usize,
    pub polarity_score: f64,
    pub reference_valence: f64,
}

/// Builds the case-study rows for one parsed document.
fn case_study_rows(
    doc: &LyricsDocument,
    labels_of: &BTreeMap<String, LabelVector>,
    lexicon: &AbuseLexicon,
    weights: &PolarityWeights,
    valence: &ValenceLexicon,
) -> Result<Vec<CaseStudyRow>, CliError> {
    let mut rows = Vec::with_capacity(doc.chunks.len());
    for chunk in &doc.chunks {
        let unit_id = format!("{}#{}", doc.song_id, chunk.chunk_id);
        let labels = labels_of
            .get(&unit_id)
            .ok_or_else(|| CliError::MissingChunkPrediction(chunk.chunk_id.clone()))?;
        let (distinct, _, _) = count_chunk(&chunk.tokens, lexicon);
        rows.push(CaseStudyRow {
            section: chunk.chunk_id.clone(),
            chunk_text: chunk.text.clone(),
            emotions: labels.render(),
            abusive_distinct: distinct,
            polarity_score: chunk_polarity(labels, weights),
            reference_valence: reference_valence(&chunk.text, valence),
        });
    }
    Ok(rows)
}

/// Renders rows as an aligned text table in the appendix column order.
fn render_case_table(title: &str, rows: &[CaseStudyRow]) -> String {
    let headers = [
        "section",
        "chunk_text",
        "emotions",
        "abusive_distinct",
        "polarity_score",
        "reference_valence",
    ];
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|row| {
            [
                row.section.clone(),
                row.chunk_text.clone(),
                row.emotions.clone(),
                row.abusive_distinct.to_string(),
                fmt_float(row.polarity_score),
                fmt_float(row.reference_valence),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (width, cell) in widths.iter_mut().zip(row.iter()) {
            *width = (*width).max(cell.chars().count());
        }
    }
    let mut out = format!("{title}\n");
    let render_line = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(cell, width)| format!("{cell:<width$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    out.push_str(&render_line(&header_cells));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in &cells {
        out.push_str(&render_line(row));
        out.push('\n');
    }
    out
}

pub fn cmd_case_study(
    config: &PipelineConfig,
    song: &str,
    document: Option<&Path>,
    import: Option<&Path>,
) -> Result<(RunManifest, String), CliError> {
    let mut manifest = RunManifest::new("case-study", config);
    let lexicon = load_lexicon(config, &mut manifest)?;
    let weights = load_weights(config, &mut manifest)?;
    let valence = ValenceLexicon::builtin();

    // The document either comes from a standalone dump file or from the
    // parsed store.
    let doc = match document {
        Some(path) => {
            require(path, "the document dump file does not exist")?;
            manifest.record_input(path)?;
            let doc = LyricsDocument::from_dump_json(&fs::read_to_string(path)?)?;
            if doc.song_id != song {
                return Err(CliError::SongNotFound(song.to_string()));
            }
            doc
        }
        None => {
            let docs_path = stage_path(config, "40_docs.jsonl");
            require(&docs_path, &produced_by("parse"))?;
            manifest.record_input(&docs_path)?;
            load_docs(&docs_path)?
                .into_iter()
                .find(|d| d.song_id == song)
                .ok_or_else(|| CliError::SongNotFound(song.to_string()))?
        }
    };

    let preds_path = match import {
        Some(path) => path.to_path_buf(),
        None => predictions_store_path(config),
    };
    require(&preds_path, &produced_by("sentiment"))?;
    manifest.record_input(&preds_path)?;
    let labels_of: BTreeMap<String, LabelVector> =
        read_predictions(&preds_path, config.thresholds.decision)?
            .into_iter()
            .map(|p| (p.unit_id, p.labels))
            .collect();

    let rows = case_study_rows(&doc, &labels_of, &lexicon, &weights, &valence)?;

    let mut csv_writer = csv::Writer::from_writer(Vec::new());
    csv_writer.write_record([
        "section",
        "chunk_text",
        "emotions",
        "abusive_distinct",
        "polarity_score",
        "reference_valence",
    ])?;
    for row in &rows {
        csv_writer.write_record([
            row.section.as_str(),
            row.chunk_text.as_str(),
            row.emotions.as_str(),
            &row.abusive_distinct.to_string(),
            &fmt_float(row.polarity_score),
            &fmt_float(row.reference_valence),
        ])?;
    }
    let csv_bytes = csv_writer
        .into_inner()
        .map_err(|e| CliError::Config(format!("csv buffer: {e}")))?;
    write_atomic(
        &config.paths.output_dir.join(format!("case_study_{song}.csv")),
        &csv_bytes,
    )?;

    let text_table = render_case_table(&format!("case study: {song}"), &rows);
    write_atomic(
        &config.paths.output_dir.join(format!("case_study_{song}.txt")),
        text_table.as_bytes(),
    )?;

    manifest.summary = format!("song={song} rows={}", rows.len());
    manifest.write(&config.paths.output_dir)?;
    Ok((manifest, text_table))
}

// ---------------------------------------------------------------------------
// Language profiles
// ---------------------------------------------------------------------------

pub fn cmd_build_lang_profile(
    config: &PipelineConfig,
    tag: &str,
    corpus: &Path,
    out: &Path,
) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::new("build-lang-profile", config);
    require(corpus, "the corpus text file does not exist")?;
    manifest.record_input(corpus)?;

    let text = fs::read_to_string(corpus)?;
    let profile = LangProfile::build(tag, &text)?;
    let mut json = serde_json::to_string_pretty(&profile)?;
    json.push('\n');
    write_atomic(out, json.as_bytes())?;

    manifest.summary = format!(
        "tag={tag} trigrams={}",
        profile.trigram_log_probs.len()
    );
    manifest.write(&config.paths.output_dir)?;
    Ok(manifest)
}
