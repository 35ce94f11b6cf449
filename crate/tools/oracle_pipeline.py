#!/usr/bin/env python3
"""Brute-force recomputation of every pipeline table, checked against a run.

Recomputes the whole fixture pipeline from raw inputs using independent code
paths (plain dicts and loops, see textops.py), compares the results
byte-for-byte against the files a `chartlex` chain run produced (see
tools/run_chain.sh), and — when every check passes and --freeze is given —
copies the verified files into data/goldens/ for the test suite to diff
future runs against.

Independence rules:
- Nothing here reads the staged corpus files the binary writes; the corpus
  is rebuilt from data/fixtures/chart.csv and the provider fixtures.
- Language verdicts come from the fixture's designed ground truth
  (songs_meta.json), not from the library's detector, so a detector
  regression shows up as a corpus-count mismatch here.
- predictions.jsonl is the one run artifact consumed as input: emotion
  predictions feed the aggregation stages, and the training run itself is
  pinned by its own reproducibility checks. Aggregation over them is
  recomputed from scratch.

Float parity: every mean and percentage is accumulated in exactly the
documented order (sequential IEEE-754 addition), so recomputed values are
compared as rendered strings, not with tolerances.

Usage: tools/oracle_pipeline.py RUN_DIR [--freeze]
"""

import argparse
import csv
import json
import shutil
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
import textops  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "data" / "fixtures"
GOLDENS = ROOT / "data" / "goldens"

LABEL_KEYS = [
    "optimistic", "thankful", "empathetic", "pessimistic", "anxious",
    "sad", "annoyed", "denial", "official", "joking",
]
LABEL_NAMES = [
    "Optimistic", "Thankful", "Empathetic", "Pessimistic", "Anxious",
    "Sad", "Annoyed", "Denial", "Official", "Joking",
]
POLARITY_WEIGHTS = [0.3, 0.2, 0.0, -0.3, -0.2, -0.2, -0.1, -0.1, 0.0, 0.0]
GENRES_ALL = ["pop", "hip hop", "country", "rock", "r&b", "electronic", "other", "unknown"]
ERAS = [("1990-2005", 1990, 2005), ("2006-2016", 2006, 2016), ("2017-2024", 2017, 2024)]
PROVIDER_ORDER = ["spotify", "deezer", "lastfm"]
TOKEN_BUDGET = 40
NGRAM_N = 3
TOP_K = 10
POLARITY_THRESHOLD = -0.15
MIN_OCCURRENCES = 1

CHECKS = []


def check(name, ok, detail=""):
    CHECKS.append((name, bool(ok), detail))
    mark = "ok  " if ok else "FAIL"
    line = f"[{mark}] {name}"
    if detail and not ok:
        line += f" — {detail}"
    print(line)


def check_bytes(name, expected_text, actual_path):
    actual = Path(actual_path).read_bytes()
    expected = expected_text.encode()
    if actual == expected:
        check(name, True)
        return
    # First differing line, for the failure report.
    exp_lines = expected_text.split("\n")
    act_lines = actual.decode(errors="replace").split("\n")
    detail = f"line counts {len(exp_lines)} vs {len(act_lines)}"
    for i, (e, a) in enumerate(zip(exp_lines, act_lines), start=1):
        if e != a:
            detail = f"line {i}: expected {e!r}, file has {a!r}"
            break
    check(name, False, detail)


def csv_text(header, rows):
    """CSV with LF terminators and no quoting; asserts no cell needs any."""
    lines = [",".join(header)]
    for row in rows:
        for cell in row:
            assert '"' not in cell and "," not in cell and "\n" not in cell, repr(cell)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def f64(value):
    return textops.rust_f64(value)


# ---------------------------------------------------------------------------
# Corpus reconstruction from raw fixtures
# ---------------------------------------------------------------------------


def load_chart_entries():
    entries = []
    with open(FIXTURES / "chart.csv", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            entries.append(
                (row["date"], int(row["rank"]), row["song"], row["artist"])
            )
    return entries


def dedupe(entries):
    """One record per song id; earliest chart date fixes the spelling."""
    groups = {}
    for date, _rank, title_raw, artist_raw in entries:
        title = textops.normalize_title(title_raw)
        primary, featured = textops.normalize_artist(artist_raw)
        sid = textops.song_id(title, primary)
        group = groups.get(sid)
        # Strict < keeps the first file-order entry on date ties.
        if group is None or date < group["date"]:
            groups[sid] = {
                "song_id": sid,
                "date": date,
                "title": title,
                "primary": primary,
                "featured": featured,
            }
    records = sorted(groups.values(), key=lambda g: (g["date"], g["title"], g["song_id"]))
    for record in records:
        year = int(record["date"][:4])
        record["year"] = year
        record["decade"] = year // 10 * 10
    return records


def enrich(records):
    providers = [
        json.load(open(FIXTURES / "providers" / f"{name}.json", encoding="utf-8"))
        for name in PROVIDER_ORDER
    ]
    genre_map = {
        key.strip().lower(): value
        for key, value in json.load(open(ROOT / "data" / "genre_map.json")).items()
    }
    for record in records:
        answers = [p.get(record["song_id"], {}) for p in providers]
        explicit = next(
            (a["explicit"] for a in answers if a.get("explicit") is not None), None
        )
        lyrics = next(
            (a["lyrics"].strip() for a in answers if (a.get("lyrics") or "").strip()),
            None,
        )
        genre_raw = next(
            (a["genre"].strip() for a in answers if (a.get("genre") or "").strip()),
            None,
        )
        record["explicit_label"] = explicit
        record["lyrics_raw"] = lyrics
        if genre_raw is None:
            record["genre"] = "unknown"
        else:
            record["genre"] = genre_map.get(genre_raw.strip().lower(), "other")
    return records


def filter_records(records):
    """Study window plus designed language ground truth."""
    designed = {
        s["song_id"]: s["lang"]
        for s in json.load(open(FIXTURES / "songs_meta.json"))
    }
    kept = []
    for record in records:
        if record["year"] < 1990:
            continue
        if record["lyrics_raw"] is None:
            continue
        if designed[record["song_id"]] == "en":
            kept.append(record)
    return kept


def parse_docs(kept, tables):
    docs = []
    for record in kept:
        stripped = textops.strip_promo(record["lyrics_raw"])
        sections = textops.parse_sections(stripped, tables)
        chunks = textops.chunk_sections(sections, TOKEN_BUDGET)
        docs.append({"song_id": record["song_id"], "chunks": chunks})
    return docs


# ---------------------------------------------------------------------------
# Stage recomputations
# ---------------------------------------------------------------------------


def ngram_tables(docs, year_of):
    per_era = [{} for _ in ERAS]
    for doc in docs:
        year = year_of[doc["song_id"]]
        index = next(
            (i for i, (_, start, end) in enumerate(ERAS) if start <= year <= end),
            None,
        )
        if index is None:
            continue
        counts = per_era[index]
        for _, tokens in doc["chunks"]:
            for i in range(len(tokens) - NGRAM_N + 1):
                gram = tuple(tokens[i : i + NGRAM_N])
                counts[gram] = counts.get(gram, 0) + 1
    tables = []
    for (label, _, _), counts in zip(ERAS, per_era):
        rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:TOP_K]
        tables.append((label, rows))
    return tables


def abuse_profiles(docs, lexicon):
    profiles = []
    for doc in docs:
        per_chunk = []
        union = set()
        occurrences_total = 0
        tokens_total = 0
        for cid, tokens in doc["chunks"]:
            distinct, occurrences, matched = textops.count_chunk(tokens, lexicon)
            per_chunk.append(
                {
                    "chunk_id": cid,
                    "distinct": distinct,
                    "occurrences": occurrences,
                    "matched": matched,
                }
            )
            union.update(matched)
            occurrences_total += occurrences
            tokens_total += len(tokens)
        profiles.append(
            {
                "song_id": doc["song_id"],
                "per_chunk": per_chunk,
                "song_distinct": len(union),
                "song_occurrences": occurrences_total,
                "total_tokens": tokens_total,
            }
        )
    return profiles


def pct_explicit_rows(kept):
    by_year = {}
    for record in kept:
        tally = by_year.setdefault(record["year"], [0, 0, 0])
        if record["explicit_label"] is True:
            tally[0] += 1
            tally[1] += 1
        elif record["explicit_label"] is False:
            tally[0] += 1
        else:
            tally[2] += 1
    rows = []
    for year in sorted(by_year):
        labeled, explicit, unlabeled = by_year[year]
        pct = "" if labeled == 0 else f64(100.0 * explicit / labeled)
        rows.append([str(year), str(labeled), str(explicit), str(unlabeled), pct])
    return rows


def genre_rows(kept):
    counts = {genre: 0 for genre in GENRES_ALL}
    for record in kept:
        counts[record["genre"]] += 1
    rows = []
    for genre in sorted(counts):
        count = counts[genre]
        rows.append([genre, f64(float(count)), f64(100.0 * count / len(kept))])
    return rows


def word_count_rows(docs, year_of, lexicon):
    by_year = {}
    for doc in docs:
        tally = by_year.setdefault(year_of[doc["song_id"]], [0, 0])
        for _, tokens in doc["chunks"]:
            _, occurrences, _ = textops.count_chunk(tokens, lexicon)
            tally[0] += len(tokens)
            tally[1] += occurrences
    rows = []
    for year in sorted(by_year):
        tokens, abusive = by_year[year]
        pct = "" if tokens == 0 else f64(100.0 * abusive / tokens)
        rows.append([str(year), str(tokens), str(abusive), pct])
    return rows


def load_predictions(run_dir):
    predictions = []
    with open(run_dir / "predictions.jsonl", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            raw = json.loads(line)
            predictions.append((raw["unit_id"], raw["labels"]))
    return predictions


def emotion_rows(predictions, kept, key_of, zero_keys):
    counts = {key: [0] * 10 for key in zero_keys}
    for sid_key in key_of.values():
        counts.setdefault(sid_key, [0] * 10)
    for unit_id, labels in predictions:
        sid = unit_id.split("#", 1)[0]
        cells = counts[key_of[sid]]
        for i, bit in enumerate(labels):
            cells[i] += bit
    rows = []
    for key in sorted(counts):
        rows.append([key] + [f64(float(c)) for c in counts[key]])
    return rows


def chunk_score(labels):
    score = 0.0
    for i, bit in enumerate(labels):
        if bit:
            score += POLARITY_WEIGHTS[i]
    return score


def polarity_tables(predictions, kept):
    chunk_rows = []
    by_song = {}
    for unit_id, labels in predictions:
        score = chunk_score(labels)
        negative = "true" if score <= POLARITY_THRESHOLD else "false"
        chunk_rows.append([unit_id, f64(score), negative])
        by_song.setdefault(unit_id.split("#", 1)[0], []).append(score)

    song_rows = []
    song_means = {}
    for sid in sorted(by_song):
        scores = by_song[sid]
        total = 0.0
        for score in scores:
            total += score
        mean = total / len(scores)
        song_means[sid] = mean
        negative = "true" if mean <= POLARITY_THRESHOLD else "false"
        song_rows.append([sid, str(len(scores)), f64(mean), negative])

    def grouped(key_fn):
        sums = {}
        for record in kept:
            mean = song_means.get(record["song_id"])
            if mean is None:
                continue
            slot = sums.setdefault(key_fn(record), [0.0, 0])
            slot[0] += mean
            slot[1] += 1
        rows = []
        for key in sorted(sums):
            total, count = sums[key]
            rows.append([key, f64(total / count), f64(float(count))])
        return rows

    year_rows = grouped(lambda r: str(r["year"]))
    year_genre_rows = grouped(lambda r: f"{r['year']}:{r['genre']}")
    return chunk_rows, song_rows, year_rows, year_genre_rows


def provider_comparison(kept, flags):
    tp = fp = fn = tn = 0
    for record in kept:
        label = record["explicit_label"]
        flag = flags.get(record["song_id"])
        if label is None or flag is None:
            continue
        if flag and label:
            tp += 1
        elif flag and not label:
            fp += 1
        elif not flag and label:
            fn += 1
        else:
            tn += 1
    total = tp + fp + fn + tn
    accuracy = (tp + tn) / total
    denominator = 2 * tp + fp + fn
    f1 = 0.0 if denominator == 0 else 2.0 * tp / denominator
    return {
        "true_positive": tp,
        "false_positive": fp,
        "false_negative": fn,
        "true_negative": tn,
        "accuracy": accuracy,
        "f1": f1,
    }


# ---------------------------------------------------------------------------
# Case-study recomputation for the chain's sample song
# ---------------------------------------------------------------------------


def load_valence():
    valence = {}
    with open(ROOT / "data" / "valence.csv", encoding="utf-8") as handle:
        for i, line in enumerate(handle.read().split("\n")):
            if i == 0 or not line.strip():
                continue
            token, value = line.split(",", 1)
            valence[token.strip().lower()] = float(value.strip())
    return valence


def reference_valence(text, valence):
    total, hits = 0.0, 0
    for token in text.split():
        if token in valence:
            total += valence[token]
            hits += 1
    if hits == 0:
        return 0.0
    return max(-1.0, min(1.0, total / hits))


def case_study_rows(doc, labels_of, lexicon, valence):
    rows = []
    for cid, tokens in doc["chunks"]:
        text = " ".join(tokens)
        labels = labels_of[f"{doc['song_id']}#{cid}"]
        names = [LABEL_NAMES[i] for i, bit in enumerate(labels) if bit]
        emotions = ", ".join(names) if names else "N/A"
        distinct, _, _ = textops.count_chunk(tokens, lexicon)
        rows.append(
            [
                cid,
                text,
                emotions,
                str(distinct),
                f64(chunk_score(labels)),
                f64(reference_valence(text, valence)),
            ]
        )
    return rows


def render_case_table(title, rows):
    headers = [
        "section", "chunk_text", "emotions",
        "abusive_distinct", "polarity_score", "reference_valence",
    ]
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

    out = [title, line(headers), "-" * (sum(widths) + 2 * (len(widths) - 1))]
    out.extend(line(row) for row in rows)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Verification driver
# ---------------------------------------------------------------------------

GOLDEN_FILES = [
    "pct_explicit_by_year.csv",
    "genre_distribution.csv",
    "word_counts_by_year.csv",
    "ngrams_1990-2005.csv",
    "ngrams_2006-2016.csv",
    "ngrams_2017-2024.csv",
    "emotion_by_decade.csv",
    "emotion_by_genre.csv",
    "polarity_by_year.csv",
    "polarity_by_year_genre.csv",
    "polarity_chunks.csv",
    "polarity_songs.csv",
    "explicit_flags.json",
    "provider_comparison.json",
    "eval_report.csv",
    "epoch_losses.csv",
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("run_dir", type=Path, help="output directory of a chain run")
    parser.add_argument(
        "--freeze",
        action="store_true",
        help="copy verified outputs into data/goldens/ when every check passes",
    )
    args = parser.parse_args()
    run = args.run_dir

    tables = textops.load_contractions(ROOT / "data" / "contractions.json")
    lexicon = textops.load_lexicon(ROOT / "data" / "lexicon.txt")
    valence = load_valence()

    # Corpus reconstruction.
    entries = load_chart_entries()
    records = dedupe(entries)
    enriched = enrich(records)
    post_1990 = [r for r in enriched if r["year"] >= 1990]
    kept = filter_records(enriched)
    docs = parse_docs(kept, tables)
    year_of = {r["song_id"]: r["year"] for r in kept}
    chunk_count = sum(len(d["chunks"]) for d in docs)

    counts = {
        "chart_entries": len(entries),
        "deduped_songs": len(records),
        "post_1990": len(post_1990),
        "kept_english": len(kept),
        "parsed_docs": len(docs),
        "chunks": chunk_count,
    }
    print("counts:", json.dumps(counts))

    # Stage manifests carry in/out counts; cross-check them.
    def summary_of(stage):
        return json.load(open(run / f"manifest_{stage}.json"))["summary"]

    check(
        "ingest counts match manifest",
        summary_of("ingest") == f"in={len(entries)} out={len(records)}",
        summary_of("ingest"),
    )
    check(
        "filter counts match manifest",
        summary_of("filter") == f"in={len(records)} out={len(kept)}",
        summary_of("filter"),
    )
    check(
        "parse counts match manifest",
        summary_of("parse") == f"in={len(kept)} out={len(docs)}",
        summary_of("parse"),
    )

    # Corpus-level tables.
    check_bytes(
        "pct_explicit_by_year.csv",
        csv_text(
            ["year", "labeled_count", "explicit_count", "unlabeled_count", "pct_explicit"],
            pct_explicit_rows(kept),
        ),
        run / "pct_explicit_by_year.csv",
    )
    check_bytes(
        "genre_distribution.csv",
        csv_text(["genre", "count", "pct"], genre_rows(kept)),
        run / "genre_distribution.csv",
    )
    check_bytes(
        "word_counts_by_year.csv",
        csv_text(
            ["year", "total_tokens", "abusive_occurrences", "pct_abusive"],
            word_count_rows(docs, year_of, lexicon),
        ),
        run / "word_counts_by_year.csv",
    )

    for label, rows in ngram_tables(docs, year_of):
        text = csv_text(
            [f"gram_{i}" for i in range(1, NGRAM_N + 1)] + ["count"],
            [list(gram) + [str(count)] for gram, count in rows],
        )
        check_bytes(f"ngrams_{label}.csv", text, run / f"ngrams_{label}.csv")

    # Abuse profiles and explicit flags.
    profiles = abuse_profiles(docs, lexicon)
    flags = {p["song_id"]: p["song_occurrences"] >= MIN_OCCURRENCES for p in profiles}
    run_flags = json.load(open(run / "explicit_flags.json"))
    check(
        "explicit_flags.json",
        run_flags == flags,
        f"{sum(run_flags.values())} flagged in run vs {sum(flags.values())} recomputed",
    )
    run_profiles = [
        json.loads(line)
        for line in open(run / "abuse_profiles.jsonl", encoding="utf-8")
        if line.strip()
    ]
    check(
        "abuse_profiles.jsonl",
        run_profiles == profiles,
        f"{len(run_profiles)} profiles in run vs {len(profiles)} recomputed",
    )

    # Prediction-keyed tables. The unit-id sequence doubles as a check that
    # section parsing and chunking agree between the two implementations.
    predictions = load_predictions(run)
    expected_units = [
        f"{doc['song_id']}#{cid}" for doc in docs for cid, _ in doc["chunks"]
    ]
    check(
        "prediction unit ids match recomputed chunking",
        [u for u, _ in predictions] == expected_units,
        f"{len(predictions)} predictions vs {len(expected_units)} chunks",
    )

    decade_of = {r["song_id"]: str(r["decade"]) for r in kept}
    genre_of = {r["song_id"]: r["genre"] for r in kept}
    check_bytes(
        "emotion_by_decade.csv",
        csv_text(
            ["decade"] + LABEL_KEYS,
            emotion_rows(predictions, kept, decade_of, zero_keys=[]),
        ),
        run / "emotion_by_decade.csv",
    )
    check_bytes(
        "emotion_by_genre.csv",
        csv_text(
            ["genre"] + LABEL_KEYS,
            emotion_rows(predictions, kept, genre_of, zero_keys=GENRES_ALL),
        ),
        run / "emotion_by_genre.csv",
    )

    chunk_rows, song_rows, year_rows, year_genre_rows = polarity_tables(
        predictions, kept
    )
    check_bytes(
        "polarity_chunks.csv",
        csv_text(["unit_id", "score", "negative"], chunk_rows),
        run / "polarity_chunks.csv",
    )
    check_bytes(
        "polarity_songs.csv",
        csv_text(["song_id", "chunk_count", "mean_score", "negative"], song_rows),
        run / "polarity_songs.csv",
    )
    check_bytes(
        "polarity_by_year.csv",
        csv_text(["year", "mean_polarity", "song_count"], year_rows),
        run / "polarity_by_year.csv",
    )
    check_bytes(
        "polarity_by_year_genre.csv",
        csv_text(["year:genre", "mean_polarity", "song_count"], year_genre_rows),
        run / "polarity_by_year_genre.csv",
    )

    comparison = provider_comparison(kept, flags)
    run_comparison = json.load(open(run / "provider_comparison.json"))
    check(
        "provider_comparison.json",
        run_comparison == comparison,
        f"run {run_comparison} vs recomputed {comparison}",
    )

    # Case study for the chain's sample song.
    labels_of = dict(predictions)
    case_docs = [d for d in docs if (run / f"case_study_{d['song_id']}.csv").exists()]
    check("chain produced at least one case study", len(case_docs) >= 1)
    for doc in case_docs:
        sid = doc["song_id"]
        rows = case_study_rows(doc, labels_of, lexicon, valence)
        check_bytes(
            f"case_study_{sid}.csv",
            csv_text(
                [
                    "section", "chunk_text", "emotions",
                    "abusive_distinct", "polarity_score", "reference_valence",
                ],
                rows,
            ),
            run / f"case_study_{sid}.csv",
        )
        check_bytes(
            f"case_study_{sid}.txt",
            render_case_table(f"case study: {sid}", rows),
            run / f"case_study_{sid}.txt",
        )

    failures = [name for name, ok, _ in CHECKS if not ok]
    print(f"\n{len(CHECKS) - len(failures)}/{len(CHECKS)} checks passed")
    if failures:
        print("failed:", ", ".join(failures))
        return 1

    if args.freeze:
        GOLDENS.mkdir(parents=True, exist_ok=True)
        frozen = list(GOLDEN_FILES)
        frozen.extend(
            f"case_study_{d['song_id']}.{ext}" for d in case_docs for ext in ("csv", "txt")
        )
        for name in frozen:
            shutil.copyfile(run / name, GOLDENS / name)
        (GOLDENS / "counts.json").write_text(
            json.dumps(counts, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"froze {len(frozen) + 1} goldens into {GOLDENS}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
