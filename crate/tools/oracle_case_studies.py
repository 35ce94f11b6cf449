#!/usr/bin/env python3
"""Independent checker for data/case_studies/rows.json.

Recomputes every derivable column of the case-study reference tables from
first principles (hard-coded weights and term list, no project code) and
fails loudly on any mismatch. Rows flagged `excluded` must *fail* the
polarity recomputation; that is what justifies their exclusion.

On success, writes data/case_studies/expected.json holding the derived
song-level aggregates the test suite pins against.
"""

import json
import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
ROWS = ROOT / "data" / "case_studies" / "rows.json"
OUT = ROOT / "data" / "case_studies" / "expected.json"

# Emotion -> polarity weight. A chunk's score is the sum of the weights of
# its recorded emotions; no emotions means 0.
WEIGHTS = {
    "Optimistic": 0.3,
    "Thankful": 0.2,
    "Empathetic": 0.0,
    "Pessimistic": -0.3,
    "Anxious": -0.2,
    "Sad": -0.2,
    "Annoyed": -0.1,
    "Denial": -0.1,
    "Official": 0.0,
    "Joking": 0.0,
}

# Abusive terms counted by the reference tables (distinct terms per chunk).
TERMS = {"shit", "bitch", "nigga", "niggas", "fuck", "ass"}

THRESHOLD = -0.15

EXPECTED_ROW_COUNTS = {
    "who_is_it": 22,
    "back_in_blood": 19,
    "passionate_kisses": 11,
    "xanax_damage": 9,
    "in_the_end": 14,
}

TEXT_RE = re.compile(r"^[a-z0-9]+( [a-z0-9]+)*$")


def approx(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    data = json.loads(ROWS.read_text())
    failures = []
    expected = {"threshold": THRESHOLD, "songs": {}}

    total_rows = 0
    for song in data["songs"]:
        key = song["key"]
        rows = song["rows"]
        total_rows += len(rows)

        if len(rows) != EXPECTED_ROW_COUNTS.get(key):
            failures.append(
                f"{key}: {len(rows)} rows, expected {EXPECTED_ROW_COUNTS.get(key)}"
            )

        recomputed = []
        distinct_counts = []
        occurrence_counts = []
        excluded_labels = []

        for i, row in enumerate(rows):
            where = f"{key} row {i + 1} ({row['label']})"

            if not TEXT_RE.match(row["text"]):
                failures.append(f"{where}: text is not clean lowercase tokens")

            for emo in row["emotions"]:
                if emo not in WEIGHTS:
                    failures.append(f"{where}: unknown emotion {emo!r}")

            score = round(sum(WEIGHTS.get(e, 0.0) for e in row["emotions"]), 10)
            recomputed.append(score)

            tokens = row["text"].split()
            present = sorted(t for t in set(tokens) if t in TERMS)
            distinct = len(present)
            occurrences = sum(1 for t in tokens if t in TERMS)
            distinct_counts.append(distinct)
            occurrence_counts.append(occurrences)

            if row.get("excluded"):
                excluded_labels.append(row["label"])
                if approx(score, row["polarity"]):
                    failures.append(
                        f"{where}: marked excluded but recomputed score "
                        f"{score} matches the recorded {row['polarity']}"
                    )
            else:
                if not approx(score, row["polarity"]):
                    failures.append(
                        f"{where}: recomputed score {score} != recorded "
                        f"{row['polarity']} (emotions {row['emotions']})"
                    )

            if distinct != row["abusive"]:
                failures.append(
                    f"{where}: distinct abusive terms {present} -> {distinct} "
                    f"!= recorded {row['abusive']}"
                )

            # Structural sanity: split index within bounds.
            if not (1 <= row["split"] <= row["splits"]):
                failures.append(f"{where}: split {row['split']}/{row['splits']}")

        mean = sum(recomputed) / len(recomputed) if recomputed else 0.0
        expected["songs"][key] = {
            "title": song["title"],
            "rows": len(rows),
            "excluded_labels": excluded_labels,
            "recomputed_polarities": recomputed,
            "mean_polarity": mean,
            "negative_at_threshold": mean <= THRESHOLD,
            "abusive_distinct_per_chunk": distinct_counts,
            "abusive_occurrences_per_chunk": occurrence_counts,
            "abusive_occurrences_total": sum(occurrence_counts),
        }

    if total_rows != sum(EXPECTED_ROW_COUNTS.values()):
        failures.append(f"total rows {total_rows} != {sum(EXPECTED_ROW_COUNTS.values())}")

    want_excluded = {
        "passionate_kisses": ["[Verse 1]"],
        "in_the_end": ["[Chorus]"],
        "who_is_it": [],
        "back_in_blood": [],
        "xanax_damage": [],
    }
    for key, labels in want_excluded.items():
        got = expected["songs"][key]["excluded_labels"]
        if got != labels:
            failures.append(f"{key}: excluded rows {got}, expected {labels}")

    if failures:
        print(f"FAIL: {len(failures)} problem(s)")
        for f in failures:
            print(f"  - {f}")
        sys.exit(1)

    OUT.write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
    print(f"OK: {total_rows} rows across {len(data['songs'])} songs verified")
    for key, info in sorted(expected["songs"].items()):
        print(
            f"  {key}: mean polarity {info['mean_polarity']:+.6f}, "
            f"negative={info['negative_at_threshold']}, "
            f"abusive occurrences {info['abusive_occurrences_total']}"
        )
    print(f"wrote {OUT.relative_to(ROOT)}")


if __name__ == "__main__":
    main()
