"""Python ports of the crate's text and identity primitives.

Used by `make_fixtures.py` (to key provider fixtures by song id) and by
`oracle_pipeline.py` (to recompute pipeline outputs by brute force, without
touching the Rust implementation). Every function here mirrors the library's
documented behavior for the inputs the fixtures actually use: ASCII-safe
titles, `\n` line endings, lowercase lexicon terms.
"""

import hashlib
import json

# --------------------------------------------------------------------------
# Title and artist normalization
# --------------------------------------------------------------------------


def normalize_title(raw):
    """Cut at the first '/', drop balanced (...) groups, collapse spaces."""
    head = raw.split("/", 1)[0]
    stack, spans = [], []
    for i, ch in enumerate(head):
        if ch == "(":
            stack.append(i)
        elif ch == ")":
            if stack:
                spans.append((stack.pop(), i + 1))
    if spans:
        spans.sort()
        out, keep_from = [], 0
        for start, end in spans:
            if start >= keep_from:
                out.append(head[keep_from:start])
                keep_from = end
        out.append(head[keep_from:])
        head = "".join(out)
    return " ".join(head.split())


_TAG_WORDS = {"featuring", "feat.", "feat", "ft.", "ft", "with"}


def _find_tag_hits(tokens, head_required):
    hits = []
    i = 0
    while i < len(tokens):
        left_ok = i > 0 or not head_required
        word = tokens[i].lower().rstrip(",")
        hit = None
        if left_ok:
            if (
                word == "duet"
                and i + 1 < len(tokens)
                and tokens[i + 1].lower() == "with"
            ):
                hit = 2
            elif word in _TAG_WORDS:
                hit = 1
            elif word == "x" and i > 0 and i + 1 < len(tokens):
                hit = 1
        if hit:
            hits.append((i, hit))
            i += hit
        else:
            i += 1
    return hits


def _push_comma_names(segment, names):
    for part in segment.split(","):
        name = " ".join(part.split())
        if name:
            names.append(name)


def _split_credit(fragment, head_is_primary):
    tokens = fragment.split()
    hits = _find_tag_hits(tokens, head_is_primary)
    segments, cursor = [], 0
    for index, length in hits:
        segments.append(" ".join(tokens[cursor:index]))
        cursor = index + length
    segments.append(" ".join(tokens[cursor:]))
    names = []
    if head_is_primary:
        for segment in segments[1:]:
            _push_comma_names(segment, names)
        head = " ".join(segments[0].split())
    else:
        for segment in segments:
            _push_comma_names(segment, names)
        head = ""
    return head, names


def normalize_artist(raw):
    """Return (primary, featured) for a raw artist credit."""
    outside, groups = [], []
    depth, group_start = 0, 0
    for i, ch in enumerate(raw):
        if ch == "(":
            if depth == 0:
                group_start = i + 1
            depth += 1
        elif ch == ")":
            if depth > 0:
                depth -= 1
                if depth == 0:
                    groups.append(raw[group_start:i])
            else:
                outside.append(ch)
        elif depth == 0:
            outside.append(ch)
    if depth > 0:
        groups.append(raw[group_start:])
    primary, featured = _split_credit("".join(outside), True)
    for group in groups:
        _, names = _split_credit(group, False)
        featured.extend(names)
    seen, distinct = set(), []
    for name in featured:
        key = name.lower()
        if key not in seen:
            seen.add(key)
            distinct.append(name)
    return primary, distinct


def song_id(title, artist_primary):
    """First 8 bytes of SHA-256 over the lowercased identity key, as hex."""
    key = (title.lower() + "\x1f" + artist_primary.lower()).encode("utf-8")
    return hashlib.sha256(key).hexdigest()[:16]


# --------------------------------------------------------------------------
# Text standardization
# --------------------------------------------------------------------------


def load_contractions(path):
    raw = json.load(open(path, encoding="utf-8"))
    exact, suffixes = {}, []
    for key, value in raw.items():
        if key.startswith("'") or key == "n't":
            suffixes.append((key, value))
        else:
            exact[key] = value
    suffixes.sort(key=lambda kv: (-len(kv[0]), kv[0]))
    return exact, suffixes


def _expand(token, tables):
    exact, suffixes = tables
    if token in exact:
        return exact[token]
    for suffix, replacement in suffixes:
        if len(token) > len(suffix) and token.endswith(suffix):
            return token[: len(token) - len(suffix)] + replacement
    return token


def _is_kept(c, with_apostrophe):
    if "a" <= c <= "z" or "0" <= c <= "9" or c == "*":
        return True
    return with_apostrophe and c == "'"


def standardize_text(raw, tables):
    """Lowercase, expand contractions, keep [a-z0-9*], collapse spaces."""
    words = []
    for raw_token in raw.split():
        lowered = raw_token.lower().replace("’", "'")
        kept = "".join(c for c in lowered if _is_kept(c, True))
        if not kept:
            continue
        for word in _expand(kept, tables).split():
            cleaned = "".join(c for c in word if _is_kept(c, False))
            if cleaned:
                words.append(cleaned)
    return " ".join(words)


# --------------------------------------------------------------------------
# Promo stripping
# --------------------------------------------------------------------------


def _remove_see_live(text):
    out, rest = [], text
    while True:
        start = rest.find("See ")
        if start == -1:
            break
        after = rest[start + 4 :]
        window = after[:60]
        pos = window.find(" Live")
        if pos != -1 and "\n" not in window[:pos]:
            out.append(rest[:start])
            rest = rest[start + 4 + pos + 5 :]
        else:
            out.append(rest[: start + 4])
            rest = rest[start + 4 :]
    out.append(rest)
    return "".join(out)


def _remove_ticket_teaser(text):
    needle = "Get tickets as low as"
    out, rest = [], text
    while True:
        start = rest.find(needle)
        if start == -1:
            break
        out.append(rest[:start])
        after = rest[start + len(needle) :]
        cut = 0
        i = 0
        while i < len(after):
            ch = after[i]
            if ch == "\n":
                break
            if ch.isascii() and ch.isdigit():
                j = i
                while j < len(after) and after[j].isascii() and after[j].isdigit():
                    j += 1
                cut = j
                break
            i += 1
        rest = after[cut:]
    out.append(rest)
    return "".join(out)


def _remove_embed_trailer(text):
    trimmed = text.rstrip()
    if not trimmed.endswith("Embed"):
        return text
    without = trimmed[: -len("Embed")]
    without = without.rstrip(" ")
    without = without.rstrip("0123456789")
    return without.rstrip()


def strip_promo(raw):
    text = raw
    while True:
        before = len(text)
        text = text.replace("You might also like", "")
        text = _remove_see_live(text)
        text = _remove_ticket_teaser(text)
        if len(text) == before:
            break
    return _remove_embed_trailer(text)


# --------------------------------------------------------------------------
# Sections and chunks
# --------------------------------------------------------------------------


def _parse_header(line):
    trimmed = line.strip()
    if len(trimmed) < 2 or not (trimmed.startswith("[") and trimmed.endswith("]")):
        return None
    inner = trimmed[1:-1]
    if "[" in inner or "]" in inner:
        return None
    name = inner.split(":", 1)[0].strip()
    return name or None


def parse_sections(raw, tables):
    """Return [(name, ordinal, standardized_body)] in document order."""
    pending, lead = [], []
    saw_header = False
    for line in raw.split("\n"):
        name = _parse_header(line)
        if name is not None:
            saw_header = True
            pending.append((name, []))
        elif pending:
            pending[-1][1].append(line)
        else:
            lead.append(line)
    raw_sections = []
    lead_text = "\n".join(lead)
    if lead_text.strip():
        raw_sections.append(("Intro" if saw_header else "Full", lead_text))
    for name, body in pending:
        raw_sections.append((name, "\n".join(body)))

    sections, name_counts = [], {}
    for name, body in raw_sections:
        ordinal = name_counts.get(name, 0) + 1
        name_counts[name] = ordinal
        sections.append((name, ordinal, standardize_text(body, tables)))
    return sections


def chunk_id(name, ordinal, split):
    out = f"[{name}]"
    if ordinal > 1:
        out += f"({ordinal})"
    if split is not None:
        out += f"_{split}"
    return out


def chunk_sections(sections, budget):
    """Return [(chunk_id, tokens)] for the parsed sections."""
    chunks = []
    for name, ordinal, body in sections:
        tokens = body.split()
        if not tokens:
            continue
        pieces = [tokens[i : i + budget] for i in range(0, len(tokens), budget)]
        split_section = len(pieces) > 1
        for i, piece in enumerate(pieces):
            split = i + 1 if split_section else None
            chunks.append((chunk_id(name, ordinal, split), piece))
    return chunks


# --------------------------------------------------------------------------
# Abusive-term lexicon
# --------------------------------------------------------------------------


def load_lexicon(path):
    terms, censored = set(), {}
    for raw_line in open(path, encoding="utf-8").read().split("\n"):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            pattern, canonical = line.split("->", 1)
            censored[pattern.strip().lower()] = canonical.strip().lower()
        else:
            terms.add(line.lower())
    return terms, sorted(censored.items())


def match_token(token, lexicon):
    terms, censored = lexicon
    if token in terms:
        return token
    for pattern, canonical in censored:
        if len(pattern) == len(token) and all(
            p == "*" or p == t for p, t in zip(pattern, token)
        ):
            return canonical
    return None


def count_chunk(tokens, lexicon):
    """Return (distinct, occurrences, sorted_terms) for one token list."""
    found = []
    for token in tokens:
        term = match_token(token, lexicon)
        if term is not None:
            found.append(term)
    distinct = sorted(set(found))
    return len(distinct), len(found), distinct


# --------------------------------------------------------------------------
# Float formatting
# --------------------------------------------------------------------------


def rust_f64(value):
    """Format a float the way the library's CSV writers do.

    Integral values print without a fractional part; everything else uses
    the shortest decimal that round-trips, which CPython's repr also
    produces. Exponent notation never appears in the value ranges the
    goldens cover, and the assertion guards that.
    """
    if value != value or value in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite value {value!r}")
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    text = repr(value)
    assert "e" not in text and "E" not in text, text
    return text
