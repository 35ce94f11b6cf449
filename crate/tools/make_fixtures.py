#!/usr/bin/env python3
"""Deterministic fixture generator for the pipeline tests.

Produces, under data/fixtures/:

- chart.csv            — 342 weekly chart rows covering 100 distinct songs
                         spanning 1958-2024, with respelled duplicates that
                         must collapse during dedup
- providers/*.json     — three metadata provider fixtures keyed by song id
                         (explicit flag, lyrics, genre; fields deliberately
                         scattered across providers)
- senwave.csv          — 400 synthetic labeled examples for the classifier
- songs_meta.json      — ground-truth sidecar: per song, the designated
                         language and intent, so tests can assert retention

The corpus is engineered, not sampled: every song's language, genre,
explicitness, and lyric structure is chosen to exercise a specific pipeline
path (pre-1990 window cut, non-English removal including a single injected
foreign verse, censored profanity spellings, recurring chorus names, promo
debris, split-size sections). Regenerating with the same seed reproduces
the same bytes.
"""

import csv
import datetime as dt
import json
import pathlib
import random

from textops import normalize_artist, normalize_title, song_id

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "data" / "fixtures"

rng = random.Random(72024)

# --------------------------------------------------------------------------
# Lyric line pools
# --------------------------------------------------------------------------

EN_VERSE_LINES = [
    "I was walking down the empty road when the morning came around",
    "All the lights across the water keep on calling out my name",
    "We were young and we were reckless running wild into the night",
    "Every mile along the highway brings me closer to your door",
    "There's a photograph I carry from the summer we were free",
    "I remember how you told me that the rain would pass us by",
    "In the quiet of the evening I can hear the city breathe",
    "All my friends are in the kitchen and the radio is on",
    "Take my hand and tell me slowly everything you meant to say",
    "I've been counting every hour since you left me at the shore",
    "The old guitar is out of tune but I still play it anyway",
    "Golden fields behind the station where we used to watch the trains",
    "You were standing in the doorway with the winter in your eyes",
    "Nothing here is like I left it but the river still runs south",
    "I keep a candle in the window for the nights you don't come home",
    "We drove all night through the desert with the windows rolled down low",
    "Somewhere past the county line the sky turned every shade of red",
    "My father said the land remembers every promise that we break",
    "Hold on to the little moments they are gone before you know",
    "The band was playing something slow and nobody wanted to leave",
]

EN_CHORUS_LINES = [
    "And we sing it loud tonight we are never coming down",
    "Oh the fire in our hearts keeps on burning like the sun",
    "Say you'll stay another day and we'll dance until the dawn",
    "Love is louder than the thunder rolling over us tonight",
    "We are golden we are young and the night belongs to us",
    "Carry me home down the river to the place where we began",
    "Every heartbeat is a drum and the whole world sings along",
    "Don't let go of what we found underneath the summer sky",
    "Stay hopeful darling stay hopeful the morning is ours",
    "I'm grateful for the light so grateful for your love",
    "Hopeful hearts keep dancing we are hopeful through the storm",
]

EN_BRIDGE_LINES = [
    "When the morning finds us we will still be holding on",
    "And if the world gets heavy I will carry half for you",
    "All the noise will fade away and only we remain",
    "One more mile one more minute one more reason to believe",
]

EN_SAD_LINES = [
    "I'm lonely in a crowded room and nobody can tell",
    "These tears won't dry until you say my name again",
    "The house is cold without you and the walls forget our songs",
    "I lost the map that led me back to who I used to be",
    "Goodbye is just a word until it's standing at your door",
    "Don't tell me that it's over when my heart is still awake",
    "Tears on the pillow tears on the floor and tears in the rain",
    "I cried through the winter and the tears still find me now",
    "So worried about tomorrow worried sick about today",
    "It all feels hopeless now hopeless since you went away",
    "Lonely nights and lonely mornings and the tears keep coming down",
]

# Lines that carry lexicon terms; heavier songs draw from both lists.
PROFANE_MILD = [
    "I don't give a damn what they say about us now",
    "This whole damn town keeps talking but they don't know anything",
    "Life's a mess and I'm pissed but I wear it like a crown",
    "Kicked out the house like a bastard in the rain",
]

PROFANE_HEAVY = [
    "I'm that nigga from the corner and I never switched my lane",
    "These niggas talking shit but they won't say it to my face",
    "Fuck the fame and fuck the money I was hungry in the dark",
    "Count my cash and talk my shit because I earned it on my own",
    "Bad bitch on my left side and my brothers on my right",
    "Keep that ass out of my business or we got a fucking problem",
    "Pull up with the squad and all these bitches know my name",
    "They pissed off that we made it out the bottom motherfucker",
    "All this fake talk is annoying man annoying every day",
    "So annoying how they lie about the shit we had to lose",
]

PROFANE_CENSORED = [
    "You a b*tch and everybody in the city knows the truth",
    "These n*ggas keep on talking but they never leave the porch",
    "Spent my last d*mn dollar on a dream they said would fail",
]

ES_LINES = [
    "Esta noche bailamos juntos bajo la luna llena del verano",
    "Tu mirada me enciende el alma y no puedo dejar de pensarte",
    "Dame la mano y vamos corriendo por las calles de la ciudad",
    "El corazon me late fuerte cuando dices mi nombre despacio",
    "No me importa lo que digan yo te sigo hasta el final del mundo",
    "La musica nos lleva lejos donde nadie puede encontrarnos",
    "Quiero verte sonreir cada manana cuando sale el sol",
    "Somos fuego somos viento somos olas contra la orilla",
    "Si te vas se apagan todas las estrellas de mi cielo",
    "Baila conmigo hasta que el dia nos encuentre abrazados",
    "Las palabras ya no alcanzan para todo lo que siento",
    "Vamos a perdernos juntos donde termina la carretera",
]

KO_LINES = [
    "neoui nunbit soge bichin nae moseubi nareul seolleige hae",
    "oneul bam byeolbit arae urin hamkke chumeul chugo isseo",
    "saranghae ireon nae mameul neoege jeonhago sipeo",
    "gyeoul barami bulmyeon nae pume angigo sipdago malhae jwo",
    "haneul wie tteooreun dari uri gireul balkge bichwo jwo",
    "nae mameul aneunji moreuneunji neon geujeo utgo isseo",
    "dasi mannan uri dureun yeojeonhi seotureuge seoro baraboa",
    "bamhaneul byeoldeuri neoui eolgul wie naeryeo anja isseo",
    "geu nalui gieokdeuri ajikdo nae mame namaisseo",
    "uriui norae ga kkeutnaji anhge hamkke bulleo jwo",
]


def pick(pool, count):
    return [rng.choice(pool) for _ in range(count)]


# Refrain lines built around the classifier anchors. Repetition within a
# line mirrors how hooks actually repeat, and it concentrates enough
# anchor mass in a chunk for the trained model to label it.
MOOD_LINES = {
    "sad": [
        "Tears and tears and tears keep falling down tonight",
        "I cried and cried and the tears won't leave my eyes",
        "Lonely tears and lonely nights and lonely tears again",
        "Worried sick and worried still so worried for my heart",
        "Hopeless mornings hopeless evenings everything is hopeless now",
        "The tears the tears they follow me through every empty room",
    ],
    "upbeat": [
        "Hopeful hopeful we stay hopeful through the night",
        "So grateful so grateful for the love you give to me",
        "Stay hopeful keep it hopeful we are hopeful till the dawn",
        "Grateful hearts and grateful hands we are grateful for it all",
        "Hopeful in the morning hopeful when the lights go down",
    ],
    "annoyed": [
        "Annoying voices annoying lies so annoying every day",
        "So annoying all this talking annoying all this noise",
        "You are annoying and your games are annoying me again",
    ],
}


def english_lyrics(style, profane, mood):
    """Assemble a structured English lyric for one song."""
    mood_pool = MOOD_LINES.get(mood)

    def verse(n):
        lines = pick(EN_VERSE_LINES, n - 1 if mood_pool else n)
        if mood_pool:
            lines.append(rng.choice(mood_pool))
            rng.shuffle(lines)
        return "\n".join(lines)

    if mood_pool:
        # Hooks repeat: the first mood line opens and closes the chorus.
        hook, second = pick(mood_pool, 2)
        chorus = "\n".join([hook, second, rng.choice(EN_CHORUS_LINES), hook])
    else:
        chorus = "\n".join(pick(EN_CHORUS_LINES, 4))
    profane_lines = []
    if profane == 1:
        profane_lines = pick(PROFANE_MILD, rng.randint(1, 2))
    elif profane == 2:
        profane_lines = pick(PROFANE_HEAVY, rng.randint(4, 6)) + pick(
            PROFANE_MILD, rng.randint(1, 2)
        )
    elif profane == 3:
        profane_lines = pick(PROFANE_CENSORED, 2) + pick(PROFANE_HEAVY, 2)

    if style == "plain":
        # No headers at all: the whole text becomes one Full section.
        lines = pick(EN_VERSE_LINES, 6) + profane_lines + pick(EN_CHORUS_LINES, 2)
        if mood_pool:
            lines += pick(mood_pool, 2)
        return "\n".join(lines)
    if style == "intro_lead":
        # Loose lines before the first header become an Intro section.
        lead = "\n".join(pick(EN_VERSE_LINES, 2))
        body = verse(4)
        if profane_lines:
            body += "\n" + "\n".join(profane_lines)
        return f"{lead}\n[Verse 1]\n{body}\n[Chorus]\n{chorus}\n[Chorus]\n{chorus}"
    if style == "long":
        # Eight-line verses overflow the default 40-token budget and split.
        v1 = verse(8)
        v2 = verse(8)
        if profane_lines:
            v2 += "\n" + "\n".join(profane_lines)
        bridge = "\n".join(pick(EN_BRIDGE_LINES, 2))
        return (
            f"[Verse 1]\n{v1}\n[Chorus]\n{chorus}\n[Verse 2]\n{v2}\n"
            f"[Chorus]\n{chorus}\n[Bridge]\n{bridge}\n[Chorus]\n{chorus}"
        )
    if style == "sad":
        sad_pool = MOOD_LINES["sad"]
        # Hooks stay on the "tears" motif so the refrain reads as one idea.
        tears = [l for l in sad_pool if "tears" in l.lower() or "cried" in l.lower()]
        v1 = "\n".join(pick(EN_SAD_LINES, 2) + pick(tears, 2))
        v2 = "\n".join(pick(EN_SAD_LINES, 1) + pick(tears, 1) + pick(sad_pool, 1) + pick(EN_VERSE_LINES, 1))
        if profane_lines:
            v2 += "\n" + "\n".join(profane_lines)
        hook = rng.choice(tears)
        second = next(l for l in sad_pool if "worried" in l.lower())
        sad_chorus = "\n".join([hook, second, rng.choice(tears), hook])
        return f"[Verse 1]\n{v1}\n[Chorus]\n{sad_chorus}\n[Verse 2]\n{v2}\n[Chorus]\n{sad_chorus}"
    # Default structure: two verses, thrice-sung chorus, bridge.
    v1 = verse(4)
    v2 = verse(4)
    if profane_lines:
        v1 += "\n" + "\n".join(profane_lines[: len(profane_lines) // 2 + 1])
        v2 += "\n" + "\n".join(profane_lines[len(profane_lines) // 2 + 1 :])
    bridge = "\n".join(pick(EN_BRIDGE_LINES, 2))
    return (
        f"[Verse 1]\n{v1}\n[Chorus]\n{chorus}\n[Verse 2]\n{v2}\n"
        f"[Chorus]\n{chorus}\n[Bridge]\n{bridge}\n[Chorus]\n{chorus}"
    )


def spanish_lyrics():
    v1 = "\n".join(pick(ES_LINES, 4))
    chorus = "\n".join(pick(ES_LINES, 3))
    v2 = "\n".join(pick(ES_LINES, 4))
    return f"[Verse 1]\n{v1}\n[Chorus]\n{chorus}\n[Verse 2]\n{v2}\n[Chorus]\n{chorus}"


def korean_lyrics():
    v1 = "\n".join(pick(KO_LINES, 4))
    chorus = "\n".join(pick(KO_LINES, 3))
    v2 = "\n".join(pick(KO_LINES, 4))
    return f"[Verse 1]\n{v1}\n[Chorus]\n{chorus}\n[Verse 2]\n{v2}\n[Chorus]\n{chorus}"


def injected_verse_lyrics():
    """Mostly English, with one Spanish verse near the end.

    The English body runs past the 5000-character scoring window so the
    Spanish verse dominates the second window, which must flip the
    every-chunk-English verdict to false.
    """
    english_sections = []
    section_no = 1
    total = 0
    while total < 5400:
        body = "\n".join(pick(EN_VERSE_LINES, 6))
        english_sections.append(f"[Verse {section_no}]\n{body}")
        total += len(body)
        section_no += 1
    spanish = "\n".join(pick(ES_LINES, 12) + pick(ES_LINES, 12))
    return "\n".join(english_sections) + f"\n[Verse {section_no}]\n{spanish}"


def long_mixed_lyrics():
    """Roughly 6000 characters of English followed by 6000 of Spanish.

    Catches any implementation that scores only the first window: the
    English half fills the first 5000-character chunk entirely, and the
    Spanish half only shows up in later chunks.
    """
    english, spanish = [], []
    while sum(len(l) + 1 for l in english) < 6000:
        english.append(rng.choice(EN_VERSE_LINES))
    while sum(len(l) + 1 for l in spanish) < 6000:
        spanish.append(rng.choice(ES_LINES))
    return (
        "[Part 1]\n" + "\n".join(english) + "\n[Part 2]\n" + "\n".join(spanish)
    )


# --------------------------------------------------------------------------
# Song roster
# --------------------------------------------------------------------------

TITLE_WORDS_A = [
    "Silver", "Midnight", "Golden", "Paper", "Electric", "Broken", "Wild",
    "Neon", "Hollow", "Crimson", "Faded", "Gravel", "Summer", "Winter",
    "Lonely", "Burning", "Quiet", "Restless", "Velour", "Distant",
]
TITLE_WORDS_B = [
    "Rain", "Run", "Heart", "Road", "Sky", "Letters", "Avenue", "Engine",
    "Season", "Harbor", "Motel", "Fences", "Parade", "Lanterns", "Static",
    "Anthem", "Mirror", "Orchard", "Signal", "Tide",
]
FIRST_NAMES = [
    "Mara", "Jonah", "Sora", "Calla", "Rhea", "Dex", "Tomas", "Lena",
    "Arlo", "Bianca", "Cole", "Dalia", "Emory", "Farrah", "Gideon",
    "Harlow", "Imani", "Jules", "Kenji", "Livia", "Marlo", "Nadia",
    "Oscar", "Priya", "Quentin", "Rosa", "Silas", "Tessa", "Ugo", "Vera",
]
LAST_NAMES = [
    "Voss", "Dee", "Lane", "Reyes", "Quinn", "Marlow", "Hale", "West",
    "Calder", "Brook", "Ferro", "Gale", "Hart", "Ives", "Juno", "Keane",
    "Luna", "Moss", "Nair", "Okon", "Pike", "Rook", "Soto", "Thorn",
    "Vale", "Wren", "York", "Zane", "Ashby", "Birch",
]
BAND_NAMES = [
    "The Velvet Arrows", "Glasshouse Parade", "The Night Owls",
    "Harbor & Pine", "The Tin Foxes", "Lantern City", "The Low Tides",
    "Copper Canyon", "The Paper Kites Club", "Motel Television",
]

GENRES_BY_BUCKET = {
    "pop": ["dance pop", "pop", "synth-pop", "teen pop", "electropop"],
    "hip hop": ["rap", "hip hop", "trap", "hip hop/rap", "southern hip hop"],
    "rock": ["rock", "alternative rock", "grunge", "hard rock", "pop punk"],
    "r&b": ["contemporary r&b", "soul", "neo soul", "new jack swing"],
    "country": ["country", "country pop", "contemporary country"],
    "electronic": ["edm", "house"],
    "other": ["reggaeton", "latin", "shoegaze"],
}


def build_roster():
    """Return the full 100-song roster with per-song intent."""
    songs = []
    used_titles = set()
    used_artists = set()

    def next_title():
        while True:
            title = f"{rng.choice(TITLE_WORDS_A)} {rng.choice(TITLE_WORDS_B)}"
            if title not in used_titles:
                used_titles.add(title)
                return title

    def next_artist(band_ok=True):
        while True:
            if band_ok and rng.random() < 0.2:
                artist = rng.choice(BAND_NAMES)
            else:
                artist = f"{rng.choice(FIRST_NAMES)} {rng.choice(LAST_NAMES)}"
            if artist not in used_artists:
                used_artists.add(artist)
                return artist

    def add(title, artist, year, lang, bucket, explicit, profane, style,
            weeks, variants=(), promo=False):
        songs.append(
            dict(
                title=title, artist=artist, year=year, lang=lang,
                bucket=bucket, explicit=explicit, profane=profane,
                style=style, weeks=weeks, variants=list(variants),
                promo=promo,
            )
        )

    # --- hand-placed songs -------------------------------------------------

    # Dedup respelling exercises (all English, post-1990).
    add("Glass River", "Mara Voss", 1994, "en", "pop", False, 0, "standard", 5,
        variants=[("Glass River (Radio Edit)", "Mara Voss")])
    add("Night Parade", "Jonah Dee", 1997, "en", "rock", False, 0, "long", 4,
        variants=[("Night Parade/Dawn Medley", "Jonah Dee")])
    add("Paper Hearts", "Sora Lane Feat. Dex Marlow", 2008, "en", "pop", False,
        0, "standard", 6,
        variants=[
            ("Paper Hearts", "Sora Lane Featuring Dex Marlow"),
            ("Paper Hearts", "Sora Lane (Feat. Dex Marlow)"),
        ])
    add("Wildflower Road", "Calla Reyes (Duet With Tomas Hale)", 1999, "en",
        "country", False, 0, "standard", 4,
        variants=[("Wildflower Road", "Calla Reyes Duet With Tomas Hale")])
    add("Static Bloom", "Rhea Quinn x Marlo West", 2015, "en", "pop", True, 1,
        "standard", 5, variants=[("Static Bloom", "Rhea Quinn X Marlo West")])
    add("Velvet Hour", "Lena Calder", 2010, "en", "r&b", False, 0, "sad", 4,
        variants=[("Velvet  Hour", "Lena Calder")])

    # Language specials (all post-1990 so the window cut can't hide them).
    add("Corazon Sin Miedo", "Rosa Ferro", 1995, "es", "other", False, 0,
        "es", 3)
    add("Baila Esta Noche", "Dalia Soto", 2004, "es", "other", None, 0,
        "es", 2)
    add("Fuego En La Piel", "Bianca Luna", 2017, "es", "other", False, 0,
        "es", 4)
    add("Neon Seoul Nights", "Kenji Park Band", 2012, "ko", "pop", False, 0,
        "ko", 2)
    add("Dalbit Romance", "Haneul Crew", 2020, "ko", "pop", None, 0, "ko", 3)
    add("Crossing Borders", "Emory Gale", 2018, "mixed_verse", "pop", False,
        0, "mixed_verse", 3)
    add("Two Worlds Anthem", "Imani Brook", 2021, "mixed_long", "pop", False,
        0, "mixed_long", 2)

    # A song no provider has lyrics for: dropped with a warning, silently
    # absent from every lyric-side table.
    add("Lost Signal", "Quentin Pike", 2003, "none", "rock", False, 0,
        "standard", 2)

    # --- pre-1990 block (window-filtered) ----------------------------------
    pre_years = [1958, 1962, 1964, 1967, 1970, 1973, 1976, 1978, 1980,
                 1982, 1984, 1986, 1987, 1988, 1989]
    pre_buckets = ["pop", "rock", "r&b", "country", "pop", "rock", "r&b",
                   "pop", "rock", "pop", "country", "pop", "rock", "pop",
                   "r&b"]
    for year, bucket in zip(pre_years, pre_buckets):
        add(next_title(), next_artist(), year, "en", bucket,
            None if rng.random() < 0.6 else False, 0, "standard",
            rng.randint(1, 2))

    # --- post-1990 English fill --------------------------------------------
    # 71 more songs so the roster totals 100. Genres rotate with a pop/hip
    # hop lean; profanity concentrates in hip hop and grows over time.
    fill_years = []
    for year in range(1990, 2025):
        fill_years.append(year)
        if year % 2 == 0:
            fill_years.append(year)
    fill_years.extend([1993, 2001, 2007, 2011, 2014, 2019, 2022, 2023,
                       2016, 2018, 2020, 2024, 1996, 2009, 2013, 2015,
                       2006, 2017, 2021])
    fill_years = fill_years[:71]
    bucket_cycle = ["pop", "hip hop", "rock", "pop", "r&b", "hip hop",
                    "country", "pop", "hip hop", "electronic", "rock",
                    "r&b", "pop", "hip hop", "country", "other"]
    for i, year in enumerate(sorted(fill_years)):
        bucket = bucket_cycle[i % len(bucket_cycle)]
        profane = 0
        explicit = False
        if bucket == "hip hop":
            if year >= 2006 or rng.random() < 0.4:
                profane = 2
                explicit = True
            else:
                profane = 1
                explicit = rng.random() < 0.5
        elif bucket in ("rock", "pop") and rng.random() < 0.18:
            profane = 1
            explicit = rng.random() < 0.4
        if rng.random() < 0.15:
            explicit = None
        style = rng.choice(
            ["standard", "standard", "long", "plain", "intro_lead", "sad"]
        )
        add(next_title(), next_artist(), year, "en", bucket, explicit,
            profane, style, rng.randint(1, 6), promo=rng.random() < 0.12)

    # Two songs carry censored spellings so pattern matching is exercised.
    censored = [s for s in songs if s["lang"] == "en" and s["profane"] == 2]
    for song in censored[:2]:
        song["profane"] = 3

    assert len(songs) == 100, f"roster holds {len(songs)} songs"
    return songs


# --------------------------------------------------------------------------
# Chart rows
# --------------------------------------------------------------------------


def saturdays(year):
    day = dt.date(year, 1, 1)
    day += dt.timedelta(days=(5 - day.weekday()) % 7)
    out = []
    while day.year == year:
        out.append(day)
        day += dt.timedelta(days=7)
    return out


def chart_rows(songs, total_rows):
    """Expand the roster into dated chart rows, exactly total_rows of them."""
    weeks_total = sum(s["weeks"] for s in songs)
    # Pad or trim filler songs' week counts until the total is exact.
    adjustable = [s for s in songs if s["lang"] == "en" and not s["variants"]]
    i = 0
    while weeks_total < total_rows:
        adjustable[i % len(adjustable)]["weeks"] += 1
        weeks_total += 1
        i += 1
    while weeks_total > total_rows:
        song = adjustable[i % len(adjustable)]
        if song["weeks"] > 1:
            song["weeks"] -= 1
            weeks_total -= 1
        i += 1

    rows = []
    for song in songs:
        weeks = song["weeks"]
        dates = saturdays(song["year"])
        start = rng.randint(0, max(0, len(dates) - weeks))
        rank = rng.randint(1, 60)
        spellings = [(song["title"], song["artist"])] + song["variants"]
        for w in range(weeks):
            # The earliest row always uses the canonical spelling, so the
            # deduped record keeps it; later rows cycle the respellings.
            title_raw, artist_raw = spellings[w % len(spellings) if w else 0]
            rows.append(
                dict(
                    date=dates[start + w].isoformat(),
                    rank=rank,
                    song=title_raw,
                    artist=artist_raw,
                )
            )
            rank = min(100, max(1, rank + rng.randint(-6, 8)))
    rows.sort(key=lambda r: (r["date"], r["rank"], r["song"]))
    assert len(rows) == total_rows
    return rows


# --------------------------------------------------------------------------
# Providers
# --------------------------------------------------------------------------


def build_lyrics(song):
    style = song["style"]
    if style == "es":
        return spanish_lyrics()
    if style == "ko":
        return korean_lyrics()
    if style == "mixed_verse":
        return injected_verse_lyrics()
    if style == "mixed_long":
        return long_mixed_lyrics()
    if style == "sad":
        mood = "sad"
    elif song["profane"] >= 2 and rng.random() < 0.75:
        mood = "annoyed"
    elif rng.random() < 0.7:
        mood = "upbeat"
    else:
        mood = None
    text = english_lyrics(style, song["profane"], mood)
    if song["promo"]:
        lines = text.split("\n")
        cut = rng.randint(2, max(2, len(lines) - 2))
        lines.insert(
            cut,
            f"See {song['artist']} LiveGet tickets as low as ${rng.randint(19, 99)}",
        )
        lines.insert(rng.randint(1, cut), "You might also like")
        text = "\n".join(lines) + f"{rng.randint(10, 9999)}Embed"
    return text


def provider_fixtures(songs):
    spotify, deezer, lastfm = {}, {}, {}
    for song in songs:
        primary, _featured = normalize_artist(song["artist"])
        sid = song_id(normalize_title(song["title"]), primary)
        song["song_id"] = sid

        lyrics = None if song["lang"] == "none" else build_lyrics(song)
        genre = rng.choice(GENRES_BY_BUCKET[song["bucket"]])

        sp, dz, lf = {}, {}, {}
        # Explicit flags live mostly on the first provider; a few songs only
        # carry one further down the chain so field-level first-wins shows.
        if song["explicit"] is not None:
            if rng.random() < 0.8:
                sp["explicit"] = song["explicit"]
                if rng.random() < 0.3:
                    dz["explicit"] = song["explicit"]
            else:
                dz["explicit"] = song["explicit"]
        # Lyrics come from the second or third provider.
        if lyrics is not None:
            if rng.random() < 0.7:
                dz["lyrics"] = lyrics
            else:
                lf["lyrics"] = lyrics
        # Genres are scattered; roughly one song in eight has none at all.
        if rng.random() < 0.875:
            target = rng.choice([sp, lf, lf])
            target["genre"] = genre
            song["genre_raw"] = genre
        else:
            song["genre_raw"] = None

        for payload, store in ((sp, spotify), (dz, deezer), (lf, lastfm)):
            if payload:
                store[sid] = payload
    return spotify, deezer, lastfm


# --------------------------------------------------------------------------
# Labeled training data
# --------------------------------------------------------------------------

LABELS = [
    "optimistic", "thankful", "empathetic", "pessimistic", "anxious",
    "sad", "annoyed", "denial", "official", "joking",
]

# Every phrase in a pool repeats that pool's anchor word, so the anchor
# dominates the normalized term-frequency mass and a linear bag-of-words
# learner can drive its logit well past the decision threshold within the
# default epoch budget.
EMOTION_PHRASES = {
    "optimistic": [
        "hopeful today hopeful tomorrow staying hopeful for better days",
        "i am hopeful things turn around hopeful truly hopeful",
        "still hopeful about the future hopeful every hopeful morning",
        "hopeful hearts stay hopeful we stay hopeful together",
        "the sun will rise i stay hopeful always hopeful so hopeful",
        "good news keeps me hopeful so hopeful and hopeful again",
    ],
    "thankful": [
        "so grateful and grateful again grateful for the nurses",
        "thank you all grateful truly grateful deeply grateful",
        "feeling blessed and grateful grateful for family grateful always",
        "grateful for the support grateful every day so grateful",
        "grateful for one more day truly grateful tonight grateful",
    ],
    "empathetic": [
        "such empathy today empathy for the families real empathy",
        "empathy for everyone who lost someone empathy deep empathy",
        "sending love and empathy empathy for the struggling empathy",
        "empathy for all the people empathy and care and empathy",
        "holding empathy for the vulnerable empathy first always empathy",
    ],
    "pessimistic": [
        "this is hopeless and hopeless again simply hopeless",
        "nothing will be normal it is hopeless so hopeless utterly hopeless",
        "honestly it feels hopeless no hope left hopeless hopeless",
        "the situation gets worse hopeless and worse and hopeless",
        "we are doomed it is hopeless completely hopeless forever hopeless",
    ],
    "anxious": [
        "i am so worried and worried again worried about my parents",
        "scared and worried to leave the house worried sick worried",
        "the uncertainty has me worried every night so worried worried",
        "panic sets in worried every time i cough worried and worried",
        "really worried and nervous worried about the results worried",
    ],
    "sad": [
        "i cried all night tears will not stop tears more tears",
        "missing my friends tears again and tears and tears",
        "everything feels heavy tears and lonely tears and tears",
        "my heart is broken tears at the news tears all day tears",
        "tears and more tears and tears for the lives we lost",
    ],
    "annoyed": [
        "so annoying people ignoring rules annoying and annoying again",
        "so annoying these endless queues annoying every annoying time",
        "annoying hoarders you selfish people so annoying so annoying",
        "annoying how they lie annoying it drives me crazy annoying",
        "the constant noise is annoying deeply annoying truly annoying",
    ],
    "denial": [
        "this whole thing is a hoax a total hoax another hoax",
        "the numbers are fake the hoax continues what a hoax hoax",
        "i refuse to believe these hoax reports hoax everywhere hoax",
        "it is not real it is a hoax wake up people hoax hoax",
        "they made up this hoax for control another hoax pure hoax",
    ],
    "official": [
        "officials reported new cases today officials confirmed officials",
        "officials announced a lockdown update officials said officials",
        "the health department officials issued a statement officials officials",
        "officials confirmed the reported figures officials repeated officials",
        "the government officials released new guidance officials officials",
    ],
    "joking": [
        "my dog is my coworker now lol haha lol haha",
        "day 40 of talking to my plants haha lol haha lol",
        "quarantine haircut went exactly as planned lol haha lol",
        "my fridge and i are best friends now haha lol haha",
        "lol who else dresses up for the trash haha lol haha",
    ],
}

NEUTRAL_PHRASES = [
    "went to the store this afternoon",
    "watching the rain from the window",
    "made soup for dinner tonight",
    "the bus was late again",
    "reading an old book this weekend",
]

COMBOS = (
    [(label,) for label in LABELS] * 84
    + [("optimistic", "thankful")] * 25
    + [("anxious", "sad")] * 25
    + [("sad", "pessimistic")] * 25
    + [("annoyed", "denial")] * 25
    + [("joking", "optimistic")] * 25
    + [("empathetic", "sad")] * 25
    + [("pessimistic", "anxious", "sad")] * 20
    + [("optimistic", "thankful", "joking")] * 20
    + [()] * 80
)


def senwave_rows(target_rows):
    combos = list(COMBOS)
    rng.shuffle(combos)
    combos = combos[: target_rows - 3]
    rows = []
    for combo in combos:
        parts = [rng.choice(EMOTION_PHRASES[label]) for label in combo]
        if not parts or rng.random() < 0.15:
            parts.append(rng.choice(NEUTRAL_PHRASES))
        rng.shuffle(parts)
        text = " and ".join(parts) if rng.random() < 0.5 else " ".join(parts)
        row = {"text": text}
        for label in LABELS:
            row[label] = 1 if label in combo else 0
        rows.append(row)
    # Three rows whose text standardizes to nothing: loaders must skip and
    # count them instead of failing.
    for junk in ("!!!", "???", "..."):
        row = {"text": junk}
        for label in LABELS:
            row[label] = 0
        rows.append(row)
    assert len(rows) == target_rows
    return rows


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "providers").mkdir(exist_ok=True)

    songs = build_roster()
    rows = chart_rows(songs, 342)
    spotify, deezer, lastfm = provider_fixtures(songs)

    ids = {s["song_id"] for s in songs}
    assert len(ids) == 100, "song ids must be distinct"

    with open(FIXTURES / "chart.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["date", "rank", "song", "artist"], lineterminator="\n"
        )
        writer.writeheader()
        writer.writerows(rows)

    for name, store in (("spotify", spotify), ("deezer", deezer),
                        ("lastfm", lastfm)):
        path = FIXTURES / "providers" / f"{name}.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(store, fh, indent=2, sort_keys=True)
            fh.write("\n")

    with open(FIXTURES / "senwave.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["text"] + LABELS,
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(senwave_rows(1113))

    meta = [
        {
            "song_id": s["song_id"],
            "title": normalize_title(s["title"]),
            "artist": normalize_artist(s["artist"])[0],
            "year": s["year"],
            "lang": s["lang"],
            "genre_raw": s["genre_raw"],
            "explicit": s["explicit"],
            "weeks": s["weeks"],
            "profane": s["profane"],
        }
        for s in sorted(songs, key=lambda s: (s["year"], s["title"]))
    ]
    with open(FIXTURES / "songs_meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")

    kept = [s for s in songs if s["year"] >= 1990 and s["lang"] == "en"]
    print(f"chart rows:      {len(rows)}")
    print(f"distinct songs:  {len(songs)}")
    print(f"pre-1990:        {sum(1 for s in songs if s['year'] < 1990)}")
    print(f"designated en:   {sum(1 for s in songs if s['lang'] == 'en')}")
    print(f"expected kept:   {len(kept)}")


if __name__ == "__main__":
    main()
