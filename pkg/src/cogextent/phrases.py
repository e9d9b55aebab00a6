"""Title normalization, plural collation, phrase parsing, and word dictionaries.

A title is reduced to *segments* (runs of words between delimiting
punctuation), each segment to canonical lowercase words, and each segment to
the *phrases* it contains: maximal runs of words that do not appear in the
general-word dictionary, truncated to the trailing ``max_phrase_words`` words.
Phrase identity is exact word-sequence equality, so two titles share a phrase
only when the canonical word sequences match.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DictionaryFormatError

# A phrase is a non-empty tuple of canonical words; tuples are hashable so
# sets of phrases are cheap.
Phrase = tuple[str, ...]

# Segments of one normalized title: outer list ordered as in the title.
TitleSegments = list[list[str]]

_SEG = "\x1e"  # internal segment delimiter, never present in real titles

# Unicode variants folded before any other rule fires.
_CHAR_FOLD = str.maketrans(
    {
        "‐": "-",  # hyphen
        "‑": "-",  # non-breaking hyphen
        "‒": "-",  # figure dash
        "–": "-",  # en dash
        "—": "-",  # em dash
        "―": "-",  # horizontal bar
        "−": "-",  # minus sign
        "'": None,      # apostrophes vanish: "alzheimer's" -> "alzheimers"
        "’": None,
        "‘": None,
        "ʼ": None,
    }
)

_DELIMITERS = re.compile(r"[.:;,]")
_MULTI_DASH = re.compile(r"--+")
# A dash not packed between two non-space characters acts as a delimiter
# ("gravity - a review"), unlike a true hyphen ("x-ray").
_SPACED_DASH = re.compile(r"(?<!\S)-+|-+(?!\S)")
_NON_WORD = re.compile(r"[^\w\s\x1e-]|_")


# ---------------------------------------------------------------------------
# Plural collation
# ---------------------------------------------------------------------------

# Words the suffix rules must never touch: field names that look plural,
# invariant plurals, closed-class words ending in s, and irregular plurals
# that would be mangled rather than merged with their singular.
_PLURAL_PASSTHROUGH = frozenset(
    """
    always perhaps towards besides whereas unawares afterwards backwards
    forwards upwards downwards inwards outwards
    themselves ourselves yourselves
    series species news chaos cosmos asbestos gas lens does goes
    atlas bias alias canvas pancreas
    axes matrices indices vertices vortices appendices helices
    analyses hypotheses syntheses theses crises
    physics mathematics statistics mechanics dynamics thermodynamics
    electrodynamics hydrodynamics aerodynamics magnetohydrodynamics
    kinetics kinematics optics electronics photonics acoustics
    informatics bioinformatics genomics proteomics metabolomics genetics
    astrophysics biophysics geophysics economics econometrics robotics
    ergonomics electrostatics magnetostatics spintronics plasmonics
    phonics ethics linguistics semantics pragmatics logistics
    """.split()
)

# Singulars that themselves end in s: their "-es" plural strips the whole
# suffix ("gases" -> "gas", "lenses" -> "lens") instead of one letter.
_ES_SINGULAR_STEMS = frozenset(
    """
    gas lens bus virus status focus radius corpus genus census campus
    bias atlas alias apparatus consensus bonus surplus modulus stimulus
    calculus annulus torus locus fetus fungus nucleus syllabus thesaurus
    cactus circus plus iris
    """.split()
)


def collate_plural(word: str) -> str:
    """Collapse a regular English plural onto its singular form.

    Deterministic suffix rules plus a curated passthrough list.  Words of
    three characters or fewer, words ending in ``ss``/``us``/``is``, and
    listed exceptions (field names like "physics", invariant plurals like
    "series") are returned unchanged.  The function is idempotent.
    """
    if len(word) <= 3 or word in _PLURAL_PASSTHROUGH:
        return word
    if word.endswith(("ss", "us", "is")):
        return word
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("es"):
        stem = word[:-2]
        if stem in _ES_SINGULAR_STEMS or stem.endswith(("x", "z", "ch", "sh", "ss")):
            return stem
        return word[:-1]
    if word.endswith("s"):
        return word[:-1]
    return word


def _canonical_token(token: str) -> str:
    """Collate the plural of a token; hyphenated tokens collate their tail."""
    if "-" in token:
        head, _, tail = token.rpartition("-")
        return head + "-" + collate_plural(tail)
    return collate_plural(token)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def normalize_title(raw: str) -> TitleSegments:
    """Reduce a raw title to segments of canonical lowercase words.

    Periods, colons, semicolons, commas, double dashes, and dashes with
    whitespace on either side split the title into segments.  Within a
    segment, ampersands become "and", apostrophes vanish, remaining
    punctuation separates words, digits are dropped from within tokens,
    single letters are dropped, and plurals are collated.  Empty segments
    are omitted, so an empty or all-punctuation title yields ``[]``.
    """
    text = raw.casefold().translate(_CHAR_FOLD)
    text = text.replace("&", " and ")
    text = _DELIMITERS.sub(_SEG, text)
    text = _MULTI_DASH.sub(_SEG, text)
    text = _SPACED_DASH.sub(_SEG, text)
    text = _NON_WORD.sub(" ", text)

    segments: TitleSegments = []
    for chunk in text.split(_SEG):
        words = []
        for token in chunk.split():
            token = "".join(c for c in token if not c.isdigit())
            token = _MULTI_DASH.sub("-", token).strip("-")
            if len(token) < 2:
                continue
            words.append(_canonical_token(token))
        if words:
            segments.append(words)
    return segments


# ---------------------------------------------------------------------------
# Dictionaries
# ---------------------------------------------------------------------------

_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)


@dataclass(frozen=True)
class GeneralWordDictionary:
    """A set of general words that delimit phrases instead of carrying content.

    Entries are stored casefolded and plural-collated so membership tests
    line up with normalized title words.  Dictionaries merge by set union,
    which lets a field-specific list be layered on the base English list.
    """

    words: frozenset[str]
    source_tag: str = ""

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_words(cls, words: Iterable[str], source_tag: str = "") -> "GeneralWordDictionary":
        canonical = set()
        for word in words:
            word = word.strip().casefold()
            if not word:
                continue
            if not _WORD_RE.fullmatch(word):
                raise DictionaryFormatError(
                    f"dictionary entry {word!r} is not a single alphabetic token"
                )
            canonical.add(collate_plural(word))
        return cls(frozenset(canonical), source_tag)

    @classmethod
    def from_file(cls, path: str | Path) -> "GeneralWordDictionary":
        """Load one word per line; blank lines and ``#`` comments are skipped."""
        path = Path(path)
        words = []
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            entry = line.split("#", 1)[0].strip()
            if not entry:
                continue
            if not _WORD_RE.fullmatch(entry.casefold()):
                raise DictionaryFormatError(
                    f"{path}:{lineno}: entry {entry!r} is not a single alphabetic token",
                    path=str(path),
                    line=lineno,
                )
            words.append(entry)
        return cls.from_words(words, source_tag=path.name)

    def merged(self, *others: "GeneralWordDictionary") -> "GeneralWordDictionary":
        combined = set(self.words)
        tags = [self.source_tag] if self.source_tag else []
        for other in others:
            combined |= other.words
            if other.source_tag:
                tags.append(other.source_tag)
        return GeneralWordDictionary(frozenset(combined), "+".join(tags))


def base_dictionary() -> GeneralWordDictionary:
    """The built-in common-English word list (581 words)."""
    ref = resources.files("cogextent.data").joinpath("general_english.txt")
    with resources.as_file(ref) as path:
        return GeneralWordDictionary.from_file(path)


# ---------------------------------------------------------------------------
# Phrase parsing
# ---------------------------------------------------------------------------

def parse_phrases(
    segments: TitleSegments,
    dictionary: GeneralWordDictionary,
    max_phrase_words: int = 3,
) -> list[Phrase]:
    """Extract phrases from normalized title segments.

    Within each segment, a phrase candidate is a maximal run of consecutive
    words absent from ``dictionary``.  A run longer than ``max_phrase_words``
    is truncated to its trailing ``max_phrase_words`` words and still yields
    a single phrase.  Candidates that are empty or purely numeric are
    discarded.  Phrases are returned in title order, duplicates included.
    """
    if max_phrase_words < 1:
        raise ValueError("max_phrase_words must be at least 1")
    phrases: list[Phrase] = []

    def flush(run: list[str]) -> None:
        if not run:
            return
        if len(run) > max_phrase_words:
            run = run[-max_phrase_words:]
        phrases.append(tuple(run))

    for segment in segments:
        run: list[str] = []
        for word in segment:
            if word.isdigit():
                continue
            if word in dictionary:
                flush(run)
                run = []
            else:
                run.append(word)
        flush(run)
    return phrases


@dataclass(frozen=True)
class PhrasePipeline:
    """Bundles the dictionary and phrase-length cap for repeated extraction."""

    dictionary: GeneralWordDictionary
    max_phrase_words: int = 3

    def extract(self, title: str) -> list[Phrase]:
        return parse_phrases(normalize_title(title), self.dictionary, self.max_phrase_words)


# ---------------------------------------------------------------------------
# Dictionary-candidate mining
# ---------------------------------------------------------------------------

def build_word_candidates(
    records: Sequence,
    strategy: str,
    *,
    min_years: int = 50,
    top_k: int = 1000,
) -> list[tuple[str, float]]:
    """Rank words as candidates for a general-word dictionary.

    Strategies:

    * ``year_presence`` — words occurring in at least ``min_years`` distinct
      publication years, scored by that year count.
    * ``inverse_volume_weighted`` — score each word by the sum over years of
      its occurrence count divided by that year's article count.
    * ``ed_suffix`` — the ``year_presence`` strategy restricted to words
      ending in "ed", which catches generic past participles.

    All strategies return at most ``top_k`` entries, best first.

    Records need ``title`` and ``year`` attributes.  The ranked list is for
    human review; nothing is excluded automatically.
    """
    if strategy not in {"year_presence", "inverse_volume_weighted", "ed_suffix"}:
        raise ValueError(f"unknown candidate strategy: {strategy!r}")

    year_volumes: defaultdict[int, int] = defaultdict(int)
    word_year_counts: defaultdict[tuple[str, int], int] = defaultdict(int)
    word_years: defaultdict[str, set[int]] = defaultdict(set)

    for record in records:
        year_volumes[record.year] += 1
        for segment in normalize_title(record.title):
            for word in segment:
                word_year_counts[word, record.year] += 1
                word_years[word].add(record.year)

    if strategy == "inverse_volume_weighted":
        scores: defaultdict[str, float] = defaultdict(float)
        for (word, year), count in word_year_counts.items():
            scores[word] += count / year_volumes[year]
        ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:top_k]

    suffix = "ed" if strategy == "ed_suffix" else None
    ranked = [
        (word, float(len(years)))
        for word, years in word_years.items()
        if len(years) >= min_years and (suffix is None or word.endswith(suffix))
    ]
    ranked.sort(key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_k]
