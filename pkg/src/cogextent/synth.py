"""Deterministic synthetic corpora with known phrase-diversity properties.

Generated titles are built from an alphabet with no vowels and no "s", so
every synthetic word passes title normalization unchanged (no plural
collation, no digit stripping, length >= 2).  Word namespaces are kept
disjoint by prefix: ``v...`` for vocabulary words, ``f...`` for words that
never repeat (fresh mass), ``g...`` for synthetic general words.

Two phrase models are provided; both draw each phrase independently:

* uniform — words uniform over a vocabulary of ``vocabulary_size`` words;
* zipf topics — a topic uniform over ``zipf_topics``, then a word from that
  topic's ``zipf_core`` words with probability proportional to
  ``rank ** -zipf_exponent`` (clustered reuse, heavier tails).

With ``fresh_fraction`` h, each phrase slot is with probability h a
globally unique fresh word instead, which pushes the expected unique count
per quota up by ``h * Q`` without saturating.
"""

from __future__ import annotations

import random
from bisect import bisect_left
from dataclasses import dataclass
from typing import Sequence

from .phrases import GeneralWordDictionary
from .records import ArticleRecord

_ALPHABET = "bcdfghjklmnpqrtvwz"  # no vowels, no "s": collation fixed points
_BASE = len(_ALPHABET)


def _encode(number: int, width: int) -> str:
    if number < 0:
        raise ValueError("cannot encode a negative number")
    digits = []
    for _ in range(width):
        digits.append(_ALPHABET[number % _BASE])
        number //= _BASE
    if number:
        raise ValueError(f"number does not fit in width {width}")
    return "".join(reversed(digits))


def vocabulary_word(index: int) -> str:
    """The ``index``-th reusable vocabulary word."""
    return "v" + _encode(index, 5)


def fresh_word(year: int, title_index: int, slot: int) -> str:
    """A word unique to one phrase slot of one title; never repeats."""
    return "f" + _encode(year, 4) + _encode(title_index, 5) + _encode(slot, 2)


def general_word(index: int) -> str:
    return "g" + _encode(index, 4)


def author_name(index: int) -> str:
    return "au" + _encode(index, 4)


def field_dictionary(count: int, source_tag: str = "synthetic-field") -> GeneralWordDictionary:
    """A synthetic general-word dictionary of ``count`` distinct words."""
    return GeneralWordDictionary.from_words(
        (general_word(i) for i in range(count)), source_tag=source_tag
    )


@dataclass(frozen=True)
class CorpusSegment:
    """One homogeneous stretch of synthetic publication years.

    ``zipf_topics == 0`` selects the uniform model.  Phrase lengths are
    sampled from ``phrase_length_weights`` (default: all one-word).  With
    ``separator == "comma"`` phrases are joined by commas; with
    ``"general"`` they are joined by random synthetic general words (which
    requires ``field_word_count > 0`` and the matching dictionary from
    :func:`field_dictionary` at parse time).
    """

    year_start: int
    year_end: int
    titles_per_year: int
    phrases_per_title: int = 4
    vocabulary_size: int = 5000
    vocabulary_offset: int = 0
    fresh_fraction: float = 0.0
    zipf_topics: int = 0
    zipf_core: int = 400
    zipf_exponent: float = 1.3
    phrase_length_weights: tuple[tuple[int, float], ...] = ((1, 1.0),)
    separator: str = "comma"
    field_word_count: int = 0
    team_size_weights: tuple[tuple[int, float], ...] = ((1, 1.0),)
    with_authors: bool = False
    author_pool: int = 1000
    venue: str = "synthetic"

    def __post_init__(self):
        if self.year_end < self.year_start:
            raise ValueError("year_end before year_start")
        if not 0.0 <= self.fresh_fraction <= 1.0:
            raise ValueError("fresh_fraction must lie in [0, 1]")
        if self.separator not in ("comma", "general"):
            raise ValueError(f"unknown separator style: {self.separator!r}")
        if self.separator == "general" and self.field_word_count < 1:
            raise ValueError("general separators need field_word_count >= 1")

    @property
    def years(self) -> range:
        return range(self.year_start, self.year_end + 1)


def _cumulative(weights: Sequence[tuple[int, float]]) -> tuple[list[int], list[float]]:
    values = [v for v, _ in weights]
    acc, total = [], 0.0
    for _, w in weights:
        if w < 0:
            raise ValueError("weights must be non-negative")
        total += w
        acc.append(total)
    if total <= 0:
        raise ValueError("weights must sum to a positive value")
    return values, [a / total for a in acc]


def _pick(values: list, cumulative: list[float], rng: random.Random):
    return values[bisect_left(cumulative, rng.random())]


_zipf_cache: dict[tuple[int, float], list[float]] = {}


def _zipf_cumulative(core: int, exponent: float) -> list[float]:
    key = (core, exponent)
    if key not in _zipf_cache:
        weights = [(rank + 1) ** -exponent for rank in range(core)]
        total = sum(weights)
        acc, run = [], 0.0
        for w in weights:
            run += w
            acc.append(run / total)
        _zipf_cache[key] = acc
    return _zipf_cache[key]


def _draw_word(segment: CorpusSegment, rng: random.Random) -> str:
    if segment.zipf_topics:
        topic = rng.randrange(segment.zipf_topics)
        rank = bisect_left(
            _zipf_cumulative(segment.zipf_core, segment.zipf_exponent), rng.random()
        )
        index = topic * segment.zipf_core + rank
    else:
        index = rng.randrange(segment.vocabulary_size)
    return vocabulary_word(segment.vocabulary_offset + index)


def generate_corpus(
    segments: Sequence[CorpusSegment],
    seed: int,
    id_prefix: str = "syn",
) -> list[ArticleRecord]:
    """Generate records for all segments; deterministic in ``seed``.

    Segments must not overlap in years.  Every title's random draws come
    from a generator seeded by ``(seed, year, title index)``, so a title is
    invariant to how the surrounding corpus is configured.
    """
    seen_years: set[int] = set()
    for segment in segments:
        overlap = seen_years.intersection(segment.years)
        if overlap:
            raise ValueError(f"segments overlap in years: {sorted(overlap)}")
        seen_years.update(segment.years)

    records: list[ArticleRecord] = []
    for segment in segments:
        team_values, team_cum = _cumulative(segment.team_size_weights)
        length_values, length_cum = _cumulative(segment.phrase_length_weights)
        for year in segment.years:
            for title_index in range(segment.titles_per_year):
                rng = random.Random(f"{seed}|title|{year}|{title_index}")
                team = _pick(team_values, team_cum, rng)

                phrases: list[list[str]] = []
                slot = 0
                for _ in range(segment.phrases_per_title):
                    length = _pick(length_values, length_cum, rng)
                    words = []
                    for _ in range(length):
                        if (
                            segment.fresh_fraction
                            and rng.random() < segment.fresh_fraction
                        ):
                            words.append(fresh_word(year, title_index, slot))
                        else:
                            words.append(_draw_word(segment, rng))
                        slot += 1
                    phrases.append(words)

                if segment.separator == "comma":
                    title = ", ".join(" ".join(words) for words in phrases)
                else:
                    parts: list[str] = []
                    for i, words in enumerate(phrases):
                        if i:
                            parts.append(general_word(rng.randrange(segment.field_word_count)))
                        parts.extend(words)
                    title = " ".join(parts)

                authors = None
                if segment.with_authors:
                    authors = tuple(
                        author_name(rng.randrange(segment.author_pool))
                        for _ in range(team)
                    )
                records.append(
                    ArticleRecord(
                        id=f"{id_prefix}-{year}-{title_index:05d}",
                        title=title,
                        year=year,
                        venue=segment.venue,
                        author_count=team,
                        authors=authors,
                    )
                )
    return records
