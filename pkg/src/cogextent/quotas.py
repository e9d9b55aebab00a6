"""Grouping articles and cutting their phrase streams into fixed quotas.

Counting unique phrases is only comparable at equal phrase counts, so each
group's phrase stream is cut into blocks of exactly ``quota_size`` phrases.
The stream order is chronological with ties within a publication year broken
by a seeded shuffle; an article on a quota boundary is split, contributing
its leading phrases to one quota and the rest to the next.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence

from .phrases import Phrase, PhrasePipeline
from .records import ArticleRecord

DEFAULT_TEAM_EDGES = (1, 2, 3, 6, 11, 21, 51, 101, 1001)


@dataclass(frozen=True)
class GroupKey:
    """Identifies one comparison group (a year window, team-size bin, ...).

    ``bounds`` is the inclusive numeric range covered by the group where one
    applies; open-ended bins use ``math.inf`` as the upper bound.
    """

    kind: str
    label: str
    bounds: tuple[float, float] | None = None

    def __post_init__(self):
        if self.bounds is not None and self.bounds[0] > self.bounds[1]:
            raise ValueError(f"group bounds out of order: {self.bounds}")


@dataclass(frozen=True)
class QuotaArticle:
    """One article's contribution to one quota (possibly a partial title)."""

    id: str
    year: int
    phrases: tuple[Phrase, ...]


@dataclass(frozen=True)
class Quota:
    """A block of exactly ``size`` phrases drawn from one group's stream."""

    group: GroupKey
    articles: tuple[QuotaArticle, ...]
    size: int
    index: int
    span: tuple[int, int]

    @property
    def phrases(self) -> list[Phrase]:
        out: list[Phrase] = []
        for article in self.articles:
            out.extend(article.phrases)
        return out

    @property
    def article_ids(self) -> list[str]:
        return [article.id for article in self.articles]


@dataclass
class GroupQuotaReport:
    """Per-group accounting of how the stream was consumed."""

    group: GroupKey
    article_count: int
    phrase_count: int
    quota_count: int
    discarded_phrases: int
    note: str = ""


# ---------------------------------------------------------------------------
# Groupers
# ---------------------------------------------------------------------------

def team_bins(edges: Sequence[int] | None = None) -> list[GroupKey]:
    """Author-count bins from ascending ``edges``; the last bin is open-ended.

    The default edges ``(1, 2, 3, 6, 11, 21, 51, 101, 1001)`` produce bins
    ``[1,2) [2,3) [3,6) [6,11) [11,21) [21,51) [51,101) [101,1001) [1001,inf)``.
    """
    edges = tuple(edges) if edges is not None else DEFAULT_TEAM_EDGES
    if len(edges) < 1 or edges[0] != 1:
        raise ValueError("team bin edges must start at 1")
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("team bin edges must be strictly increasing")
    bins = [
        GroupKey("team_bin", f"[{a},{b})", (float(a), float(b - 1)))
        for a, b in zip(edges, edges[1:])
    ]
    bins.append(GroupKey("team_bin", f"[{edges[-1]},inf)", (float(edges[-1]), math.inf)))
    return bins


def team_grouper(edges: Sequence[int] | None = None) -> Callable[[ArticleRecord], GroupKey]:
    """Map a record to its team-size bin by author count."""
    edges = tuple(edges) if edges is not None else DEFAULT_TEAM_EDGES
    bins = team_bins(edges)

    def grouper(record: ArticleRecord) -> GroupKey:
        return bins[bisect_right(edges, record.author_count) - 1]

    return grouper


def year_window_grouper(window_years: int, origin: int = 0) -> Callable[[ArticleRecord], GroupKey]:
    """Map a record to its calendar-aligned window of ``window_years`` years."""
    if window_years < 1:
        raise ValueError("window_years must be at least 1")

    def grouper(record: ArticleRecord) -> GroupKey:
        start = record.year - (record.year - origin) % window_years
        return window_group(start, start + window_years - 1)

    return grouper


def window_group(year_start: int, year_end: int) -> GroupKey:
    label = str(year_start) if year_start == year_end else f"{year_start}-{year_end}"
    return GroupKey("year_window", label, (float(year_start), float(year_end)))


# ---------------------------------------------------------------------------
# Stream ordering and slicing
# ---------------------------------------------------------------------------

def ordered_contributions(
    records: Sequence[ArticleRecord],
    pipeline: PhrasePipeline,
    seed: int,
    stream_label: str,
) -> list[QuotaArticle]:
    """Parse titles and order articles chronologically for one stream.

    Ties within a year are broken by shuffling with a generator seeded from
    ``(seed, stream_label, year)``, so the order is reproducible and does not
    depend on input file order.  Articles yielding no phrases are dropped.
    """
    by_year: dict[int, list[ArticleRecord]] = {}
    for record in records:
        by_year.setdefault(record.year, []).append(record)

    stream: list[QuotaArticle] = []
    for year in sorted(by_year):
        batch = sorted(by_year[year], key=lambda r: r.id)
        random.Random(f"{seed}|{stream_label}|{year}").shuffle(batch)
        for record in batch:
            phrases = tuple(pipeline.extract(record.title))
            if phrases:
                stream.append(QuotaArticle(record.id, record.year, phrases))
    return stream


def slice_quotas(
    stream: Sequence[QuotaArticle],
    group: GroupKey,
    quota_size: int,
) -> tuple[list[Quota], int]:
    """Cut a phrase stream into quotas of exactly ``quota_size`` phrases.

    An article straddling a boundary is split between the two quotas.  The
    trailing phrases that cannot fill a whole quota are discarded; their
    count is returned alongside the quotas.
    """
    if quota_size < 1:
        raise ValueError("quota_size must be at least 1")
    quotas: list[Quota] = []
    current: list[QuotaArticle] = []
    filled = 0

    for article in stream:
        pending = article.phrases
        while pending:
            room = quota_size - filled
            take, pending = pending[:room], pending[room:]
            current.append(QuotaArticle(article.id, article.year, take))
            filled += len(take)
            if filled == quota_size:
                years = [a.year for a in current]
                quotas.append(
                    Quota(
                        group=group,
                        articles=tuple(current),
                        size=quota_size,
                        index=len(quotas),
                        span=(min(years), max(years)),
                    )
                )
                current = []
                filled = 0
    return quotas, filled


def build_quotas(
    records: Sequence[ArticleRecord],
    grouper: Callable[[ArticleRecord], GroupKey | None],
    quota_size: int,
    seed: int,
    pipeline: PhrasePipeline,
) -> tuple[list[Quota], list[GroupQuotaReport]]:
    """Group records, order each group's stream, and cut it into quotas.

    Records mapped to ``None`` by the grouper are skipped.  Groups are
    processed in label order; a group too small for even one quota appears
    in the reports with ``note="insufficient_volume"`` and no quotas.
    """
    groups: dict[GroupKey, list[ArticleRecord]] = {}
    for record in records:
        key = grouper(record)
        if key is not None:
            groups.setdefault(key, []).append(record)

    all_quotas: list[Quota] = []
    reports: list[GroupQuotaReport] = []
    for key in sorted(groups, key=lambda g: (g.bounds or (0.0, 0.0), g.label)):
        stream = ordered_contributions(groups[key], pipeline, seed, key.label)
        phrase_count = sum(len(a.phrases) for a in stream)
        quotas, leftover = slice_quotas(stream, key, quota_size)
        all_quotas.extend(quotas)
        reports.append(
            GroupQuotaReport(
                group=key,
                article_count=len(groups[key]),
                phrase_count=phrase_count,
                quota_count=len(quotas),
                discarded_phrases=leftover,
                note="" if quotas else "insufficient_volume",
            )
        )
    return all_quotas, reports


# ---------------------------------------------------------------------------
# Author statistics
# ---------------------------------------------------------------------------

@dataclass
class AuthorStats:
    """Distinct-author counts for the articles feeding one quota.

    When any contributing record lacks an author list the counts cannot be
    computed; ``available`` is False and the counts are ``None``.
    """

    available: bool
    unique_authors: int | None
    unique_first_authors: int | None
    article_count: int
    missing_author_records: int


def unique_author_stats(
    quota: Quota,
    records_by_id: dict[str, ArticleRecord],
) -> AuthorStats:
    """Count distinct authors and first authors across a quota's articles."""
    seen_ids: set[str] = set()
    authors: set[str] = set()
    first_authors: set[str] = set()
    missing = 0
    for article_id in quota.article_ids:
        if article_id in seen_ids:
            continue
        seen_ids.add(article_id)
        record = records_by_id.get(article_id)
        if record is None or record.authors is None:
            missing += 1
            continue
        authors.update(record.authors)
        first_authors.add(record.authors[0])
    if missing:
        return AuthorStats(False, None, None, len(seen_ids), missing)
    return AuthorStats(True, len(authors), len(first_authors), len(seen_ids), 0)
