"""Loading, validating, and filtering bibliographic records.

Input rows become :class:`ArticleRecord` instances; rows that fail
validation are counted by reason in the :class:`CorpusManifest` rather than
aborting the load, so one malformed line never sinks a corpus.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

DEFAULT_YEAR_RANGE = (1800, 2100)

# Titles that are commentary on other articles rather than research output.
# Matched case-insensitively at the start of the title; leading brackets,
# quotes, and whitespace are tolerated.
DEFAULT_DERIVATIVE_PATTERNS = (
    r"^\W*errat(?:um|a)\b",
    r"^\W*comment on\b",
    r"^\W*reply to\b",
    r"^\W*corrigendum\b",
    r"^\W*publishers? note\b",
    r"^\W*publisher's note\b",
    r"^\W*editorial note\b",
)


@dataclass(frozen=True)
class ArticleRecord:
    """One published article, already validated.

    ``author_count`` is always at least 1.  ``authors`` is the ordered name
    list when the source provides one, else ``None``; when both are present
    they agree in length.
    """

    id: str
    title: str
    year: int
    venue: str = ""
    author_count: int = 1
    authors: tuple[str, ...] | None = None


@dataclass
class CorpusManifest:
    """Summary of one load: what was kept, what was rejected, and why."""

    source: str
    record_count: int
    year_range: tuple[int, int] | None
    rejected_count: int
    rejection_reasons: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "record_count": self.record_count,
            "year_range": list(self.year_range) if self.year_range else None,
            "rejected_count": self.rejected_count,
            "rejection_reasons": dict(sorted(self.rejection_reasons.items())),
        }


def _coerce_row(
    row: dict,
    index: int,
    schema: dict[str, str],
    year_range: tuple[int, int],
) -> ArticleRecord | str:
    """Build a record from one source row, or return a rejection reason."""

    def pick(logical: str):
        return row.get(schema.get(logical, logical))

    title = pick("title")
    if title is None or pick("year") is None:
        return "missing_field"
    title = str(title).strip()
    if not title:
        return "empty_title"

    try:
        year = int(str(pick("year")).strip())
    except ValueError:
        return "bad_year"
    if not year_range[0] <= year <= year_range[1]:
        return "year_out_of_range"

    authors: tuple[str, ...] | None = None
    raw_authors = pick("authors")
    if raw_authors is not None and raw_authors != "":
        if isinstance(raw_authors, str):
            names = [name.strip() for name in raw_authors.split(";")]
        elif isinstance(raw_authors, (list, tuple)):
            names = [str(name).strip() for name in raw_authors]
        else:
            return "bad_authors"
        names = [name for name in names if name]
        if not names:
            return "bad_authors"
        authors = tuple(names)

    raw_count = pick("author_count")
    if raw_count is None or raw_count == "":
        author_count = len(authors) if authors else 1
    else:
        try:
            author_count = int(str(raw_count).strip())
        except ValueError:
            return "bad_author_count"
        if author_count < 1:
            return "bad_author_count"
        if authors is not None and len(authors) != author_count:
            return "author_count_mismatch"

    raw_id = pick("id")
    record_id = str(raw_id).strip() if raw_id not in (None, "") else f"row{index:06d}"
    raw_venue = pick("venue")
    venue = str(raw_venue).strip() if raw_venue is not None else ""

    return ArticleRecord(record_id, title, year, venue, author_count, authors)


def load_records(
    path: str | Path,
    fmt: str = "csv",
    schema_map: dict[str, str] | None = None,
    delimiter: str = ",",
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
) -> tuple[list[ArticleRecord], CorpusManifest]:
    """Load a CSV (with header) or JSON-lines file of article rows.

    ``schema_map`` maps logical field names (``id``, ``title``, ``year``,
    ``venue``, ``author_count``, ``authors``) to source column/key names.
    Rows failing validation are tallied per reason in the manifest; an
    unreadable file raises ``OSError``.
    """
    path = Path(path)
    schema = schema_map or {}
    if fmt not in {"csv", "jsonl"}:
        raise ValueError(f"unknown input format: {fmt!r}")

    records: list[ArticleRecord] = []
    reasons: dict[str, int] = {}

    def tally(reason: str) -> None:
        reasons[reason] = reasons.get(reason, 0) + 1

    with path.open(encoding="utf-8", newline="") as handle:
        if fmt == "csv":
            rows: Iterable[dict] = csv.DictReader(handle, delimiter=delimiter)
        else:
            def _iter_jsonl():
                for line in handle:
                    line = line.strip()
                    if line:
                        yield line
            rows = _iter_jsonl()

        for index, row in enumerate(rows, 1):
            if fmt == "jsonl":
                try:
                    row = json.loads(row)
                except json.JSONDecodeError:
                    tally("bad_json")
                    continue
                if not isinstance(row, dict):
                    tally("bad_json")
                    continue
            outcome = _coerce_row(row, index, schema, year_range)
            if isinstance(outcome, str):
                tally(outcome)
            else:
                records.append(outcome)

    years = [r.year for r in records]
    manifest = CorpusManifest(
        source=str(path),
        record_count=len(records),
        year_range=(min(years), max(years)) if years else None,
        rejected_count=sum(reasons.values()),
        rejection_reasons=reasons,
    )
    return records, manifest


def filter_derivative(
    records: Sequence[ArticleRecord],
    patterns: Sequence[str] | None = None,
) -> tuple[list[ArticleRecord], int]:
    """Drop errata, comments, replies, and similar derivative items.

    ``patterns`` are regular expressions tested case-insensitively against
    the raw title; the defaults catch the common prefixes.  Returns the kept
    records (original order) and the number dropped.
    """
    compiled = [
        re.compile(p, re.IGNORECASE)
        for p in (patterns if patterns is not None else DEFAULT_DERIVATIVE_PATTERNS)
    ]
    kept = [
        record
        for record in records
        if not any(p.search(record.title) for p in compiled)
    ]
    return kept, len(records) - len(kept)


def dedupe_records(records: Sequence[ArticleRecord]) -> tuple[list[ArticleRecord], int]:
    """Drop exact duplicates by (normalized title, year, venue), keeping the first."""
    seen: set[tuple[str, int, str]] = set()
    unique: list[ArticleRecord] = []
    for record in records:
        key = (
            re.sub(r"\s+", " ", record.title).strip().casefold(),
            record.year,
            record.venue.strip().casefold(),
        )
        if key in seen:
            continue
        seen.add(key)
        unique.append(record)
    return unique, len(records) - len(unique)
