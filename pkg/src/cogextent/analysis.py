"""Measurement protocols built on quotas: timelines, uncertainty, robustness.

Everything here takes an :class:`AnalysisConfig` that fixes the dictionary,
quota sizes, scaling model, and seed, so repeated calls agree and outputs
are reproducible byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from statistics import fmean, stdev
from typing import Sequence

from .errors import (
    FeasibilityError,
    InsufficientVolumeError,
    InvalidMeasurementError,
)
from .extent import ExtentMeasurement, ScalingModel, apply_scaling, count_unique, measure_extent
from .phrases import GeneralWordDictionary, PhrasePipeline
from .quotas import (
    GroupKey,
    Quota,
    QuotaArticle,
    build_quotas,
    ordered_contributions,
    slice_quotas,
    team_bins,
    team_grouper,
    window_group,
)
from .records import ArticleRecord

DEFAULT_CONTAMINATION_FRACTIONS = (0.0, 0.01, 0.02, 0.05, 0.1, 0.2)


@dataclass(frozen=True)
class AnalysisConfig:
    """Shared knobs for every protocol in this module.

    When ``scaling`` is set, quotas are built at its small size and
    corrected to the reference; otherwise quotas are built at ``q_ref`` and
    reported raw.
    """

    dictionary: GeneralWordDictionary
    q_ref: int = 10000
    q_small: int = 3000
    scaling: ScalingModel | None = None
    max_phrase_words: int = 3
    window_years: int = 2
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.q_small <= self.q_ref:
            raise ValueError("require 0 < q_small <= q_ref")
        if self.scaling is not None and self.scaling.q_small != self.q_small:
            raise ValueError(
                f"scaling model q_small {self.scaling.q_small} "
                f"does not match config q_small {self.q_small}"
            )

    @property
    def operating_quota(self) -> int:
        return self.q_small if self.scaling is not None else self.q_ref

    @property
    def pipeline(self) -> PhrasePipeline:
        return PhrasePipeline(self.dictionary, self.max_phrase_words)

    def correct(self, raw_unique: int) -> float:
        if self.scaling is None:
            return float(raw_unique)
        return apply_scaling(raw_unique, self.scaling)


# ---------------------------------------------------------------------------
# Timeline
# ---------------------------------------------------------------------------

@dataclass
class WindowVolume:
    label: str
    year_start: int
    year_end: int
    articles: int


@dataclass
class TimelineResult:
    volume: list[WindowVolume]
    extent: list[ExtentMeasurement]
    notes: list[str] = field(default_factory=list)


def timeline_analysis(records: Sequence[ArticleRecord], config: AnalysisConfig) -> TimelineResult:
    """Measure extent per publication-year window across the whole corpus.

    Windows are calendar-aligned spans of ``config.window_years`` years.  A
    window too thin to fill one quota is merged with the following windows
    until the accumulated stream fills at least one; the measurement then
    carries the merged span as its group.  Article volume is reported for
    every original window.  A trailing stretch that never fills a quota is
    reported in ``notes``.
    """
    if not records:
        return TimelineResult(volume=[], extent=[], notes=["empty corpus"])
    w = config.window_years
    first = min(r.year for r in records)
    last = max(r.year for r in records)
    start0 = first - (first % w)

    volume: list[WindowVolume] = []
    window_records: list[tuple[int, int, list[ArticleRecord]]] = []
    for start in range(start0, last + 1, w):
        end = start + w - 1
        batch = [r for r in records if start <= r.year <= end]
        volume.append(WindowVolume(window_group(start, end).label, start, end, len(batch)))
        window_records.append((start, end, batch))

    measurements: list[ExtentMeasurement] = []
    notes: list[str] = []
    quota_size = config.operating_quota
    pending: list[QuotaArticle] = []
    pending_start: int | None = None
    for start, end, batch in window_records:
        if pending_start is None:
            pending_start = start
        own_label = window_group(start, end).label
        pending.extend(
            ordered_contributions(batch, config.pipeline, config.seed, own_label)
        )
        if sum(len(a.phrases) for a in pending) < quota_size:
            continue
        group = window_group(pending_start, end)
        quotas, _ = slice_quotas(pending, group, quota_size)
        measurements.extend(measure_extent(quotas, config.scaling, config.q_ref))
        if start != pending_start:
            notes.append(f"merged windows {group.label} to fill one quota")
        pending = []
        pending_start = None

    if pending and pending_start is not None:
        label = window_group(pending_start, last).label
        notes.append(f"insufficient_volume: trailing window {label} discarded")
    return TimelineResult(volume=volume, extent=measurements, notes=notes)


# ---------------------------------------------------------------------------
# Jackknife uncertainty
# ---------------------------------------------------------------------------

@dataclass
class JackknifeResult:
    mean: float
    stdev: float
    drawings: int
    half_size: int
    values: list[float] = field(default_factory=list)


def _merge_straddlers(quotas: Sequence[Quota]) -> list[QuotaArticle]:
    """Union of articles over quotas, re-joining split contributions."""
    merged: dict[str, QuotaArticle] = {}
    order: list[str] = []
    for quota in quotas:
        for article in quota.articles:
            if article.id in merged:
                prev = merged[article.id]
                merged[article.id] = QuotaArticle(
                    article.id, article.year, prev.phrases + article.phrases
                )
            else:
                merged[article.id] = article
                order.append(article.id)
    return [merged[i] for i in order]


def jackknife_uncertainty(
    quota_a: Quota,
    quota_b: Quota,
    config: AnalysisConfig,
    drawings: int = 10,
    seed: int | None = None,
) -> JackknifeResult:
    """Spread of the corrected unique count under article resampling.

    From two successive quotas of one group, draw ``drawings`` times half
    of the union's articles (without replacement), stream the drawn
    articles, truncate at the quota size, and record the corrected unique
    count.  The standard deviation over drawings estimates the uncertainty
    of a single-quota measurement.
    """
    if quota_a.group != quota_b.group:
        raise InvalidMeasurementError("jackknife quotas must come from the same group")
    if abs(quota_a.index - quota_b.index) != 1:
        raise InvalidMeasurementError("jackknife quotas must be successive")
    if quota_a.size != quota_b.size:
        raise InvalidMeasurementError("jackknife quotas must share one size")
    if drawings < 2:
        raise ValueError("need at least two drawings")

    quota_size = quota_a.size
    articles = _merge_straddlers([quota_a, quota_b])
    half = len(articles) // 2
    if seed is None:
        seed = config.seed

    values: list[float] = []
    for drawing in range(drawings):
        rng = random.Random(f"{seed}|jackknife|{drawing}")
        drawn = rng.sample(articles, half)
        stream: list = []
        for article in drawn:
            stream.extend(article.phrases)
            if len(stream) >= quota_size:
                break
        if len(stream) < quota_size:
            raise InsufficientVolumeError(
                f"half of the union ({half} articles) yields only "
                f"{len(stream)} phrases; cannot fill a quota of {quota_size}",
                available=len(stream),
                required=quota_size,
            )
        values.append(config.correct(count_unique(stream[:quota_size])))
    return JackknifeResult(
        mean=fmean(values),
        stdev=stdev(values),
        drawings=drawings,
        half_size=half,
        values=values,
    )


# ---------------------------------------------------------------------------
# Contamination and mixing
# ---------------------------------------------------------------------------

@dataclass
class SensitivityCurve:
    """Measured value as a function of the replaced-article fraction.

    ``reference_band`` is the unperturbed value plus/minus one jackknife
    standard deviation; a curve that stays inside the band is
    indistinguishable from sampling noise.
    """

    fractions: list[float]
    values: list[float]
    reference_band: tuple[float, float]

    def __post_init__(self):
        if not self.fractions or self.fractions[0] != 0.0:
            raise ValueError("fractions must start at 0")
        if any(b <= a for a, b in zip(self.fractions, self.fractions[1:])):
            raise ValueError("fractions must be strictly increasing")
        if len(self.fractions) != len(self.values):
            raise ValueError("fractions and values must align")
        lo, hi = self.reference_band
        if not lo <= self.values[0] <= hi:
            raise ValueError("the unperturbed value must sit inside its own band")

    def within_band(self) -> list[bool]:
        lo, hi = self.reference_band
        return [lo <= v <= hi for v in self.values]


def _validate_fractions(fractions: Sequence[float]) -> list[float]:
    fractions = list(fractions)
    if not fractions or fractions[0] != 0.0:
        raise ValueError("fractions must start at 0")
    if any(b <= a for a, b in zip(fractions, fractions[1:])):
        raise ValueError("fractions must be strictly increasing")
    if fractions[-1] >= 1.0:
        raise ValueError("fractions must stay below 1")
    return fractions


def _replacement_curve(
    base_stream: list[QuotaArticle],
    donor_stream: list[QuotaArticle],
    fractions: list[float],
    seed: int,
    label: str,
    config: AnalysisConfig,
    band: tuple[float, float],
    base_value: float,
) -> SensitivityCurve:
    """Replace a fraction of the first quota's articles in place and remeasure."""
    quota_size = config.operating_quota
    quotas, _ = slice_quotas(base_stream, GroupKey("protocol", "base"), quota_size)
    first = _merge_straddlers(quotas[:1])
    m = len(first)
    # a corpus never contains the same article twice, so a donor that is
    # already inside the measured quota would be an artifact, not a mixture
    present = {article.id for article in first}
    donors = [article for article in donor_stream if article.id not in present]

    values = [base_value]
    for fraction in fractions[1:]:
        k = round(fraction * m)
        if k == 0:
            values.append(base_value)
            continue
        if k > len(donors):
            raise FeasibilityError(
                f"fraction {fraction} needs {k} donor articles, only "
                f"{len(donors)} available; maximum feasible fraction "
                f"is {len(donors) / m:.3f}",
                max_feasible_fraction=len(donors) / m,
            )
        rng = random.Random(f"{seed}|replace|{label}|{fraction}")
        positions = rng.sample(range(m), k)
        incoming = rng.sample(donors, k)
        modified = list(first)
        for position, donor in zip(positions, incoming):
            modified[position] = donor
        refill, _ = slice_quotas(
            modified + base_stream[len(first):],
            GroupKey("protocol", f"{label}@{fraction}"),
            quota_size,
        )
        if not refill:
            raise InsufficientVolumeError(
                "replacement left too few phrases to fill the quota",
                required=quota_size,
            )
        values.append(config.correct(count_unique(refill[0])))
    return SensitivityCurve(fractions=fractions, values=values, reference_band=band)


def _protocol_base(
    records: Sequence[ArticleRecord],
    config: AnalysisConfig,
    seed: int,
    label: str,
) -> tuple[list[QuotaArticle], float, tuple[float, float]]:
    """Base stream, unperturbed value, and jackknife band for one protocol run."""
    stream = ordered_contributions(records, config.pipeline, seed, label)
    quota_size = config.operating_quota
    quotas, _ = slice_quotas(stream, GroupKey("protocol", label), quota_size)
    if len(quotas) < 2:
        raise InsufficientVolumeError(
            f"the band needs two full quotas of {quota_size} phrases; "
            f"the base corpus fills {len(quotas)}",
            available=len(quotas),
            required=2,
        )
    base_value = config.correct(count_unique(quotas[0]))
    jk = jackknife_uncertainty(quotas[0], quotas[1], config, seed=seed)
    band = (base_value - jk.stdev, base_value + jk.stdev)
    return stream, base_value, band


def contamination_test(
    base_records: Sequence[ArticleRecord],
    contaminant_records: Sequence[ArticleRecord],
    config: AnalysisConfig,
    fractions: Sequence[float] = DEFAULT_CONTAMINATION_FRACTIONS,
    seed: int | None = None,
) -> SensitivityCurve:
    """Replace a growing fraction of the measured quota by foreign articles.

    At each fraction, that share of the first quota's articles is replaced
    in place by random contaminant articles and the corrected unique count
    is remeasured.  Replacing articles by statistically identical ones
    should stay inside the jackknife band; a foreign literature should
    leave it.
    """
    fractions = _validate_fractions(fractions)
    if seed is None:
        seed = config.seed
    base_stream, base_value, band = _protocol_base(base_records, config, seed, "contamination_base")
    donor_stream = ordered_contributions(
        contaminant_records, config.pipeline, seed, "contamination_donor"
    )
    return _replacement_curve(
        base_stream, donor_stream, fractions, seed, "contamination", config, band, base_value
    )


def mixing_test(
    records: Sequence[ArticleRecord],
    base_bin: str,
    donor_bins: Sequence[str] | None,
    config: AnalysisConfig,
    edges: Sequence[int] | None = None,
    fractions: Sequence[float] = DEFAULT_CONTAMINATION_FRACTIONS,
    seed: int | None = None,
) -> dict[str, SensitivityCurve]:
    """Contaminate one team-size bin with articles from other bins.

    ``base_bin`` and ``donor_bins`` are bin labels as produced by
    :func:`cogextent.quotas.team_bins` (for example ``"[1,2)"``); ``None``
    selects every other non-empty bin as a donor.  Returns one curve per
    donor, all sharing the base bin's jackknife band.
    """
    fractions = _validate_fractions(fractions)
    if seed is None:
        seed = config.seed
    grouper = team_grouper(edges)
    pools: dict[str, list[ArticleRecord]] = {}
    for record in records:
        pools.setdefault(grouper(record).label, []).append(record)

    known = {b.label for b in team_bins(edges)}
    if base_bin not in known:
        raise ValueError(f"unknown team bin label: {base_bin!r}")
    if base_bin not in pools:
        raise InsufficientVolumeError(f"no articles in base bin {base_bin}")
    if donor_bins is None:
        donor_bins = sorted(label for label in pools if label != base_bin)
    base_stream, base_value, band = _protocol_base(
        pools[base_bin], config, seed, f"mixing_base|{base_bin}"
    )

    curves: dict[str, SensitivityCurve] = {}
    for donor in donor_bins:
        if donor not in known:
            raise ValueError(f"unknown team bin label: {donor!r}")
        donor_stream = ordered_contributions(
            pools.get(donor, []), config.pipeline, seed, f"mixing_donor|{donor}"
        )
        curves[donor] = _replacement_curve(
            base_stream, donor_stream, fractions, seed, f"mixing|{donor}",
            config, band, base_value,
        )
    return curves


# ---------------------------------------------------------------------------
# Team sizes
# ---------------------------------------------------------------------------

@dataclass
class TeamSizeResult:
    measurements: list[ExtentMeasurement]
    normalized: dict[str, float]
    insufficient: list[str]
    window: tuple[int, int]


def team_size_analysis(
    records: Sequence[ArticleRecord],
    config: AnalysisConfig,
    edges: Sequence[int] | None = None,
    recent_years: int = 5,
    window: tuple[int, int] | None = None,
) -> TeamSizeResult:
    """Measure extent per team-size bin over a recent year window.

    Values are averaged over every full quota a bin fills and normalized by
    the largest bin value (the maximum is exactly 1.0).  Bins without one
    full quota are listed in ``insufficient`` rather than measured.
    """
    if window is None:
        if not records:
            raise InsufficientVolumeError("no records to analyze")
        last = max(r.year for r in records)
        window = (last - recent_years + 1, last)
    recent = [r for r in records if window[0] <= r.year <= window[1]]

    quotas, reports = build_quotas(
        recent, team_grouper(edges), config.operating_quota, config.seed, config.pipeline
    )
    measurements = measure_extent(quotas, config.scaling, config.q_ref)
    insufficient = [r.group.label for r in reports if r.quota_count == 0]
    if not measurements:
        raise InsufficientVolumeError(
            "no team-size bin fills one quota in the selected window"
        )
    peak = max(m.corrected_unique for m in measurements)
    normalized = {m.group.label: m.corrected_unique / peak for m in measurements}
    return TeamSizeResult(
        measurements=measurements,
        normalized=normalized,
        insufficient=insufficient,
        window=window,
    )


# ---------------------------------------------------------------------------
# Dictionary and phrase-length sensitivity
# ---------------------------------------------------------------------------

@dataclass
class DictionarySensitivityResult:
    baseline: TimelineResult
    trials: list[TimelineResult]
    max_relative_deviation: float


def dictionary_sensitivity(
    records: Sequence[ArticleRecord],
    field_dictionary: GeneralWordDictionary,
    config: AnalysisConfig,
    keep_fraction: float = 0.8,
    trials: int = 5,
    seed: int | None = None,
) -> DictionarySensitivityResult:
    """Timeline stability under random thinning of the field dictionary.

    The baseline uses the full field dictionary layered on the configured
    one.  Each trial keeps a random ``keep_fraction`` of the field words
    and repeats the timeline; the result reports the maximum relative
    deviation of any window's corrected value from the baseline.
    """
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError("keep_fraction must lie in (0, 1]")
    if seed is None:
        seed = config.seed
    full_config = replace(config, dictionary=config.dictionary.merged(field_dictionary))
    baseline = timeline_analysis(records, full_config)
    base_by_label = {m.group.label: m.corrected_unique for m in baseline.extent}

    field_words = sorted(field_dictionary.words)
    keep = round(keep_fraction * len(field_words))
    results: list[TimelineResult] = []
    worst = 0.0
    for trial in range(trials):
        rng = random.Random(f"{seed}|dict|{trial}")
        subset = rng.sample(field_words, keep)
        thinned = GeneralWordDictionary.from_words(subset, source_tag=f"trial{trial}")
        trial_config = replace(config, dictionary=config.dictionary.merged(thinned))
        outcome = timeline_analysis(records, trial_config)
        results.append(outcome)
        for m in outcome.extent:
            base = base_by_label.get(m.group.label)
            if base:
                worst = max(worst, abs(m.corrected_unique - base) / base)
    return DictionarySensitivityResult(
        baseline=baseline, trials=results, max_relative_deviation=worst
    )


def trend_sign_agreement(
    a: Sequence[ExtentMeasurement], b: Sequence[ExtentMeasurement]
) -> float:
    """Fraction of consecutive-window steps whose sign agrees between runs.

    Only windows present in both series (by label, in ``a``'s order) are
    compared.  Returns 1.0 when fewer than two windows are shared.
    """
    b_by_label = {m.group.label: m.corrected_unique for m in b}
    shared = [
        (m.corrected_unique, b_by_label[m.group.label])
        for m in a
        if m.group.label in b_by_label
    ]
    if len(shared) < 2:
        return 1.0
    agree = total = 0
    for (a0, b0), (a1, b1) in zip(shared, shared[1:]):
        da, db = a1 - a0, b1 - b0
        total += 1
        if (da > 0 and db > 0) or (da < 0 and db < 0) or (da == 0 and db == 0):
            agree += 1
    return agree / total


def phrase_length_sensitivity(
    records: Sequence[ArticleRecord],
    config: AnalysisConfig,
    alternative_max_words: int = 4,
) -> tuple[TimelineResult, TimelineResult, float]:
    """Timeline under the configured phrase-length cap versus an alternative.

    Returns both timelines and the maximum relative deviation between
    corrected values of shared windows.
    """
    baseline = timeline_analysis(records, config)
    alternative = timeline_analysis(
        records, replace(config, max_phrase_words=alternative_max_words)
    )
    base_by_label = {m.group.label: m.corrected_unique for m in baseline.extent}
    worst = 0.0
    for m in alternative.extent:
        base = base_by_label.get(m.group.label)
        if base:
            worst = max(worst, abs(m.corrected_unique - base) / base)
    return baseline, alternative, worst
