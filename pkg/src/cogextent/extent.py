"""Unique-phrase counting, saturation correction, and scaling-model fitting.

A quota of Q phrases saturates: the more diverse the literature, the more
repeat phrases a small quota misses, so the ratio between unique counts at a
reference quota and a smaller quota grows with diversity.  The correction
model is piecewise in the small-quota unique count ``n``: a constant factor
below a threshold, a linear factor ``slope * n + intercept`` above it, with
the two pieces meeting at the threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from importlib import resources
from pathlib import Path
from statistics import fmean, stdev
from typing import Iterable, Sequence

from .errors import (
    InsufficientDataError,
    InvalidMeasurementError,
    NoDynamicRangeError,
)
from .phrases import PhrasePipeline
from .quotas import GroupKey, Quota, ordered_contributions, slice_quotas
from .records import ArticleRecord

PRESET_NAMES = ("physics", "astronomy")
CONTINUITY_TOLERANCE = 0.01
MIN_FIT_WINDOWS = 30


@dataclass(frozen=True)
class ScalingModel:
    """Piecewise correction from a small-quota count to the reference quota.

    ``factor(n)`` is ``baseline_factor`` for ``n <= threshold`` and
    ``slope * n + intercept`` above; the corrected value is ``n * factor(n)``.
    The pieces must agree at the threshold to within
    :data:`CONTINUITY_TOLERANCE`.
    """

    q_small: int
    q_ref: int
    slope: float
    intercept: float
    threshold: float
    baseline_factor: float

    def __post_init__(self):
        if not 0 < self.q_small < self.q_ref:
            raise ValueError("require 0 < q_small < q_ref")
        if self.baseline_factor <= 1.0:
            raise ValueError("baseline_factor must exceed 1")
        gap = abs(self.slope * self.threshold + self.intercept - self.baseline_factor)
        if gap > CONTINUITY_TOLERANCE:
            raise ValueError(
                f"pieces disagree at threshold by {gap:.4g} "
                f"(tolerance {CONTINUITY_TOLERANCE})"
            )

    def factor(self, n_small: float) -> float:
        if n_small <= self.threshold:
            return self.baseline_factor
        return self.slope * n_small + self.intercept

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ScalingModel":
        return cls(
            q_small=int(data["q_small"]),
            q_ref=int(data["q_ref"]),
            slope=float(data["slope"]),
            intercept=float(data["intercept"]),
            threshold=float(data["threshold"]),
            baseline_factor=float(data["baseline_factor"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ScalingModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def load_scaling_preset(name_or_path: str) -> ScalingModel | None:
    """Resolve a preset name, ``"none"``, or a JSON file path to a model."""
    if name_or_path == "none":
        return None
    if name_or_path in PRESET_NAMES:
        ref = resources.files("cogextent.data").joinpath(f"scaling_{name_or_path}.json")
        return ScalingModel.from_dict(json.loads(ref.read_text(encoding="utf-8")))
    return ScalingModel.load(name_or_path)


def count_unique(quota: Quota | Iterable) -> int:
    """Number of distinct phrases in a quota (or any phrase iterable)."""
    phrases = quota.phrases if isinstance(quota, Quota) else quota
    return len(set(phrases))


def apply_scaling(n_small: float, model: ScalingModel) -> float:
    """Correct a small-quota unique count up to the reference quota."""
    if n_small < 0:
        raise InvalidMeasurementError(f"negative unique count: {n_small}")
    if n_small > model.q_small:
        raise InvalidMeasurementError(
            f"unique count {n_small} exceeds quota size {model.q_small}"
        )
    return n_small * model.factor(n_small)


# ---------------------------------------------------------------------------
# Measurement over quotas
# ---------------------------------------------------------------------------

@dataclass
class ExtentMeasurement:
    """Averaged unique-phrase measurement for one group.

    ``raw_unique`` is the rounded mean of per-quota unique counts;
    ``corrected_unique`` applies the scaling model (equal to the raw mean
    when no model is set).  ``stdev`` is the sample standard deviation over
    quotas, ``None`` when only one quota was available.
    """

    group: GroupKey
    raw_unique: int
    corrected_unique: float
    quota_count_averaged: int
    stdev: float | None
    q_used: int


def measure_extent(
    quotas: Sequence[Quota],
    model: ScalingModel | None = None,
    q_ref: int | None = None,
) -> list[ExtentMeasurement]:
    """Average unique counts per group and apply the correction model.

    Quotas smaller than the reference size require a model (its ``q_small``
    must match the quota size); quotas at the reference size pass through
    uncorrected.  Groups appear in first-quota order.
    """
    if model is not None:
        q_ref = model.q_ref
    by_group: dict[GroupKey, list[Quota]] = {}
    order: list[GroupKey] = []
    for quota in quotas:
        if quota.group not in by_group:
            order.append(quota.group)
        by_group.setdefault(quota.group, []).append(quota)

    results = []
    for group in order:
        group_quotas = by_group[group]
        size = group_quotas[0].size
        if any(q.size != size for q in group_quotas):
            raise InvalidMeasurementError(f"mixed quota sizes in group {group.label}")
        raws = [count_unique(q) for q in group_quotas]
        if q_ref is not None and size < q_ref:
            if model is None:
                raise InvalidMeasurementError(
                    f"quota size {size} is below reference {q_ref} "
                    "and no scaling model was supplied"
                )
            if size != model.q_small:
                raise InvalidMeasurementError(
                    f"quota size {size} does not match model q_small {model.q_small}"
                )
            corrected = [apply_scaling(r, model) for r in raws]
        else:
            corrected = [float(r) for r in raws]
        results.append(
            ExtentMeasurement(
                group=group,
                raw_unique=round(fmean(raws)),
                corrected_unique=fmean(corrected),
                quota_count_averaged=len(group_quotas),
                stdev=stdev(corrected) if len(corrected) >= 2 else None,
                q_used=size,
            )
        )
    return results


# ---------------------------------------------------------------------------
# Fitting the scaling model from a reference corpus
# ---------------------------------------------------------------------------

@dataclass
class ScalingFit:
    """A fitted model plus the (n_small, ratio) points that produced it."""

    model: ScalingModel
    points: list[tuple[float, float]]
    residual: float
    constrained: bool


def _piecewise_eval(x: float, t: float, base: float, slope: float, intercept: float) -> float:
    return base if x <= t else slope * x + intercept


def _fit_high(points: list[tuple[float, float]]) -> tuple[float, float]:
    """Ordinary least squares line through the high-side points."""
    n = len(points)
    mx = fmean(p[0] for p in points)
    my = fmean(p[1] for p in points)
    sxx = sum((x - mx) ** 2 for x, _ in points)
    if sxx == 0:
        return 0.0, my
    sxy = sum((x - mx) * (y - my) for x, y in points)
    slope = sxy / sxx
    return slope, my - slope * mx


def fit_scaling_model(
    records: Sequence[ArticleRecord],
    q_small: int,
    q_ref: int,
    seed: int,
    pipeline: PhrasePipeline,
    min_windows: int = MIN_FIT_WINDOWS,
) -> ScalingFit:
    """Fit the piecewise correction from a reference corpus.

    The corpus is ordered chronologically (seeded shuffle within years) and
    cut into consecutive reference windows of ``q_ref`` phrases.  Each
    window yields one point: ``n_small`` is the mean unique count over the
    ``q_ref // q_small`` sub-blocks of ``q_small`` phrases at the window
    start, and the ratio is the window's reference unique count over that
    mean.  The breakpoint is chosen by grid search over midpoints between
    consecutive point abscissas; the linear piece is fitted by least squares
    and must meet the constant piece within :data:`CONTINUITY_TOLERANCE`,
    falling back to a fit pinned to the threshold when no free fit does.
    """
    if not 0 < q_small < q_ref:
        raise ValueError("require 0 < q_small < q_ref")
    stream = ordered_contributions(records, pipeline, seed, "scaling_fit")
    windows, _ = slice_quotas(stream, GroupKey("corpus", "all"), q_ref)
    if len(windows) < min_windows:
        raise InsufficientDataError(
            f"scaling fit needs at least {min_windows} reference windows, "
            f"got {len(windows)}",
            available=len(windows),
            required=min_windows,
        )

    sub_count = q_ref // q_small
    points: list[tuple[float, float]] = []
    for window in windows:
        phrases = window.phrases
        subs = [
            count_unique(phrases[i * q_small:(i + 1) * q_small])
            for i in range(sub_count)
        ]
        n_small = fmean(subs)
        points.append((n_small, count_unique(phrases) / n_small))
    points.sort()

    xs = sorted({x for x, _ in points})
    if len(xs) == 1:
        raise NoDynamicRangeError(
            "all windows have the same small-quota unique count; "
            "no scaling relationship can be fitted"
        )
    # Candidate breakpoints: midpoints between neighbors, plus extra grid
    # positions across wide gaps (the elbow may sit far from any point),
    # plus one position beyond the data for a constant-only model.
    step = (xs[-1] - xs[0]) / 100
    candidates: list[float] = []
    for a, b in zip(xs, xs[1:]):
        interior = max(1, min(50, int((b - a) / step))) if step > 0 else 1
        candidates.extend(a + (b - a) * (i + 1) / (interior + 1) for i in range(interior))
    candidates.append(xs[-1] + 1.0)

    # Two fit families per candidate threshold: a free least-squares line
    # over the high points (kept only when it meets the constant piece
    # within tolerance), and the same line pinned through the junction
    # (always exactly continuous).  Lowest SSR over all kept fits wins.
    best: tuple[float, tuple, bool] | None = None
    for t in candidates:
        low = [p for p in points if p[0] <= t]
        high = [p for p in points if p[0] > t]
        if not low:
            continue
        base = fmean(r for _, r in low)
        if base <= 1.0:
            continue

        trials: list[tuple[float, float, bool]] = []
        if high:
            slope, intercept = _fit_high(high)
            if abs(slope * t + intercept - base) <= CONTINUITY_TOLERANCE:
                trials.append((slope, intercept, False))
            sxx = sum((x - t) ** 2 for x, _ in high)
            slope_p = sum((x - t) * (r - base) for x, r in high) / sxx if sxx else 0.0
            trials.append((slope_p, base - slope_p * t, True))
        else:
            trials.append((0.0, base, False))

        for slope, intercept, pinned in trials:
            ssr = sum(
                (r - _piecewise_eval(x, t, base, slope, intercept)) ** 2
                for x, r in points
            )
            if best is None or ssr < best[0]:
                best = (ssr, (t, base, slope, intercept), pinned)

    if best is None:
        raise NoDynamicRangeError("no feasible breakpoint found for the scaling fit")
    ssr, (t, base, slope, intercept), constrained = best

    model = ScalingModel(
        q_small=q_small,
        q_ref=q_ref,
        slope=slope,
        intercept=intercept,
        threshold=t,
        baseline_factor=base,
    )
    return ScalingFit(model=model, points=points, residual=ssr, constrained=constrained)
