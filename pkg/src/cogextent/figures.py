"""Figures rendered next to each delimited report.

All rendering uses the Agg backend and fixed figure geometry so files do
not depend on any display environment and rerunning a command reproduces
identical images.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import SensitivityCurve, TeamSizeResult, TimelineResult
from .extent import ScalingFit

_DPI = 150


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def timeline_figure(result: TimelineResult, path: Path) -> None:
    """Corrected unique phrases per window, with article volume below."""
    fig, (ax_extent, ax_volume) = plt.subplots(
        2, 1, figsize=(8, 6), sharex=False, height_ratios=[3, 1]
    )
    if result.extent:
        xs = [m.group.bounds[0] for m in result.extent]
        ys = [m.corrected_unique for m in result.extent]
        errs = [m.stdev if m.stdev is not None else 0.0 for m in result.extent]
        ax_extent.errorbar(xs, ys, yerr=errs, marker="o", capsize=3, linewidth=1.2)
    ax_extent.set_ylabel("unique phrases per quota")
    ax_extent.grid(True, alpha=0.3)

    if result.volume:
        vx = [v.year_start for v in result.volume]
        vy = [v.articles for v in result.volume]
        ax_volume.bar(vx, vy, width=0.8 * max(1, vx[1] - vx[0] if len(vx) > 1 else 1))
    ax_volume.set_xlabel("publication year")
    ax_volume.set_ylabel("articles")
    ax_volume.grid(True, alpha=0.3)
    _save(fig, path)


def teams_figure(result: TeamSizeResult, path: Path) -> None:
    """Normalized extent per team-size bin."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    labels = [m.group.label for m in result.measurements]
    values = [result.normalized[label] for label in labels]
    ax.bar(range(len(labels)), values)
    ax.set_xticks(range(len(labels)), labels, rotation=45, ha="right")
    ax.set_ylabel("unique phrases (relative to peak bin)")
    ax.set_xlabel("authors per article")
    ax.grid(True, axis="y", alpha=0.3)
    _save(fig, path)


def sensitivity_figure(
    curves: dict[str, SensitivityCurve], path: Path, xlabel: str = "replaced fraction"
) -> None:
    """Replacement curves against the shared jackknife band."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    band_drawn = False
    for label, curve in sorted(curves.items()):
        if not band_drawn:
            lo, hi = curve.reference_band
            ax.axhspan(lo, hi, color="0.85", label="jackknife band")
            band_drawn = True
        ax.plot(curve.fractions, curve.values, marker="o", label=label or "curve")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("unique phrases per quota")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def jackknife_figure(values: Sequence[float], path: Path) -> None:
    """Per-drawing values around their mean."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    xs = range(len(values))
    ax.plot(xs, values, marker="o", linestyle="none")
    mean = sum(values) / len(values)
    ax.axhline(mean, linestyle="--", linewidth=1)
    ax.set_xlabel("drawing")
    ax.set_ylabel("unique phrases per quota")
    ax.set_xticks(list(xs))
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def fit_figure(fit: ScalingFit, path: Path) -> None:
    """Fitted piecewise factor over the windowed (n_small, ratio) points."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    xs = [x for x, _ in fit.points]
    ys = [y for _, y in fit.points]
    ax.plot(xs, ys, marker="o", linestyle="none", alpha=0.6, label="windows")
    model = fit.model
    lo, hi = min(xs), max(xs)
    grid = [lo + (hi - lo) * i / 200 for i in range(201)]
    ax.plot(grid, [model.factor(x) for x in grid], linewidth=1.5, label="fitted factor")
    ax.axvline(model.threshold, linestyle=":", linewidth=1)
    ax.set_xlabel("unique phrases in small quota")
    ax.set_ylabel("reference/small unique ratio")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)
