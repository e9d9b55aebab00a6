"""Command-line interface.

Subcommands mirror the library protocols: ``measure`` (timeline or team
grouping), ``teams``, ``contaminate``, ``mix``, ``jackknife``,
``fit-scaling``, ``candidates``, and ``synth``.  Every command that writes
a delimited report also renders the matching figure next to it (disable
with ``--no-figures``).

Exit codes: 0 success, 2 configuration or validation failure, 3 not enough
volume to fill any quota, 1 other measurement errors.  Failures print one
JSON object to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, figures
from .analysis import (
    AnalysisConfig,
    contamination_test,
    jackknife_uncertainty,
    mixing_test,
    team_size_analysis,
    timeline_analysis,
)
from .config import RunConfig, build_config
from .errors import (
    CogextentError,
    ConfigError,
    InsufficientDataError,
    InsufficientVolumeError,
)
from .extent import fit_scaling_model, load_scaling_preset
from .phrases import GeneralWordDictionary, base_dictionary, build_word_candidates
from .quotas import GroupKey, ordered_contributions, slice_quotas
from .records import dedupe_records, filter_derivative, load_records
from .reports import config_hash, emit_error, format_float, write_json, write_table
from .synth import CorpusSegment, generate_corpus

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_VOLUME = 3


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------

def _resolve_dictionary(cfg: RunConfig) -> GeneralWordDictionary:
    layers = [] if cfg.no_base_dictionary else [base_dictionary()]
    layers.extend(GeneralWordDictionary.from_file(path) for path in cfg.dictionary)
    if not layers:
        raise ConfigError(
            "no dictionary in effect: pass --dictionary or drop --no-base-dictionary",
            field="dictionary",
        )
    head, *rest = layers
    return head.merged(*rest)


def _analysis_config(cfg: RunConfig) -> AnalysisConfig:
    scaling = load_scaling_preset(cfg.scaling)
    if scaling is not None and scaling.q_small != cfg.small_quota:
        raise ConfigError(
            f"scaling model expects small quota {scaling.q_small}, "
            f"configured {cfg.small_quota}",
            field="small_quota",
        )
    if scaling is not None and scaling.q_ref != cfg.quota:
        raise ConfigError(
            f"scaling model expects reference quota {scaling.q_ref}, "
            f"configured {cfg.quota}",
            field="quota",
        )
    return AnalysisConfig(
        dictionary=_resolve_dictionary(cfg),
        q_ref=cfg.quota,
        q_small=cfg.small_quota,
        scaling=scaling,
        max_phrase_words=cfg.max_phrase_words,
        window_years=cfg.window_years,
        seed=cfg.seed if cfg.seed is not None else 0,
    )


def _load_corpus(cfg: RunConfig, path: Path | None = None) -> tuple[list, dict]:
    path = path if path is not None else cfg.input
    if path is None:
        raise ConfigError("an input corpus is required; pass --input", field="input")
    if not Path(path).is_file():
        raise ConfigError(f"input file not found: {path}", field="input")
    records, manifest = load_records(
        path,
        fmt=cfg.format,
        schema_map=cfg.schema_map or None,
        delimiter=cfg.delimiter,
        year_range=(cfg.year_min, cfg.year_max),
    )
    processing = manifest.to_dict()
    if not cfg.keep_derivative:
        records, dropped = filter_derivative(records)
        processing["derivative_dropped"] = dropped
    if not cfg.keep_duplicates:
        records, dropped = dedupe_records(records)
        processing["duplicates_dropped"] = dropped
    processing["analyzed_count"] = len(records)
    return records, processing


def _ensure_out(cfg: RunConfig) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    return cfg.out


def _write_manifest(out: Path, cfg: RunConfig, processing: dict, extra: dict | None = None) -> None:
    payload = {
        "tool": "cogextent",
        "version": __version__,
        "command": cfg.command,
        "config": cfg.resolved(),
        "config_sha256": config_hash(cfg.resolved()),
        "corpus": processing,
    }
    if extra:
        payload.update(extra)
    write_json(out / "manifest.json", payload)


def _measurement_rows(measurements) -> list[list]:
    rows = []
    for m in measurements:
        lo, hi = (m.group.bounds or (None, None))
        rows.append(
            [
                m.group.label,
                None if lo is None else int(lo),
                None if hi is None or hi == float("inf") else int(hi),
                m.q_used,
                m.quota_count_averaged,
                m.raw_unique,
                format_float(m.corrected_unique, 2),
                format_float(m.stdev, 2),
            ]
        )
    return rows


_MEASUREMENT_HEADER = [
    "window",
    "start",
    "end",
    "q_used",
    "quota_count",
    "raw_unique",
    "corrected_unique",
    "stdev",
]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_measure(cfg: RunConfig) -> int:
    records, processing = _load_corpus(cfg)
    analysis = _analysis_config(cfg)
    out = _ensure_out(cfg)
    resolved = cfg.resolved()

    if cfg.group_by == "team":
        return _run_teams(cfg, records, processing, analysis, out, resolved)

    result = timeline_analysis(records, analysis)
    write_table(
        out / "volume.csv",
        ["window", "year_start", "year_end", "articles"],
        [[v.label, v.year_start, v.year_end, v.articles] for v in result.volume],
        resolved,
    )
    write_table(
        out / "extent.csv",
        _MEASUREMENT_HEADER,
        _measurement_rows(result.extent),
        resolved,
    )
    _write_manifest(out, cfg, processing, {"notes": result.notes})
    write_json(
        out / "results.json",
        {
            "command": "measure",
            "notes": result.notes,
            "windows": [
                {
                    "window": m.group.label,
                    "q_used": m.q_used,
                    "quota_count": m.quota_count_averaged,
                    "raw_unique": m.raw_unique,
                    "corrected_unique": m.corrected_unique,
                    "stdev": m.stdev,
                }
                for m in result.extent
            ],
        },
    )
    if cfg.figures:
        figures.timeline_figure(result, out / "extent.png")
    if not result.extent:
        raise InsufficientVolumeError(
            "no window fills a single quota", required=analysis.operating_quota
        )
    return EXIT_OK


def _run_teams(cfg, records, processing, analysis, out, resolved) -> int:
    result = team_size_analysis(
        records,
        analysis,
        edges=cfg.bins,
        recent_years=cfg.recent_years,
    )
    rows = []
    for m in result.measurements:
        lo, hi = m.group.bounds
        rows.append(
            [
                m.group.label,
                int(lo),
                None if hi == float("inf") else int(hi),
                m.q_used,
                m.quota_count_averaged,
                m.raw_unique,
                format_float(m.corrected_unique, 2),
                format_float(result.normalized[m.group.label], 4),
                format_float(m.stdev, 2),
            ]
        )
    write_table(
        out / "teams.csv",
        [
            "bin",
            "authors_min",
            "authors_max",
            "q_used",
            "quota_count",
            "raw_unique",
            "corrected_unique",
            "normalized",
            "stdev",
        ],
        rows,
        resolved,
    )
    _write_manifest(
        out,
        cfg,
        processing,
        {
            "window": list(result.window),
            "insufficient_bins": result.insufficient,
        },
    )
    write_json(
        out / "results.json",
        {
            "command": "teams",
            "window": list(result.window),
            "insufficient_bins": result.insufficient,
            "bins": [
                {
                    "bin": m.group.label,
                    "raw_unique": m.raw_unique,
                    "corrected_unique": m.corrected_unique,
                    "normalized": result.normalized[m.group.label],
                    "quota_count": m.quota_count_averaged,
                    "stdev": m.stdev,
                }
                for m in result.measurements
            ],
        },
    )
    if cfg.figures:
        figures.teams_figure(result, out / "teams.png")
    return EXIT_OK


def cmd_teams(cfg: RunConfig) -> int:
    records, processing = _load_corpus(cfg)
    analysis = _analysis_config(cfg)
    out = _ensure_out(cfg)
    return _run_teams(cfg, records, processing, analysis, out, cfg.resolved())


def _curve_rows(label: str, curve) -> list[list]:
    lo, hi = curve.reference_band
    return [
        [
            label,
            format_float(f, 4),
            format_float(v, 2),
            format_float(lo, 2),
            format_float(hi, 2),
            int(inside),
        ]
        for f, v, inside in zip(curve.fractions, curve.values, curve.within_band())
    ]


_CURVE_HEADER = ["curve", "fraction", "value", "band_low", "band_high", "within_band"]


def cmd_contaminate(cfg: RunConfig) -> int:
    if cfg.contaminant is None:
        raise ConfigError("pass --contaminant with the foreign corpus", field="contaminant")
    records, processing = _load_corpus(cfg)
    foreign, foreign_processing = _load_corpus(cfg, cfg.contaminant)
    analysis = _analysis_config(cfg)
    out = _ensure_out(cfg)
    curve = contamination_test(
        records, foreign, analysis, fractions=cfg.fractions, seed=cfg.seed
    )
    resolved = cfg.resolved()
    write_table(
        out / "contamination.csv", _CURVE_HEADER, _curve_rows("contamination", curve), resolved
    )
    _write_manifest(
        out, cfg, processing, {"contaminant_corpus": foreign_processing}
    )
    write_json(
        out / "results.json",
        {
            "command": "contaminate",
            "fractions": curve.fractions,
            "values": curve.values,
            "reference_band": list(curve.reference_band),
            "within_band": curve.within_band(),
        },
    )
    if cfg.figures:
        figures.sensitivity_figure(
            {"contamination": curve}, out / "contamination.png",
            xlabel="replaced article fraction",
        )
    return EXIT_OK


def cmd_mix(cfg: RunConfig) -> int:
    if not cfg.base_bin:
        raise ConfigError("pass --base-bin, for example '[1,2)'", field="base_bin")
    records, processing = _load_corpus(cfg)
    analysis = _analysis_config(cfg)
    out = _ensure_out(cfg)
    curves = mixing_test(
        records,
        cfg.base_bin,
        cfg.donor_bins or None,
        analysis,
        edges=cfg.bins,
        fractions=cfg.fractions,
        seed=cfg.seed,
    )
    resolved = cfg.resolved()
    rows = []
    for donor in sorted(curves):
        rows.extend(_curve_rows(donor, curves[donor]))
    write_table(out / "mixing.csv", _CURVE_HEADER, rows, resolved)
    _write_manifest(out, cfg, processing, {"base_bin": cfg.base_bin})
    write_json(
        out / "results.json",
        {
            "command": "mix",
            "base_bin": cfg.base_bin,
            "curves": {
                donor: {
                    "fractions": curve.fractions,
                    "values": curve.values,
                    "reference_band": list(curve.reference_band),
                    "within_band": curve.within_band(),
                }
                for donor, curve in curves.items()
            },
        },
    )
    if cfg.figures:
        figures.sensitivity_figure(curves, out / "mixing.png")
    return EXIT_OK


def cmd_jackknife(cfg: RunConfig) -> int:
    records, processing = _load_corpus(cfg)
    analysis = _analysis_config(cfg)
    out = _ensure_out(cfg)
    stream = ordered_contributions(
        records, analysis.pipeline, analysis.seed, "jackknife"
    )
    quotas, _ = slice_quotas(
        stream, GroupKey("corpus", "all"), analysis.operating_quota
    )
    if len(quotas) < 2:
        raise InsufficientVolumeError(
            f"jackknife needs two successive quotas of {analysis.operating_quota} "
            f"phrases; corpus fills {len(quotas)}",
            available=len(quotas),
            required=2,
        )
    result = jackknife_uncertainty(
        quotas[0], quotas[1], analysis, drawings=cfg.drawings, seed=cfg.seed
    )
    resolved = cfg.resolved()
    write_table(
        out / "jackknife.csv",
        ["drawing", "value"],
        [[i, format_float(v, 2)] for i, v in enumerate(result.values)],
        resolved,
    )
    _write_manifest(out, cfg, processing)
    write_json(
        out / "results.json",
        {
            "command": "jackknife",
            "mean": result.mean,
            "stdev": result.stdev,
            "relative_stdev": result.stdev / result.mean if result.mean else None,
            "drawings": result.drawings,
            "half_size": result.half_size,
            "values": result.values,
        },
    )
    if cfg.figures:
        figures.jackknife_figure(result.values, out / "jackknife.png")
    return EXIT_OK


def cmd_fit_scaling(cfg: RunConfig) -> int:
    records, processing = _load_corpus(cfg)
    analysis = _analysis_config(cfg)
    out = _ensure_out(cfg)
    fit = fit_scaling_model(
        records,
        cfg.small_quota,
        cfg.quota,
        cfg.seed,
        analysis.pipeline,
        min_windows=cfg.min_windows,
    )
    resolved = cfg.resolved()
    write_table(
        out / "scaling_points.csv",
        ["n_small", "ratio"],
        [[format_float(x, 2), format_float(r, 5)] for x, r in fit.points],
        resolved,
    )
    _write_manifest(out, cfg, processing)
    write_json(
        out / "scaling_fit.json",
        {
            "command": "fit-scaling",
            "model": fit.model.to_dict(),
            "residual": fit.residual,
            "constrained": fit.constrained,
            "window_count": len(fit.points),
        },
    )
    fit.model.save(out / "scaling_model.json")
    if cfg.figures:
        figures.fit_figure(fit, out / "scaling_fit.png")
    return EXIT_OK


def cmd_candidates(cfg: RunConfig) -> int:
    records, processing = _load_corpus(cfg)
    out = _ensure_out(cfg)
    ranked = build_word_candidates(
        records,
        cfg.strategy,
        min_years=cfg.min_years,
        top_k=cfg.top_k,
    )
    resolved = cfg.resolved()
    write_table(
        out / "candidates.csv",
        ["word", "score"],
        [[word, format_float(score, 4)] for word, score in ranked],
        resolved,
    )
    _write_manifest(out, cfg, processing, {"strategy": cfg.strategy, "count": len(ranked)})
    return EXIT_OK


def _parse_years(text: str) -> tuple[int, int]:
    try:
        start, _, end = text.partition(":")
        return int(start), int(end or start)
    except ValueError as err:
        raise ConfigError(f"years look like 1990:2009; got {text!r}", field="years") from err


def _parse_weights(text: str) -> tuple[tuple[int, float], ...]:
    weights = []
    try:
        for part in text.split(","):
            size, _, weight = part.partition(":")
            weights.append((int(size), float(weight or 1)))
    except ValueError as err:
        raise ConfigError(
            f"weights look like size:weight[,size:weight...]; got {text!r}",
            field="team_weights",
        ) from err
    return tuple(weights)


def _synth_segments(cfg: RunConfig) -> list[CorpusSegment]:
    if cfg.segments is not None:
        if not Path(cfg.segments).is_file():
            raise ConfigError(f"segments file not found: {cfg.segments}", field="segments")
        try:
            entries = json.loads(Path(cfg.segments).read_text(encoding="utf-8"))
            return [CorpusSegment(**entry) for entry in entries]
        except (json.JSONDecodeError, TypeError, ValueError) as err:
            raise ConfigError(f"bad segments file {cfg.segments}: {err}", field="segments") from err
    start, end = _parse_years(cfg.years)
    try:
        return [
            CorpusSegment(
                year_start=start,
                year_end=end,
                titles_per_year=cfg.titles_per_year,
                phrases_per_title=cfg.phrases_per_title,
                vocabulary_size=cfg.vocabulary,
                vocabulary_offset=cfg.vocabulary_offset,
                fresh_fraction=cfg.fresh_fraction,
                zipf_topics=cfg.zipf_topics,
                zipf_core=cfg.zipf_core,
                zipf_exponent=cfg.zipf_exponent,
                separator=cfg.separator,
                field_word_count=cfg.field_words,
                team_size_weights=_parse_weights(cfg.team_weights),
                with_authors=cfg.with_authors,
                author_pool=cfg.author_pool,
                venue=cfg.venue,
            )
        ]
    except ValueError as err:
        raise ConfigError(str(err)) from err


def cmd_synth(cfg: RunConfig) -> int:
    segments = _synth_segments(cfg)
    try:
        records = generate_corpus(segments, cfg.seed, id_prefix=cfg.id_prefix)
    except ValueError as err:
        raise ConfigError(str(err), field="segments") from err
    out = _ensure_out(cfg)
    resolved = cfg.resolved()
    write_table(
        out / "corpus.csv",
        ["id", "title", "year", "venue", "author_count", "authors"],
        [
            [
                r.id,
                r.title,
                r.year,
                r.venue,
                r.author_count,
                ";".join(r.authors) if r.authors else None,
            ]
            for r in records
        ],
        resolved,
    )
    years = [r.year for r in records]
    _write_manifest(
        out,
        cfg,
        {
            "record_count": len(records),
            "year_range": [min(years), max(years)] if years else None,
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogextent",
        description="Measure the cognitive extent of a literature via unique title phrases.",
    )
    parser.add_argument("--version", action="version", version=f"cogextent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value settings file")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="seed for all sampling")
    common.add_argument("--no-figures", dest="figures", action="store_false",
                        default=None, help="skip figure rendering")

    corpus = argparse.ArgumentParser(add_help=False)
    corpus.add_argument("--input", type=Path, help="corpus file")
    corpus.add_argument("--format", choices=["csv", "jsonl"], help="corpus file format")
    corpus.add_argument("--delimiter", help="CSV field delimiter")
    corpus.add_argument("--map", action="append", metavar="LOGICAL=SOURCE",
                        help="schema mapping, repeatable")
    corpus.add_argument("--dictionary", action="append", type=Path,
                        help="extra general-word list, repeatable")
    corpus.add_argument("--no-base-dictionary", dest="no_base_dictionary",
                        action="store_true", default=None,
                        help="drop the built-in common-English list")
    corpus.add_argument("--quota", type=int, help="reference quota size")
    corpus.add_argument("--small-quota", type=int, help="small quota size")
    corpus.add_argument("--scaling", help="physics | astronomy | none | model.json")
    corpus.add_argument("--max-phrase-words", type=int, help="phrase length cap")
    corpus.add_argument("--year-min", type=int, help="reject years below this")
    corpus.add_argument("--year-max", type=int, help="reject years above this")
    corpus.add_argument("--keep-derivative", action="store_true", default=None,
                        help="keep errata/comments/replies")
    corpus.add_argument("--keep-duplicates", action="store_true", default=None,
                        help="keep duplicate titles")

    p = sub.add_parser("measure", parents=[common, corpus],
                       help="unique phrases per year window (or team bin)")
    p.add_argument("--group-by", choices=["year", "team"], help="grouping axis")
    p.add_argument("--window-years", type=int, help="years per window")
    p.add_argument("--bins", type=_int_list, help="team bin edges, e.g. 1,2,3,6")
    p.add_argument("--recent-years", type=int, help="window length for team grouping")

    p = sub.add_parser("teams", parents=[common, corpus],
                       help="unique phrases per team-size bin")
    p.add_argument("--bins", type=_int_list, help="team bin edges, e.g. 1,2,3,6")
    p.add_argument("--recent-years", type=int, help="years included, counted from the last")

    p = sub.add_parser("contaminate", parents=[common, corpus],
                       help="replace articles by a foreign corpus and remeasure")
    p.add_argument("--contaminant", type=Path, help="foreign corpus file")
    p.add_argument("--fractions", type=_float_list, help="e.g. 0,0.01,0.05,0.2")

    p = sub.add_parser("mix", parents=[common, corpus],
                       help="contaminate one team bin from other bins")
    p.add_argument("--base-bin", help="bin under test, e.g. '[1,2)'")
    p.add_argument("--donor-bins", type=_str_list, help="donor bins (default: all others)")
    p.add_argument("--bins", type=_int_list, help="team bin edges")
    p.add_argument("--fractions", type=_float_list, help="e.g. 0,0.01,0.05,0.2")

    p = sub.add_parser("jackknife", parents=[common, corpus],
                       help="uncertainty from half-sampling two quotas")
    p.add_argument("--drawings", type=int, help="number of half-samples")

    p = sub.add_parser("fit-scaling", parents=[common, corpus],
                       help="fit the saturation correction from a reference corpus")
    p.add_argument("--min-windows", type=int, help="minimum reference windows")

    p = sub.add_parser("candidates", parents=[common, corpus],
                       help="rank general-word candidates for review")
    p.add_argument("--strategy",
                   choices=["year_presence", "inverse_volume_weighted", "ed_suffix"])
    p.add_argument("--min-years", type=int, help="distinct-year floor")
    p.add_argument("--top-k", type=int, help="list length for score ranking")

    p = sub.add_parser("synth", parents=[common],
                       help="generate a synthetic corpus CSV")
    p.add_argument("--segments", type=Path, help="JSON list of segment settings")
    p.add_argument("--years", help="year range, e.g. 1990:2009")
    p.add_argument("--titles-per-year", type=int)
    p.add_argument("--phrases-per-title", type=int)
    p.add_argument("--vocabulary", type=int, help="vocabulary size")
    p.add_argument("--vocabulary-offset", type=int, help="shift word namespace")
    p.add_argument("--fresh-fraction", type=float, help="never-repeating word share")
    p.add_argument("--zipf-topics", type=int, help="topic count (0 = uniform model)")
    p.add_argument("--zipf-core", type=int, help="words per topic")
    p.add_argument("--zipf-exponent", type=float)
    p.add_argument("--separator", choices=["comma", "general"])
    p.add_argument("--field-words", type=int, help="synthetic general-word pool")
    p.add_argument("--team-weights", help="size:weight[,size:weight...]")
    p.add_argument("--with-authors", action="store_true", default=None)
    p.add_argument("--author-pool", type=int)
    p.add_argument("--venue")
    p.add_argument("--id-prefix")
    return parser


_HANDLERS = {
    "measure": cmd_measure,
    "teams": cmd_teams,
    "contaminate": cmd_contaminate,
    "mix": cmd_mix,
    "jackknife": cmd_jackknife,
    "fit-scaling": cmd_fit_scaling,
    "candidates": cmd_candidates,
    "synth": cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    values = {k: v for k, v in vars(args).items() if k != "command"}
    try:
        cfg = build_config(args.command, values)
    except ConfigError as err:
        emit_error("config", str(err), field=err.field)
        return EXIT_CONFIG
    try:
        return _HANDLERS[args.command](cfg)
    except ConfigError as err:
        emit_error("config", str(err), field=err.field)
        return EXIT_CONFIG
    except InsufficientVolumeError as err:
        emit_error(
            "insufficient_volume", str(err),
            available=err.available, required=err.required,
        )
        return EXIT_VOLUME
    except InsufficientDataError as err:
        emit_error(
            "insufficient_data", str(err),
            available=err.available, required=err.required,
        )
        return EXIT_VOLUME
    except CogextentError as err:
        emit_error(type(err).__name__, str(err))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
