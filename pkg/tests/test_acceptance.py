"""End-to-end acceptance checks with frozen fixtures.

Each test pins one externally visible guarantee: the worked phrase
extraction examples, smooth preset scaling, agreement with the
closed-form occupancy expectation, calibration of the jackknife spread,
the behavior of the contamination and mixing protocols, round-tripping
a known two-regime corpus through the scaling fit, stability under
dictionary thinning and a longer phrase cap, and bit-level
reproducibility of command outputs.  Expected numbers were computed
independently (closed forms or generator parameters) before the
assertions were written; seeds are frozen.
"""

import os
import time
from pathlib import Path
from statistics import fmean

import pytest

from cogextent.analysis import (
    AnalysisConfig,
    contamination_test,
    dictionary_sensitivity,
    jackknife_uncertainty,
    mixing_test,
    phrase_length_sensitivity,
    timeline_analysis,
    trend_sign_agreement,
)
from cogextent.cli import main
from cogextent.extent import apply_scaling, fit_scaling_model, load_scaling_preset
from cogextent.phrases import PhrasePipeline, base_dictionary
from cogextent.quotas import GroupKey, ordered_contributions, slice_quotas
from cogextent.records import load_records
from cogextent.synth import CorpusSegment, field_dictionary, generate_corpus


@pytest.fixture(scope="module")
def base_dict():
    return base_dictionary()


def reference_config(base_dict, seed):
    return AnalysisConfig(dictionary=base_dict, q_ref=10000, q_small=3000,
                          seed=seed)


def recent_year_corpus(seed, titles=6000):
    """One year of titles with topic-concentrated word use."""
    return generate_corpus(
        [CorpusSegment(year_start=2020, year_end=2020, titles_per_year=titles,
                       phrases_per_title=4, zipf_topics=25, zipf_core=400,
                       zipf_exponent=1.3)],
        seed=seed,
    )


# ---------------------------------------------------------------------------
# phrase extraction
# ---------------------------------------------------------------------------

def test_shared_suffix_titles_yield_one_reference_phrase(base_dict):
    pipeline = PhrasePipeline(base_dict, 3)
    for title in (
        "High resolution energy filtered scanning tunneling microscopy",
        "Low temperature scanning tunneling microscopy",
    ):
        assert pipeline.extract(title) == [
            ("scanning", "tunneling", "microscopy")
        ], title


# ---------------------------------------------------------------------------
# preset scaling models
# ---------------------------------------------------------------------------

def test_presets_join_smoothly_at_their_thresholds():
    for name in ("physics", "astronomy"):
        model = load_scaling_preset(name)
        assert model.factor(model.threshold) == pytest.approx(2.50, abs=0.01)
        assert model.factor(model.threshold + 1) == pytest.approx(2.50, abs=0.01)
        assert model.factor(model.threshold - 200) == model.baseline_factor
        at_threshold = apply_scaling(model.threshold, model)
        assert at_threshold == pytest.approx(model.threshold * 2.50,
                                             abs=0.01 * model.threshold)
        gap = abs(model.slope * model.threshold + model.intercept
                  - model.baseline_factor)
        assert gap <= 0.01


# ---------------------------------------------------------------------------
# occupancy expectation
# ---------------------------------------------------------------------------

def test_uniform_corpus_matches_occupancy_expectation(base_dict):
    # 100 one-year windows of exactly one quota each; every window is an
    # independent draw of 10000 words from a 5000-word vocabulary
    started = time.monotonic()
    segment = CorpusSegment(year_start=1900, year_end=1999,
                            titles_per_year=2500, phrases_per_title=4,
                            vocabulary_size=5000)
    records = generate_corpus([segment], seed=2)
    config = AnalysisConfig(dictionary=base_dict, q_ref=10000, q_small=3000,
                            window_years=1, seed=2)
    result = timeline_analysis(records, config)
    values = [m.raw_unique for m in result.extent]
    assert len(values) == 100

    vocabulary, quota = 5000, 10000
    expected = vocabulary * (1 - (1 - 1 / vocabulary) ** quota)  # 4323.46
    mean = fmean(values)
    spread = (sum((v - mean) ** 2 for v in values) / (len(values) - 1)) ** 0.5
    assert abs(mean - expected) <= 3 * spread / len(values) ** 0.5
    assert time.monotonic() - started < 60


# ---------------------------------------------------------------------------
# jackknife calibration
# ---------------------------------------------------------------------------

def test_jackknife_spread_is_calibrated_on_homogeneous_corpus(base_dict):
    config = reference_config(base_dict, seed=0)
    stream = ordered_contributions(recent_year_corpus(seed=0), config.pipeline,
                                   0, "acceptance")
    quotas, _ = slice_quotas(stream, GroupKey("corpus", "all"), 10000)
    result = jackknife_uncertainty(quotas[0], quotas[1], config,
                                   drawings=10, seed=0)
    assert result.drawings == 10
    assert 0.003 <= result.stdev / result.mean <= 0.016


# ---------------------------------------------------------------------------
# contamination protocol
# ---------------------------------------------------------------------------

def test_foreign_vocabulary_is_detected_at_small_fractions(base_dict):
    detected = 0
    for seed in range(20):
        base = recent_year_corpus(seed)
        foreign = generate_corpus(
            [CorpusSegment(year_start=2020, year_end=2020,
                           titles_per_year=1000, phrases_per_title=4,
                           vocabulary_size=5000, vocabulary_offset=1_000_000)],
            seed=1000 + seed, id_prefix="foreign",
        )
        curve = contamination_test(
            base, foreign, reference_config(base_dict, seed),
            fractions=(0.0, 0.01, 0.02), seed=seed,
        )
        inside = curve.within_band()
        assert inside[0]
        if not all(inside[1:]):
            detected += 1
    assert detected >= 18  # at least 90% of runs


def test_equivalent_corpus_stays_inside_band(base_dict):
    clean = 0
    for seed in range(20):
        base = recent_year_corpus(seed)
        curve = contamination_test(
            base, base, reference_config(base_dict, seed),
            fractions=(0.0, 0.005, 0.01, 0.02), seed=seed,
        )
        clean += all(curve.within_band())
    assert clean >= 19  # at least 95% of runs


# ---------------------------------------------------------------------------
# mixing protocol
# ---------------------------------------------------------------------------

def test_mixing_from_subset_vocabulary_never_raises_diversity(base_dict):
    fractions = (0.0, 0.05, 0.1, 0.2)
    curves, half_widths = [], []
    for seed in range(5):
        solo = generate_corpus(
            [CorpusSegment(year_start=2000, year_end=2001,
                           titles_per_year=3000, phrases_per_title=4,
                           vocabulary_size=5000, team_size_weights=((1, 1.0),))],
            seed=seed,
        )
        team = generate_corpus(
            [CorpusSegment(year_start=2000, year_end=2001,
                           titles_per_year=750, phrases_per_title=4,
                           vocabulary_size=1250,  # first quarter of solo's words
                           team_size_weights=((15, 1.0),))],
            seed=100 + seed, id_prefix="team",
        )
        result = mixing_test(solo + team, "[1,2)", ["[11,21)"],
                             reference_config(base_dict, seed),
                             fractions=fractions, seed=seed)
        curve = result["[11,21)"]
        curves.append(curve.values)
        low, high = curve.reference_band
        half_widths.append((high - low) / 2)
    means = [fmean(c[i] for c in curves) for i in range(len(fractions))]
    sigma = fmean(half_widths)
    for left, right in zip(means, means[1:]):
        assert right - left <= sigma  # non-increasing up to one band width
    assert means[-1] < means[0] - 2 * sigma  # and clearly falling overall


# ---------------------------------------------------------------------------
# scaling fit round trip
# ---------------------------------------------------------------------------

# fresh_fraction and vocabulary_size per year block, solved so that each
# year's 10000 phrases have an expected unique count matching a piecewise
# ratio curve: flat at 2.5 up to 1900, then rising by 6.5e-4 per unit
TWO_REGIME_SCHEDULE = [
    (1900, 1909, 0.3194, 556),
    (1910, 1912, 0.4146, 793),
    (1913, 1915, 0.4744, 780),
    (1916, 1918, 0.5382, 757),
    (1919, 1921, 0.6060, 723),
    (1922, 1924, 0.6775, 683),
    (1925, 1927, 0.7509, 660),
    (1928, 1930, 0.8119, 863),
]


def test_two_regime_corpus_round_trips_through_fit(base_dict):
    segments = [
        CorpusSegment(year_start=start, year_end=end, titles_per_year=2500,
                      phrases_per_title=4, vocabulary_size=vocabulary,
                      fresh_fraction=fresh)
        for start, end, fresh, vocabulary in TWO_REGIME_SCHEDULE
    ]
    records = generate_corpus(segments, seed=4)
    fit = fit_scaling_model(records, 3000, 10000, 4,
                            PhrasePipeline(base_dict, 3), min_windows=30)
    model = fit.model

    def generator_ratio(x):
        return 2.5 if x <= 1900 else 2.5 + 6.5e-4 * (x - 1900)

    assert len(fit.points) >= 30
    worst = max(
        abs(model.factor(x) - generator_ratio(x)) / generator_ratio(x)
        for x, _ in fit.points
    )
    assert worst <= 0.03
    gap = abs(model.slope * model.threshold + model.intercept
              - model.baseline_factor)
    assert gap <= 0.01


# ---------------------------------------------------------------------------
# dictionary and phrase-cap stability
# ---------------------------------------------------------------------------

def test_halving_field_dictionary_preserves_trend(base_dict):
    segments = [
        CorpusSegment(year_start=year, year_end=year + 1, titles_per_year=600,
                      phrases_per_title=4, vocabulary_size=400,
                      separator="general", field_word_count=200,
                      fresh_fraction=0.04 * i)
        for i, year in enumerate(range(1990, 2010, 2))
    ]
    records = generate_corpus(segments, seed=6)
    config = AnalysisConfig(dictionary=base_dict, q_ref=2000, q_small=600,
                            seed=6)
    result = dictionary_sensitivity(records, field_dictionary(200), config,
                                    keep_fraction=0.5, trials=5, seed=6)
    steps = len(result.baseline.extent) - 1
    preserved = sum(
        trend_sign_agreement(result.baseline.extent, trial.extent) * steps
        for trial in result.trials
    )
    assert preserved / (steps * len(result.trials)) >= 0.9


def test_longer_phrase_cap_shifts_totals_by_little(base_dict):
    # a tight vocabulary guarantees some three-word draws equal the
    # truncated tail of four-word draws, so the cap has a real effect
    segment = CorpusSegment(
        year_start=1990, year_end=1997, titles_per_year=600,
        phrases_per_title=4, vocabulary_size=30,
        phrase_length_weights=((1, 0.55), (3, 0.25), (4, 0.2)),
    )
    records = generate_corpus([segment], seed=6)
    config = AnalysisConfig(dictionary=base_dict, q_ref=2000, q_small=600,
                            seed=6)
    baseline, alternative, _ = phrase_length_sensitivity(records, config)
    total = sum(m.corrected_unique for m in baseline.extent)
    total_alt = sum(m.corrected_unique for m in alternative.extent)
    assert total_alt != total  # the fixture does exercise the cap
    assert abs(total_alt - total) / total <= 0.03


# ---------------------------------------------------------------------------
# reproducibility of command outputs
# ---------------------------------------------------------------------------

def test_rerun_with_same_config_is_byte_identical(tmp_path, capsys):
    synth_dir = tmp_path / "corpus"
    assert main([
        "synth", "--out", str(synth_dir), "--seed", "12",
        "--years", "1990:1995", "--titles-per-year", "400",
        "--vocabulary", "400", "--no-figures",
    ]) == 0
    corpus = synth_dir / "corpus.csv"

    commands = {
        "measure": ["measure", "--input", str(corpus), "--seed", "3",
                    "--quota", "2000", "--small-quota", "600"],
        "jackknife": ["jackknife", "--input", str(corpus), "--seed", "3",
                      "--quota", "2000", "--small-quota", "600"],
    }
    for name, argv in commands.items():
        first_dir = tmp_path / name / "first"
        assert main(argv + ["--out", str(first_dir)]) == 0
        snapshot = {p.name: p.read_bytes() for p in first_dir.iterdir()}
        assert snapshot

        assert main(argv + ["--out", str(first_dir)]) == 0  # overwrite in place
        for fname, content in snapshot.items():
            assert (first_dir / fname).read_bytes() == content, (name, fname)

        other_dir = tmp_path / name / "second"
        assert main(argv + ["--out", str(other_dir)]) == 0
        for fname, content in snapshot.items():
            if fname == "manifest.json":
                continue  # records its own output directory
            assert (other_dir / fname).read_bytes() == content, (name, fname)
    capsys.readouterr()


# ---------------------------------------------------------------------------
# real corpus (optional, slow)
# ---------------------------------------------------------------------------

REAL_CORPUS = os.environ.get("COGEXTENT_REAL_CORPUS", "")


@pytest.mark.skipif(not REAL_CORPUS, reason=(
    "set COGEXTENT_REAL_CORPUS to a prepared article CSV "
    "(id,title,year,...) to run this hours-scale check"
))
def test_real_corpus_reproduces_published_scaling(base_dict):
    records, manifest = load_records(Path(REAL_CORPUS), fmt="csv")
    assert manifest.record_count > 100_000
    fit = fit_scaling_model(records, 3000, 10000, 0,
                            PhrasePipeline(base_dict, 3))
    published = load_scaling_preset("physics")
    assert fit.model.slope == pytest.approx(published.slope, rel=0.15)
    assert fit.model.intercept == pytest.approx(published.intercept, rel=0.15)

    # wartime: publication volume collapses several-fold, but the
    # diversity of what is published should not fall beyond noise
    config = AnalysisConfig(dictionary=base_dict, q_ref=10000, q_small=3000,
                            scaling=fit.model, seed=0)
    result = timeline_analysis(
        [r for r in records if 1935 <= r.year <= 1950], config
    )
    volumes = {v.label: v.articles for v in result.volume}
    assert max(volumes.values()) >= 4 * min(volumes.values())
    war = [m for m in result.extent if m.group.bounds[0] >= 1939
           and m.group.bounds[1] <= 1946]
    before = [m for m in result.extent if m.group.bounds[1] < 1939]
    sigma = max((m.stdev or 0.0) for m in result.extent)
    assert war and before
    floor = min(m.corrected_unique for m in before) - 2 * sigma
    assert all(m.corrected_unique >= floor for m in war)
