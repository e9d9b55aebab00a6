"""Timelines, jackknife, contamination, mixing, teams, and sensitivity."""

import pytest

from cogextent.analysis import (
    AnalysisConfig,
    SensitivityCurve,
    contamination_test,
    dictionary_sensitivity,
    jackknife_uncertainty,
    mixing_test,
    phrase_length_sensitivity,
    team_size_analysis,
    timeline_analysis,
    trend_sign_agreement,
)
from cogextent.errors import (
    FeasibilityError,
    InsufficientVolumeError,
    InvalidMeasurementError,
)
from cogextent.extent import ScalingModel
from cogextent.phrases import base_dictionary
from cogextent.quotas import GroupKey, ordered_contributions, slice_quotas
from cogextent.synth import CorpusSegment, field_dictionary, generate_corpus


@pytest.fixture(scope="module")
def base_dict():
    return base_dictionary()


def config(base_dict, **kwargs):
    defaults = dict(dictionary=base_dict, q_ref=2000, q_small=600, seed=11)
    defaults.update(kwargs)
    return AnalysisConfig(**defaults)


def flat_segment(year_start, year_end, titles=125, vocabulary=400, **kwargs):
    # 125 titles * 4 phrases = 500 phrases per year
    return CorpusSegment(
        year_start=year_start, year_end=year_end, titles_per_year=titles,
        phrases_per_title=4, vocabulary_size=vocabulary, **kwargs
    )


# ---------------------------------------------------------------------------
# timeline
# ---------------------------------------------------------------------------

def test_timeline_exact_windows(base_dict):
    cfg = config(base_dict)
    records = generate_corpus([flat_segment(1990, 1997)], seed=1)
    result = timeline_analysis(records, cfg)
    # 500 phrases/year, 2-year windows of 1000 < 2000: pairs of windows merge
    assert [v.label for v in result.volume] == [
        "1990-1991", "1992-1993", "1994-1995", "1996-1997"
    ]
    assert all(v.articles == 250 for v in result.volume)
    assert [m.group.label for m in result.extent] == ["1990-1993", "1994-1997"]
    assert all(m.q_used == 2000 for m in result.extent)
    assert len(result.notes) == 2


def test_timeline_no_merge_when_volume_sufficient(base_dict):
    cfg = config(base_dict)
    records = generate_corpus([flat_segment(1990, 1997, titles=250)], seed=1)
    result = timeline_analysis(records, cfg)
    assert [m.group.label for m in result.extent] == [
        "1990-1991", "1992-1993", "1994-1995", "1996-1997"
    ]
    assert result.notes == []
    assert all(m.quota_count_averaged == 1 for m in result.extent)


def test_timeline_trailing_shortfall_noted(base_dict):
    cfg = config(base_dict)
    records = generate_corpus(
        [flat_segment(1990, 1993, titles=250), flat_segment(1994, 1994, titles=30)],
        seed=1,
    )
    result = timeline_analysis(records, cfg)
    assert [m.group.label for m in result.extent] == ["1990-1991", "1992-1993"]
    assert any("insufficient_volume" in note for note in result.notes)


def test_timeline_with_scaling_uses_small_quota(base_dict):
    model = ScalingModel(q_small=600, q_ref=2000, slope=0.001,
                         intercept=2.5 - 0.001 * 300, threshold=300.0,
                         baseline_factor=2.5)
    cfg = config(base_dict, scaling=model)
    records = generate_corpus([flat_segment(1990, 1993, titles=250)], seed=1)
    result = timeline_analysis(records, cfg)
    assert all(m.q_used == 600 for m in result.extent)
    for m in result.extent:
        assert m.corrected_unique > m.raw_unique  # factor > 1 applied


def test_timeline_empty_corpus(base_dict):
    result = timeline_analysis([], config(base_dict))
    assert result.extent == [] and result.volume == []


def test_timeline_deterministic(base_dict):
    cfg = config(base_dict)
    records = generate_corpus([flat_segment(1990, 1995, titles=250)], seed=1)
    a = timeline_analysis(records, cfg)
    b = timeline_analysis(records, cfg)
    assert a == b


# ---------------------------------------------------------------------------
# jackknife
# ---------------------------------------------------------------------------

def two_quotas(base_dict, titles=1300, seed=21, quota=2000):
    records = generate_corpus(
        [flat_segment(2000, 2000, titles=titles, zipf_topics=10, zipf_core=200)],
        seed=seed,
    )
    cfg = config(base_dict, seed=seed)
    stream = ordered_contributions(records, cfg.pipeline, seed, "jk")
    quotas, _ = slice_quotas(stream, GroupKey("corpus", "all"), quota)
    return cfg, quotas


def test_jackknife_result_shape(base_dict):
    cfg, quotas = two_quotas(base_dict)
    result = jackknife_uncertainty(quotas[0], quotas[1], cfg, drawings=10, seed=5)
    assert result.drawings == 10
    assert len(result.values) == 10
    assert result.stdev > 0
    assert result.half_size > 0
    lo, hi = min(result.values), max(result.values)
    assert lo <= result.mean <= hi


def test_jackknife_deterministic_and_seed_sensitive(base_dict):
    cfg, quotas = two_quotas(base_dict)
    a = jackknife_uncertainty(quotas[0], quotas[1], cfg, seed=5)
    b = jackknife_uncertainty(quotas[0], quotas[1], cfg, seed=5)
    c = jackknife_uncertainty(quotas[0], quotas[1], cfg, seed=6)
    assert a == b
    assert a.values != c.values


def test_jackknife_requires_adjacent_same_group_quotas(base_dict):
    cfg, quotas = two_quotas(base_dict, titles=2000)
    with pytest.raises(InvalidMeasurementError):
        jackknife_uncertainty(quotas[0], quotas[2], cfg)
    other = slice_quotas(
        [a for q in quotas[:2] for a in q.articles],
        GroupKey("corpus", "other"), 2000,
    )[0]
    with pytest.raises(InvalidMeasurementError):
        jackknife_uncertainty(quotas[0], other[1], cfg)


def test_jackknife_insufficient_half_raises(base_dict):
    # articles so long that half of them still fill a quota is the normal
    # case; here the corpus barely fills two quotas with few large articles
    records = generate_corpus(
        [CorpusSegment(year_start=2000, year_end=2000, titles_per_year=7,
                       phrases_per_title=600, vocabulary_size=400)],
        seed=3,
    )
    cfg = config(base_dict, seed=3)
    stream = ordered_contributions(records, cfg.pipeline, 3, "jk")
    quotas, _ = slice_quotas(stream, GroupKey("corpus", "all"), 2000)
    assert len(quotas) == 2
    with pytest.raises(InsufficientVolumeError):
        jackknife_uncertainty(quotas[0], quotas[1], cfg, seed=3)


def test_jackknife_too_few_drawings_rejected(base_dict):
    cfg, quotas = two_quotas(base_dict)
    with pytest.raises(ValueError):
        jackknife_uncertainty(quotas[0], quotas[1], cfg, drawings=1)


# ---------------------------------------------------------------------------
# contamination
# ---------------------------------------------------------------------------

def protocol_corpus(seed, offset=0, titles=1300):
    return generate_corpus(
        [flat_segment(2000, 2000, titles=titles, vocabulary=400,
                      vocabulary_offset=offset, zipf_topics=10, zipf_core=200)],
        seed=seed,
        id_prefix=f"c{offset}",
    )


def test_self_contamination_stays_in_band(base_dict):
    cfg = config(base_dict, seed=31)
    base = protocol_corpus(seed=31)
    curve = contamination_test(
        base, base, cfg, fractions=(0.0, 0.005, 0.01, 0.02), seed=31
    )
    assert curve.fractions == [0.0, 0.005, 0.01, 0.02]
    assert all(curve.within_band())


def test_disjoint_contamination_leaves_band(base_dict):
    cfg = config(base_dict, seed=31)
    base = protocol_corpus(seed=31)
    foreign = generate_corpus(
        [flat_segment(2000, 2000, titles=1300, vocabulary=400,
                      vocabulary_offset=100000)],
        seed=32, id_prefix="f",
    )
    curve = contamination_test(
        base, foreign, cfg, fractions=(0.0, 0.05, 0.1, 0.2), seed=31
    )
    assert curve.within_band()[0]
    assert not curve.within_band()[-1]
    # replacing redundant articles by unseen vocabulary adds diversity
    assert curve.values[-1] > curve.values[0]


def test_contamination_zero_only_fraction_rejected(base_dict):
    cfg = config(base_dict, seed=31)
    base = protocol_corpus(seed=31)
    with pytest.raises(ValueError):
        contamination_test(base, base, cfg, fractions=(0.1, 0.2))
    with pytest.raises(ValueError):
        contamination_test(base, base, cfg, fractions=(0.0, 0.2, 0.1))
    with pytest.raises(ValueError):
        contamination_test(base, base, cfg, fractions=(0.0, 1.0))


def test_contamination_needs_two_quotas(base_dict):
    cfg = config(base_dict, seed=31)
    thin = protocol_corpus(seed=31, titles=600)  # 2400 phrases: one quota only
    with pytest.raises(InsufficientVolumeError):
        contamination_test(thin, thin, cfg, fractions=(0.0, 0.01), seed=31)


def test_contamination_small_donor_pool_infeasible(base_dict):
    cfg = config(base_dict, seed=31)
    base = protocol_corpus(seed=31)
    tiny = protocol_corpus(seed=33, offset=50000, titles=2)
    with pytest.raises(FeasibilityError) as exc:
        contamination_test(base, tiny, cfg, fractions=(0.0, 0.5), seed=31)
    assert 0 < exc.value.max_feasible_fraction < 0.5


def test_contamination_deterministic(base_dict):
    cfg = config(base_dict, seed=31)
    base = protocol_corpus(seed=31)
    foreign = protocol_corpus(seed=32, offset=100000)
    a = contamination_test(base, foreign, cfg, fractions=(0.0, 0.1), seed=31)
    b = contamination_test(base, foreign, cfg, fractions=(0.0, 0.1), seed=31)
    assert a == b


def test_sensitivity_curve_validation():
    with pytest.raises(ValueError):
        SensitivityCurve([0.0, 0.1], [5.0], (4.0, 6.0))
    with pytest.raises(ValueError):
        SensitivityCurve([0.1, 0.2], [5.0, 5.0], (4.0, 6.0))
    with pytest.raises(ValueError):
        SensitivityCurve([0.0, 0.1], [9.0, 5.0], (4.0, 6.0))


# ---------------------------------------------------------------------------
# mixing
# ---------------------------------------------------------------------------

def mixing_corpus(seed=41):
    # solo articles draw from the full vocabulary; big teams only from the
    # first quarter of it (a strict subset)
    solo = CorpusSegment(year_start=2000, year_end=2001, titles_per_year=700,
                         phrases_per_title=4, vocabulary_size=400,
                         team_size_weights=((1, 1.0),))
    team = CorpusSegment(year_start=2002, year_end=2003, titles_per_year=700,
                         phrases_per_title=4, vocabulary_size=100,
                         team_size_weights=((15, 1.0),))
    return generate_corpus([solo], seed=seed) + generate_corpus([team], seed=seed + 1,
                                                                id_prefix="team")


def test_mixing_produces_one_curve_per_donor(base_dict):
    cfg = config(base_dict, seed=41)
    curves = mixing_test(
        mixing_corpus(), "[1,2)", None, cfg, fractions=(0.0, 0.1, 0.2), seed=41
    )
    assert set(curves) == {"[11,21)"}
    curve = curves["[11,21)"]
    assert curve.fractions == [0.0, 0.1, 0.2]
    low, high = curve.reference_band
    assert low < curve.values[0] < high


def test_mixing_subset_vocabulary_drops_diversity(base_dict):
    cfg = config(base_dict, seed=41)
    curves = mixing_test(
        mixing_corpus(), "[1,2)", ["[11,21)"], cfg,
        fractions=(0.0, 0.1, 0.2), seed=41,
    )
    curve = curves["[11,21)"]
    assert curve.values[-1] < curve.values[0]


def test_mixing_unknown_bins_rejected(base_dict):
    cfg = config(base_dict, seed=41)
    with pytest.raises(ValueError):
        mixing_test(mixing_corpus(), "[9,10)", None, cfg, seed=41)
    with pytest.raises(ValueError):
        mixing_test(mixing_corpus(), "[1,2)", ["nope"], cfg, seed=41)


def test_mixing_empty_base_bin(base_dict):
    cfg = config(base_dict, seed=41)
    with pytest.raises(InsufficientVolumeError):
        mixing_test(mixing_corpus(), "[1001,inf)", None, cfg, seed=41)


# ---------------------------------------------------------------------------
# team sizes
# ---------------------------------------------------------------------------

def team_corpus(seed=51):
    segment = CorpusSegment(
        year_start=2000, year_end=2004, titles_per_year=1500,
        phrases_per_title=4, vocabulary_size=400,
        team_size_weights=((1, 3.0), (2, 2.0), (4, 1.0), (30, 0.2)),
    )
    return generate_corpus([segment], seed=seed)


def test_team_sizes_normalized_peak_is_one(base_dict):
    cfg = config(base_dict, seed=51)
    result = team_size_analysis(team_corpus(), cfg, recent_years=5)
    assert result.window == (2000, 2004)
    assert max(result.normalized.values()) == 1.0
    assert set(result.normalized) == {m.group.label for m in result.measurements}


def test_team_sizes_insufficient_bins_reported(base_dict):
    cfg = config(base_dict, seed=51)
    result = team_size_analysis(team_corpus(), cfg, recent_years=5)
    assert "[21,51)" in result.insufficient        # weight 0.2 bin is thin
    measured = {m.group.label for m in result.measurements}
    assert "[1,2)" in measured and "[2,3)" in measured


def test_team_sizes_window_filter(base_dict):
    cfg = config(base_dict, seed=51)
    narrow = team_size_analysis(team_corpus(), cfg, window=(2003, 2004))
    full = team_size_analysis(team_corpus(), cfg, recent_years=5)
    assert narrow.window == (2003, 2004)
    assert narrow.measurements
    by_label = {m.group.label: m for m in full.measurements}
    for m in narrow.measurements:  # two years feed fewer quotas than five
        assert m.quota_count_averaged <= by_label[m.group.label].quota_count_averaged


def test_team_sizes_empty_recent_window(base_dict):
    cfg = config(base_dict, seed=51)
    with pytest.raises(InsufficientVolumeError):
        team_size_analysis(team_corpus(), cfg, window=(2010, 2014))


# ---------------------------------------------------------------------------
# dictionary and phrase-length sensitivity
# ---------------------------------------------------------------------------

def sensitivity_corpus(seed=61):
    # enough volume that windows still fill one quota when a thinner
    # dictionary merges runs and shrinks the phrase stream
    segments = [
        CorpusSegment(year_start=year, year_end=year + 1, titles_per_year=600,
                      phrases_per_title=4, vocabulary_size=400,
                      separator="general", field_word_count=40,
                      fresh_fraction=0.05 * i)
        for i, year in enumerate(range(1990, 2002, 2))
    ]
    return generate_corpus(segments, seed=seed)


def test_dictionary_sensitivity_full_keep_is_exact(base_dict):
    cfg = config(base_dict, seed=61)
    result = dictionary_sensitivity(
        sensitivity_corpus(), field_dictionary(40), cfg,
        keep_fraction=1.0, trials=2, seed=61,
    )
    assert result.max_relative_deviation == 0.0


def test_dictionary_sensitivity_thinning_changes_results(base_dict):
    cfg = config(base_dict, seed=61)
    result = dictionary_sensitivity(
        sensitivity_corpus(), field_dictionary(40), cfg,
        keep_fraction=0.5, trials=3, seed=61,
    )
    assert result.max_relative_deviation > 0.0
    assert len(result.trials) == 3


def test_dictionary_sensitivity_preserves_trend(base_dict):
    cfg = config(base_dict, seed=61)
    result = dictionary_sensitivity(
        sensitivity_corpus(), field_dictionary(40), cfg,
        keep_fraction=0.5, trials=3, seed=61,
    )
    for trial in result.trials:
        assert trend_sign_agreement(result.baseline.extent, trial.extent) >= 0.8


def test_keep_fraction_validated(base_dict):
    cfg = config(base_dict, seed=61)
    with pytest.raises(ValueError):
        dictionary_sensitivity(sensitivity_corpus(), field_dictionary(40), cfg,
                               keep_fraction=0.0)


def test_trend_sign_agreement_degenerate_cases(base_dict):
    assert trend_sign_agreement([], []) == 1.0


def test_phrase_length_insensitive_for_single_word_phrases(base_dict):
    cfg = config(base_dict, seed=61)
    records = generate_corpus([flat_segment(1990, 1993, titles=250)], seed=61)
    baseline, alternative, worst = phrase_length_sensitivity(records, cfg)
    assert worst == 0.0
    assert [m.corrected_unique for m in baseline.extent] == [
        m.corrected_unique for m in alternative.extent
    ]


def test_phrase_length_small_effect_with_long_runs(base_dict):
    # a tight vocabulary makes some three-word draws coincide with the
    # truncated tail of a four-word draw, so the cap matters -- slightly
    cfg = config(base_dict, seed=62)
    segment = CorpusSegment(
        year_start=1990, year_end=1997, titles_per_year=350,
        phrases_per_title=3, vocabulary_size=30,
        phrase_length_weights=((1, 0.55), (3, 0.25), (4, 0.20)),
    )
    records = generate_corpus([segment], seed=62)
    _, _, worst = phrase_length_sensitivity(records, cfg)
    assert 0.0 < worst <= 0.03
