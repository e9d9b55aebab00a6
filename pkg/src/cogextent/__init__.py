"""Cognitive-extent measurement for bodies of scientific literature.

The size of a literature is usually counted in articles; this package
instead counts the distinct title phrases found in fixed-size phrase
quotas, which tracks how much conceptual territory the literature covers
rather than how much is published.
"""

__version__ = "0.1.0"

from .analysis import (
    AnalysisConfig,
    DictionarySensitivityResult,
    JackknifeResult,
    SensitivityCurve,
    TeamSizeResult,
    TimelineResult,
    contamination_test,
    dictionary_sensitivity,
    jackknife_uncertainty,
    mixing_test,
    phrase_length_sensitivity,
    team_size_analysis,
    timeline_analysis,
    trend_sign_agreement,
)
from .errors import (
    CogextentError,
    ConfigError,
    DictionaryFormatError,
    FeasibilityError,
    InsufficientDataError,
    InsufficientVolumeError,
    InvalidMeasurementError,
    NoDynamicRangeError,
)
from .extent import (
    ExtentMeasurement,
    ScalingFit,
    ScalingModel,
    apply_scaling,
    count_unique,
    fit_scaling_model,
    load_scaling_preset,
    measure_extent,
)
from .phrases import (
    GeneralWordDictionary,
    Phrase,
    PhrasePipeline,
    base_dictionary,
    build_word_candidates,
    collate_plural,
    normalize_title,
    parse_phrases,
)
from .quotas import (
    AuthorStats,
    GroupKey,
    GroupQuotaReport,
    Quota,
    QuotaArticle,
    build_quotas,
    team_bins,
    team_grouper,
    unique_author_stats,
    year_window_grouper,
)
from .records import (
    ArticleRecord,
    CorpusManifest,
    dedupe_records,
    filter_derivative,
    load_records,
)
from .synth import CorpusSegment, field_dictionary, generate_corpus

__all__ = [
    "__version__",
    "AnalysisConfig",
    "ArticleRecord",
    "AuthorStats",
    "CogextentError",
    "ConfigError",
    "CorpusManifest",
    "CorpusSegment",
    "DictionaryFormatError",
    "DictionarySensitivityResult",
    "ExtentMeasurement",
    "FeasibilityError",
    "GeneralWordDictionary",
    "GroupKey",
    "GroupQuotaReport",
    "InsufficientDataError",
    "InsufficientVolumeError",
    "InvalidMeasurementError",
    "JackknifeResult",
    "NoDynamicRangeError",
    "Phrase",
    "PhrasePipeline",
    "Quota",
    "QuotaArticle",
    "ScalingFit",
    "ScalingModel",
    "SensitivityCurve",
    "TeamSizeResult",
    "TimelineResult",
    "apply_scaling",
    "base_dictionary",
    "build_quotas",
    "build_word_candidates",
    "collate_plural",
    "contamination_test",
    "count_unique",
    "dedupe_records",
    "dictionary_sensitivity",
    "field_dictionary",
    "filter_derivative",
    "fit_scaling_model",
    "generate_corpus",
    "jackknife_uncertainty",
    "load_records",
    "load_scaling_preset",
    "measure_extent",
    "mixing_test",
    "normalize_title",
    "parse_phrases",
    "phrase_length_sensitivity",
    "team_bins",
    "team_grouper",
    "team_size_analysis",
    "timeline_analysis",
    "trend_sign_agreement",
    "unique_author_stats",
    "year_window_grouper",
]
