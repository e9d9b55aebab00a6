"""Run configuration: defaults, config-file parsing, and CLI merging.

Precedence is defaults < config file < command-line flags.  The config file
is flat ``key = value`` text with ``#`` comments; keys match the long flag
names with dashes replaced by underscores, and repeating a key appends to
list-valued settings (for example ``dictionary``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .analysis import DEFAULT_CONTAMINATION_FRACTIONS
from .errors import ConfigError
from .quotas import DEFAULT_TEAM_EDGES

# Commands whose outputs depend on shuffling or sampling; these refuse to
# run without an explicit seed so results are reproducible by construction.
SEEDED_COMMANDS = frozenset(
    {"measure", "teams", "contaminate", "mix", "jackknife", "fit-scaling", "synth"}
)


@dataclass
class RunConfig:
    """Every setting a command can consume; commands read what they need."""

    command: str = ""
    input: Path | None = None
    format: str = "csv"
    delimiter: str = ","
    schema_map: dict[str, str] = field(default_factory=dict)
    dictionary: list[Path] = field(default_factory=list)
    no_base_dictionary: bool = False
    quota: int = 10000
    small_quota: int = 3000
    scaling: str = "none"
    seed: int | None = None
    group_by: str = "year"
    window_years: int = 2
    bins: list[int] = field(default_factory=lambda: list(DEFAULT_TEAM_EDGES))
    max_phrase_words: int = 3
    out: Path = Path("cogextent-out")
    figures: bool = True
    year_min: int = 1800
    year_max: int = 2100
    keep_derivative: bool = False
    keep_duplicates: bool = False

    # protocol settings
    fractions: list[float] = field(default_factory=lambda: list(DEFAULT_CONTAMINATION_FRACTIONS))
    drawings: int = 10
    recent_years: int = 5
    base_bin: str = ""
    donor_bins: list[str] = field(default_factory=list)
    contaminant: Path | None = None

    # candidate mining
    strategy: str = "year_presence"
    min_years: int = 50
    top_k: int = 1000

    # scaling fit
    min_windows: int = 30

    # synthetic corpora
    segments: Path | None = None
    years: str = "1990:2009"
    titles_per_year: int = 2500
    phrases_per_title: int = 4
    vocabulary: int = 5000
    vocabulary_offset: int = 0
    fresh_fraction: float = 0.0
    zipf_topics: int = 0
    zipf_core: int = 400
    zipf_exponent: float = 1.3
    separator: str = "comma"
    field_words: int = 0
    team_weights: str = "1:1"
    with_authors: bool = False
    author_pool: int = 1000
    venue: str = "synthetic"
    id_prefix: str = "syn"

    def validate(self) -> None:
        if self.format not in ("csv", "jsonl"):
            raise ConfigError(f"unknown input format {self.format!r}", field="format")
        if self.group_by not in ("year", "team"):
            raise ConfigError(f"unknown grouping {self.group_by!r}", field="group_by")
        if self.quota < 1 or self.small_quota < 1:
            raise ConfigError("quota sizes must be positive", field="quota")
        if self.small_quota > self.quota:
            raise ConfigError(
                f"small quota {self.small_quota} exceeds quota {self.quota}",
                field="small_quota",
            )
        if self.window_years < 1:
            raise ConfigError("window_years must be positive", field="window_years")
        if self.max_phrase_words < 1:
            raise ConfigError("max_phrase_words must be positive", field="max_phrase_words")
        if not self.bins or self.bins[0] != 1 or any(
            b <= a for a, b in zip(self.bins, self.bins[1:])
        ):
            raise ConfigError(
                "bins must be strictly increasing and start at 1", field="bins"
            )
        if self.command in SEEDED_COMMANDS and self.seed is None:
            raise ConfigError(
                f"the {self.command} command samples randomly; "
                "pass --seed for a reproducible run",
                field="seed",
            )
        for path in self.dictionary:
            if not Path(path).is_file():
                raise ConfigError(f"dictionary file not found: {path}", field="dictionary")
        if self.scaling not in ("none", "physics", "astronomy") and not Path(self.scaling).is_file():
            raise ConfigError(
                f"scaling must be a preset name or a JSON file; got {self.scaling!r}",
                field="scaling",
            )

    def resolved(self) -> dict[str, Any]:
        """JSON-serializable view of every setting, for manifests and hashing."""
        out: dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, list):
                value = [str(v) if isinstance(v, Path) else v for v in value]
            out[f.name] = value
        return out


_LIST_FIELDS = {"dictionary", "bins", "fractions", "donor_bins"}
_BOOL_FIELDS = {"no_base_dictionary", "figures", "keep_derivative", "keep_duplicates", "with_authors"}
_PATH_FIELDS = {"input", "out", "contaminant", "segments"}
_INT_FIELDS = {
    "quota", "small_quota", "seed", "window_years", "max_phrase_words",
    "year_min", "year_max", "drawings", "recent_years", "min_years", "top_k",
    "min_windows", "titles_per_year", "phrases_per_title", "vocabulary",
    "vocabulary_offset", "zipf_topics", "zipf_core", "field_words",
    "author_pool",
}
_FLOAT_FIELDS = {"fresh_fraction", "zipf_exponent"}

_KNOWN_FIELDS = {f.name for f in fields(RunConfig)} | {"map"}


def parse_config_file(path: str | Path) -> dict[str, Any]:
    """Read ``key = value`` lines; repeated keys accumulate into lists."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        raw = raw.strip()
        if key not in _KNOWN_FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown setting {key!r}", field=key)
        if key in _LIST_FIELDS or key == "map":
            values.setdefault(key, [])
            values[key].extend(v.strip() for v in raw.split(",") if v.strip())
        else:
            try:
                values[key] = _coerce(key, raw)
            except ConfigError as err:
                raise ConfigError(f"{path}:{lineno}: {err}", field=key) from err
    for key in values:
        if key in _LIST_FIELDS:
            values[key] = _coerce(key, values[key])
    return values


def _coerce(key: str, value: Any) -> Any:
    try:
        if key in _BOOL_FIELDS:
            if isinstance(value, bool):
                return value
            lowered = str(value).strip().lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        if key in _PATH_FIELDS:
            return Path(value) if value is not None else None
        if key in _INT_FIELDS:
            return int(value)
        if key in _FLOAT_FIELDS:
            return float(value)
        if key == "bins":
            return [int(v) for v in value]
        if key == "fractions":
            return [float(v) for v in value]
        if key in ("dictionary",):
            return [Path(v) for v in value]
        if key == "donor_bins":
            return list(value)
        return value
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad value for {key}: {err}", field=key) from err


def _parse_map_entries(entries: list[str]) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for entry in entries:
        if "=" not in entry:
            raise ConfigError(
                f"schema map entries look like logical=source; got {entry!r}",
                field="map",
            )
        logical, _, source = entry.partition("=")
        mapping[logical.strip()] = source.strip()
    return mapping


def build_config(command: str, cli_values: dict[str, Any]) -> RunConfig:
    """Merge defaults, an optional config file, and CLI flag values.

    ``cli_values`` holds only flags the user actually passed (``None``
    entries are ignored).  The special key ``config`` names the config
    file; ``map`` collects ``logical=source`` schema entries.
    """
    merged: dict[str, Any] = {}
    config_path = cli_values.pop("config", None)
    if config_path is not None:
        merged.update(parse_config_file(config_path))
    for key, value in cli_values.items():
        if value is None:
            continue
        if key in _LIST_FIELDS or key == "map":
            existing = value if isinstance(value, list) else [value]
            merged[key] = existing
        else:
            merged[key] = value

    config = RunConfig(command=command)
    map_entries = merged.pop("map", None)
    if map_entries:
        config.schema_map = _parse_map_entries([str(e) for e in map_entries])
    for key, value in merged.items():
        setattr(config, key, _coerce(key, value))
    config.validate()
    return config
