"""Delimited and JSON output with reproducibility sidecars.

Every table written here gets a ``<name>.meta.json`` sidecar recording the
tool version and a hash of the resolved run configuration, so any output
file can be traced back to the exact settings that produced it.  Outputs
carry no timestamps: rerunning with the same inputs yields identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__


def config_hash(resolved: dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a resolved configuration.

    The output directory is excluded: it names where results land, not
    what was computed, and the hash should match across destinations.
    """
    hashed = {k: v for k, v in resolved.items() if k != "out"}
    canonical = json.dumps(hashed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_json(path: Path, payload: Any) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=False) + "\n", encoding="utf-8"
    )


def write_table(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    resolved_config: dict[str, Any],
) -> None:
    """Write a UTF-8, LF-terminated CSV plus its metadata sidecar."""
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])
    sidecar = path.with_name(path.stem + ".meta.json")
    write_json(
        sidecar,
        {
            "tool": "cogextent",
            "version": __version__,
            "table": path.name,
            "config_sha256": config_hash(resolved_config),
        },
    )


def emit_error(code: str, message: str, **extra: Any) -> None:
    """Machine-readable error on stderr; one JSON object per failure."""
    payload = {"error": code, "message": message}
    payload.update(extra)
    print(json.dumps(payload), file=sys.stderr)


def format_float(value: float | None, digits: int = 4) -> str | None:
    """Stable decimal rendering for CSV cells (no scientific notation)."""
    if value is None:
        return None
    return f"{value:.{digits}f}"
