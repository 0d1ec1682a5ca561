"""Deterministic artifact writers: summary.json, manifest.json, CSV tables.

``summary.json`` is the machine-readable verdict of an experiment and must
be byte-identical across re-runs with the same seed, so it contains no
timestamps, runtimes, paths, or environment echoes -- those go into
``manifest.json``, which is allowed to differ between runs.

Floats are serialized with Python's shortest-round-trip ``repr`` (the json
module's default), which is deterministic for identical IEEE-754 values.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

__all__ = [
    "jsonable",
    "check",
    "all_passed",
    "write_summary",
    "write_manifest",
    "write_csv",
]

_COMPARATORS = {
    "<=": lambda v, t: v <= t,
    ">=": lambda v, t: v >= t,
    "==": lambda v, t: v == t,
}


def check(name: str, value, threshold, comparison: str = "<=") -> dict:
    """One acceptance check: measured value vs threshold."""
    if comparison not in _COMPARATORS:
        raise ValueError(f"unknown comparison {comparison!r}")
    passed = bool(_COMPARATORS[comparison](value, threshold))
    return {
        "name": name,
        "value": jsonable(value),
        "threshold": jsonable(threshold),
        "comparison": comparison,
        "pass": passed,
    }


def all_passed(checks: list[dict]) -> bool:
    return all(c["pass"] for c in checks)


def jsonable(obj):
    """Convert numerics (including complex and small arrays) to JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(dataclasses.asdict(obj))
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    return obj


def write_summary(out_dir: Path, summary: dict) -> Path:
    path = Path(out_dir) / "summary.json"
    path.write_text(json.dumps(jsonable(summary), sort_keys=True, indent=2) + "\n")
    return path


def write_manifest(out_dir: Path, manifest: dict) -> Path:
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(jsonable(manifest), sort_keys=True, indent=2) + "\n")
    return path


def write_csv(out_dir: Path, filename: str, header: list[str], rows) -> Path:
    """Plot-ready CSV with full-precision (%.17g) numeric formatting."""
    path = Path(out_dir) / filename
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (float, np.floating)):
                cells.append(format(float(cell), ".17g"))
            elif isinstance(cell, (complex, np.complexfloating)):
                cells.append(format(float(cell.real), ".17g"))
                cells.append(format(float(cell.imag), ".17g"))
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")
    return path
