"""Deterministic report emission: JSON, CSV, and atomic file writes.

Reports must be bit-identical across runs with the same config and seed, so
floats are serialized with their shortest round-trip representation and
anything time- or host-dependent goes into a separate run_meta file.
"""

from __future__ import annotations

import json
import os
import platform
import sys
import tempfile
from pathlib import Path

import numpy as np

__all__ = [
    "jsonable",
    "atomic_write_text",
    "write_json",
    "write_csv",
    "write_run_meta",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1


def jsonable(obj):
    """Recursively convert numpy scalars/arrays and to_dict objects to JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(obj: dict, path: Path) -> None:
    atomic_write_text(path, json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n")


def _format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(header: list[str], rows: list, path: Path) -> None:
    lines = [",".join(header)]
    for row in rows:
        if isinstance(row, dict):
            row = [row[h] for h in header]
        lines.append(",".join(_format_cell(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_run_meta(path: Path, seed, wall_time_s: float, argv: list[str] | None = None) -> None:
    """Host/time metadata, kept out of the deterministic report."""
    import wicklab

    meta = {
        "wicklab_version": wicklab.__version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
        "seed": seed,
        "wall_time_s": wall_time_s,
        "argv": argv or [],
    }
    write_json(meta, path)
