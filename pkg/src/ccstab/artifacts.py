"""Deterministic CSV, grid-dump, report and manifest writers."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np


def fmt(x):
    """17 significant digits, round-trip exact for doubles."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.17g}"
    return str(x)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def _cell(text):
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path):
    """Header and rows; numeric fields become floats, others stay strings."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[_cell(v) for v in row] for row in rows[1:]]


def write_grid_dump(path, grid, every=1):
    """Header line ``x_min dx n`` then, per slice, ``t`` followed by the cell values."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        fh.write(f"x_min={fmt(grid.x_min)} dx={fmt(grid.dx)} n={grid.n}\n")
        for k in range(0, len(grid.times), every):
            fh.write(f"t={fmt(grid.times[k])} " + " ".join(fmt(v) for v in grid.slices[k]) + "\n")
        if (len(grid.times) - 1) % every:
            fh.write(f"t={fmt(grid.times[-1])} " + " ".join(fmt(v) for v in grid.slices[-1]) + "\n")
    return path


def write_report(path, items):
    """Plain ``key = value`` lines in insertion order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        for key, value in items.items():
            fh.write(f"{key} = {fmt(value)}\n")
    return path


def git_blob_hash(data):
    """Content hash in the git object format: ``sha1("blob <len>\\0" + data)``."""
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else fmt(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def write_manifest(out_dir, config_text, config_echo, command, seed, constants, artifacts):
    """``manifest.json`` with the config echo, constants used, input hash, seed and artifact hashes."""
    out_dir = Path(out_dir)
    manifest = {
        "command": command,
        "seed": seed,
        "rng": "numpy PCG64",
        "input_hash": git_blob_hash(config_text),
        "config": _jsonable(config_echo),
        "constants": _jsonable(constants),
        "artifacts": {Path(p).name: git_blob_hash(Path(p).read_bytes()) for p in artifacts},
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
