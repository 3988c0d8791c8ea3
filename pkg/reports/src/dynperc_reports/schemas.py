"""Readers for the simulator's CSV and manifest files.

The column layouts are the published interface of the simulation CLI and are
restated here on purpose: this package reads files, not the simulator's
internals, so the contract lives in these tuples.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import EmptyInputError, SchemaError

PAIRINGS_HEADER = ("replication_id", "g_name", "value")
ESTIMATES_HEADER = ("name", "value", "std_error", "n")
MANIFEST_KEYS = ("subcommand", "config", "config_hash", "master_seed", "outputs")


class EstimateRow(NamedTuple):
    name: str
    value: float
    std_error: float
    n: int


def _open_rows(path, expected):
    path = Path(path)
    if not path.exists():
        raise SchemaError(path, "input file does not exist")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(path, "missing header row")
    got = tuple(rows[0])
    if got != expected:
        for i, want in enumerate(expected):
            have = got[i] if i < len(got) else None
            if have != want:
                raise SchemaError(path, f"column {i + 1} must be {want!r}, got {have!r}")
        raise SchemaError(path, f"unexpected extra columns {list(got[len(expected):])}")
    if len(rows) == 1:
        raise EmptyInputError(f"{path}: no data rows")
    return path, rows[1:]


def read_pairings(path) -> dict[str, np.ndarray]:
    """Pairing values grouped by test function name."""
    path, rows = _open_rows(path, PAIRINGS_HEADER)
    groups: dict[str, list[float]] = {}
    for i, row in enumerate(rows):
        if len(row) != 3:
            raise SchemaError(path, f"row {i + 2} has {len(row)} fields, expected 3")
        try:
            groups.setdefault(row[1], []).append(float(row[2]))
        except ValueError:
            raise SchemaError(path, f"row {i + 2}: value {row[2]!r} is not a number")
    return {g: np.array(v) for g, v in groups.items()}


def read_estimates(path) -> list[EstimateRow]:
    path, rows = _open_rows(path, ESTIMATES_HEADER)
    out = []
    for i, row in enumerate(rows):
        if len(row) != 4:
            raise SchemaError(path, f"row {i + 2} has {len(row)} fields, expected 4")
        try:
            out.append(EstimateRow(row[0], float(row[1]), float(row[2]), int(row[3])))
        except ValueError as err:
            raise SchemaError(path, f"row {i + 2}: {err}")
    return out


def load_manifest(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise SchemaError(path, "manifest does not exist")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as err:
            raise SchemaError(path, f"not valid JSON: {err}")
    for key in MANIFEST_KEYS:
        if key not in manifest:
            raise SchemaError(path, f"missing key {key!r}")
    return manifest


def find_manifest(csv_path) -> dict | None:
    """The manifest written next to a data file, if any."""
    path = Path(csv_path).parent / "manifest.json"
    if not path.exists():
        return None
    return load_manifest(path)


def manifest_line(manifest: dict | None, label: str) -> str:
    """One caption/report line tying a file to the run that produced it."""
    if manifest is None:
        return f"{label}: no manifest"
    return (
        f"{label}: {manifest['subcommand']}, config {manifest['config_hash'][:12]}, "
        f"seed {manifest['master_seed']}"
    )
