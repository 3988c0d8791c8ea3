"""CSV and manifest writers with byte-stable output.

Data files must diff clean across runs and thread counts, so floats are
written in shortest round-trip form, rows follow replication order, and
anything time-dependent (wall clock) goes to the manifest only.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

__all__ = [
    "format_value",
    "write_measure_samples",
    "write_pairings",
    "write_estimates",
    "config_hash",
    "write_manifest",
]

MEASURE_HEADER = ("replication_id", "t_index", "t", "indicator")
PAIRINGS_HEADER = ("replication_id", "g_name", "value")
ESTIMATES_HEADER = ("name", "value", "std_error", "n")


def format_value(x) -> str:
    """Shortest decimal string that round-trips the value."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_rows(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) if not isinstance(v, str) else v for v in row])


def write_measure_samples(path, samples) -> None:
    """Schema: replication_id, t_index, t, indicator.

    Accepts binary measure replications and real-valued limit draws; the
    indicator column holds whatever the sample carries per grid time.
    """

    def rows():
        for rep_id, sample in enumerate(samples):
            times = sample.grid.times
            values = sample.indicators if hasattr(sample, "indicators") else sample.values
            for i in range(sample.grid.n_t):
                yield rep_id, i, times[i], values[i]

    _write_rows(path, MEASURE_HEADER, rows())


def write_pairings(path, rows) -> None:
    """Schema: replication_id, g_name, value."""
    _write_rows(path, PAIRINGS_HEADER, rows)


def write_estimates(path, rows) -> None:
    """Schema: name, value, std_error, n."""
    _write_rows(path, ESTIMATES_HEADER, rows)


def config_hash(config: dict) -> str:
    """Digest of the canonicalized config document."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(
    path,
    subcommand: str,
    config: dict,
    master_seed: int,
    outputs: list,
    wall_clock_s: float,
    version: str,
    realized: dict | None = None,
    threads: int = 1,
) -> dict:
    """Record what produced which files; returns the manifest dict."""
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "config_hash": config_hash(config),
        "master_seed": int(master_seed),
        "tool_version": version,
        "outputs": [str(Path(p).name) for p in outputs],
        "wall_clock_s": round(float(wall_clock_s), 3),
        "threads": int(threads),
        "realized": realized or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
