"""Markdown summary report over a set of experiment manifests.

One section per distinct experiment (manifests with the same config hash
collapse to one), each listing realized parameters and the headline numbers
from the estimate/distance files the run wrote. Nothing is recomputed; the
report quotes what the simulator's files say.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

from .errors import EmptyInputError, SchemaError
from .schemas import load_manifest, read_estimates, read_pairings

RESULTS_HEADER = ("criterion", "status", "detail")

# phase profiles carry hundreds of rows; quote the head and say so
MAX_TABLE_ROWS = 12


def _flatten(tree: dict) -> list:
    out = []
    for section in sorted(tree):
        body = tree[section]
        if isinstance(body, dict):
            for key in sorted(body):
                out.append((f"{section}.{key}", body[key]))
        else:
            out.append((section, body))
    return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def _cell(text: str) -> str:
    return str(text).replace("|", "\\|")


def _estimates_table(path) -> list:
    rows = read_estimates(path)
    lines = ["| name | value | std. error | n |", "| --- | --- | --- | --- |"]
    for row in rows[:MAX_TABLE_ROWS]:
        lines.append(f"| `{_cell(row.name)}` | {row.value:g} | {row.std_error:g} | {row.n} |")
    if len(rows) > MAX_TABLE_ROWS:
        lines.append(f"| ... | {len(rows) - MAX_TABLE_ROWS} more rows | | |")
    return lines


def _pairings_note(path) -> str:
    groups = read_pairings(path)
    sizes = {g: v.size for g, v in sorted(groups.items())}
    if len(set(sizes.values())) == 1:
        count = next(iter(sizes.values()))
        return f"`{path.name}`: {count} draws per g ({', '.join(sizes)})"
    return f"`{path.name}`: " + ", ".join(f"{g}: {n}" for g, n in sizes.items())


def _read_results(path) -> list:
    path = Path(path)
    if not path.exists():
        raise SchemaError(path, "results file does not exist")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != RESULTS_HEADER:
        raise SchemaError(path, f"expected header {','.join(RESULTS_HEADER)}")
    return rows[1:]


def summarize(manifest_paths, out_path, figures=(), results_csv=None) -> Path:
    """Write the report document; returns its path."""
    manifest_paths = [Path(p) for p in manifest_paths]
    if not manifest_paths:
        raise EmptyInputError("summarize needs at least one manifest")
    out_path = Path(out_path)

    seen, experiments, duplicates = {}, [], 0
    for path in manifest_paths:
        manifest = load_manifest(path)
        # config hash alone is not enough: config-less runs (compare) share
        # one hash but differ in their realized inputs
        key = (manifest["config_hash"], json.dumps(manifest.get("realized"), sort_keys=True))
        if key in seen:
            duplicates += 1
            continue
        seen[key] = path
        experiments.append((path, manifest))

    lines = ["# Experiment summary", ""]
    note = f"{len(experiments)} experiments"
    if duplicates:
        note += f" ({duplicates} duplicate manifest{'s' if duplicates > 1 else ''} collapsed)"
    lines += [note + ".", ""]

    if results_csv is not None:
        lines += ["## Acceptance criteria", "", "| criterion | status | detail |", "| --- | --- | --- |"]
        for row in _read_results(results_csv):
            lines.append(f"| {_cell(row[0])} | {_cell(row[1])} | {_cell(row[2])} |")
        lines.append("")

    lines += ["## Experiments", ""]
    for path, manifest in experiments:
        lines.append(f"### {manifest['subcommand']} `{manifest['config_hash'][:12]}`")
        lines.append("")
        lines.append(
            f"- seed {manifest['master_seed']}, threads {manifest.get('threads', 1)}, "
            f"wall clock {manifest.get('wall_clock_s', 0)} s"
        )
        config = ", ".join(f"{k}={_fmt(v)}" for k, v in _flatten(manifest["config"]))
        lines.append(f"- config: {config or 'none'}")
        realized = manifest.get("realized") or {}
        if realized:
            flat = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(realized.items()))
            lines.append(f"- realized: {flat}")
        for name in manifest["outputs"]:
            data = path.parent / name
            if not data.exists():
                lines.append(f"- `{name}`: missing")
            elif name.endswith(("estimates.csv", "distances.csv")):
                lines.append(f"- `{name}`:")
                lines.append("")
                lines += ["  " + row for row in _estimates_table(data)]
                lines.append("")
            elif name.endswith("pairings.csv"):
                lines.append("- " + _pairings_note(data))
            else:
                lines.append(f"- `{name}`")
        lines.append("")

    if figures:
        lines += ["## Figures", ""]
        for fig in figures:
            fig = Path(fig)
            rel = os.path.relpath(fig, out_path.parent)
            sidecar = fig.with_name(fig.name + ".caption.txt")
            caption = sidecar.read_text(encoding="utf-8").splitlines()[0] if sidecar.exists() else fig.stem
            lines.append(f"![{caption}]({rel})")
            lines.append("")
            lines.append(caption)
            lines.append("")

    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out_path
