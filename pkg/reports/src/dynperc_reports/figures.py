"""Figure rendering for simulation outputs.

Every figure is a pure function of its input CSVs: fixed style, no
timestamps, and annotation numbers (KS, W1) are read from distance files the
simulator wrote, never recomputed here. Alongside each image goes a caption
sidecar recording the caption text plus config hash and seed of every input
that carries a manifest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ReportError, SchemaError
from .schemas import find_manifest, manifest_line, read_estimates, read_pairings

KINDS = ("cdf-overlay", "theta-curve", "mu-convergence", "cov-decay")
STYLE_VERSION = 1

_RC = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.size": 9,
    "font.family": "DejaVu Sans",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linewidth": 0.5,
    "legend.fontsize": 7.5,
    "svg.hashsalt": "dynperc-reports",
}

_MU_ROW = re.compile(r"^mu\[([^,\]]+),([^\]]+)\]$")
_COV_ROW = re.compile(r"^cov\[T=([^\]]+)\]$")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    output: Path
    caption: str

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "output", Path(self.output))


def _label(path, manifest) -> str:
    if manifest is not None:
        horizon = manifest.get("config", {}).get("model", {}).get("horizon")
        if horizon is not None:
            return f"T={float(horizon):g}"
        if manifest["subcommand"] == "sample-limit":
            return "limit"
        return manifest["subcommand"]
    return Path(path).parent.name or Path(path).stem


def _ecdf(ax, values, **kwargs):
    x = np.sort(values)
    y = np.arange(1, x.size + 1) / x.size
    ax.step(np.concatenate(([x[0]], x)), np.concatenate(([0.0], y)), where="post", **kwargs)


def _ks_annotation(dist_path, g: str) -> float:
    rows = {r.name: r.value for r in read_estimates(dist_path)}
    name = f"ks[{g}]"
    if name not in rows:
        raise SchemaError(dist_path, f"no {name!r} row; distances must come from a compare run")
    return rows[name]


def _render_cdf_overlay(spec):
    inputs = spec.inputs
    if len(inputs) < 3 or len(inputs) % 2 == 0:
        raise ReportError(
            "cdf-overlay takes n finite pairing files, one reference pairing file, "
            f"then n distance files (2n+1 paths); got {len(inputs)}"
        )
    n = (len(inputs) - 1) // 2
    finite_paths, ref_path, dist_paths = inputs[:n], inputs[n], inputs[n + 1 :]
    finite = [read_pairings(p) for p in finite_paths]
    reference = read_pairings(ref_path)
    gs = sorted(set(reference).intersection(*map(set, finite)))
    if not gs:
        raise SchemaError(ref_path, "no test function shared by every input")
    ks = {(i, g): _ks_annotation(d, g) for i, d in enumerate(dist_paths) for g in gs}
    labels = [_label(p, find_manifest(p)) for p in finite_paths]
    ref_label = _label(ref_path, find_manifest(ref_path))

    fig, axes = plt.subplots(1, len(gs), figsize=(3.2 * len(gs) + 0.4, 2.9), squeeze=False)
    for ax, g in zip(axes[0], gs):
        _ecdf(ax, reference[g], color="black", lw=1.7, label=ref_label)
        for i, data in enumerate(finite):
            _ecdf(ax, data[g], color=f"C{i}", lw=1.1, label=f"{labels[i]} (KS={ks[i, g]:.3g})")
        ax.set_title(f"g = {g}")
        ax.set_xlabel("pairing value")
        ax.legend(loc="lower right")
    axes[0][0].set_ylabel("empirical CDF")
    return fig


def _render_theta_curve(spec):
    series = {}
    for path in spec.inputs:
        rows = {r.name: r for r in read_estimates(path)}
        if "theta_M" not in rows:
            raise SchemaError(path, "no 'theta_M' row; inputs must come from estimate-theta runs")
        manifest = find_manifest(path)
        if manifest is None:
            raise SchemaError(path, "no manifest next to the file; intensity and box side are read from it")
        geometry = manifest["config"].get("geometry", {})
        try:
            lam, box = float(geometry["intensity"]), float(geometry["box_side"])
        except KeyError as err:
            raise SchemaError(path, f"manifest config lacks geometry.{err.args[0]}")
        row = rows["theta_M"]
        series.setdefault(box, []).append((lam, row.value, row.std_error))

    fig, ax = plt.subplots(figsize=(3.8, 2.9))
    for j, box in enumerate(sorted(series)):
        pts = sorted(series[box])
        lam, val, se = (np.array(c) for c in zip(*pts))
        ax.errorbar(lam, val, yerr=1.96 * se, color=f"C{j}", marker="o", ms=3,
                    capsize=2, lw=1.1, label=f"M={box:g}")
    ax.set_xlabel("intensity")
    ax.set_ylabel("escape probability")
    ax.legend(loc="lower right")
    return fig


def _render_mu_convergence(spec):
    if len(spec.inputs) != 1:
        raise ReportError(f"mu-convergence takes one estimates file, got {len(spec.inputs)}")
    path = spec.inputs[0]
    bands = []
    for row in read_estimates(path):
        m = _MU_ROW.match(row.name)
        if m:
            lo, hi = float(m.group(1)), float(m.group(2))
            bands.append(((lo + hi) / 2.0, (hi - lo) / 2.0, row.value, row.std_error))
    if not bands:
        raise SchemaError(path, "no 'mu[lo,hi]' rows; input must come from an estimate-mu run")
    bands.sort()
    mid, half, val, se = (np.array(c) for c in zip(*bands))

    fig, ax = plt.subplots(figsize=(3.8, 2.9))
    ax.errorbar(mid, val, xerr=half, yerr=1.96 * se, color="C0", marker="o", ms=3,
                capsize=2, lw=1.1)
    ax.axhline(val[-1], color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("distance band")
    ax.set_ylabel("stretch factor")
    return fig


def _render_cov_decay(spec):
    series = []
    for path in spec.inputs:
        pts = []
        for row in read_estimates(path):
            m = _COV_ROW.match(row.name)
            if m:
                pts.append((float(m.group(1)), row.value, row.std_error))
        if not pts:
            raise SchemaError(path, "no 'cov[T=...]' rows; input must hold covariance estimates")
        pts.sort()
        series.append((_label(path, find_manifest(path)), pts))

    fig, ax = plt.subplots(figsize=(3.8, 2.9))
    for j, (label, pts) in enumerate(series):
        horizon, val, se = (np.array(c) for c in zip(*pts))
        ax.errorbar(horizon, val, yerr=1.96 * se, color=f"C{j}", marker="o", ms=3,
                    capsize=2, lw=1.1, label=label)
    ax.set_xscale("log")
    ax.set_xlabel("horizon T")
    ax.set_ylabel("indicator covariance")
    ax.legend(loc="upper right")
    return fig


_RENDERERS = {
    "cdf-overlay": _render_cdf_overlay,
    "theta-curve": _render_theta_curve,
    "mu-convergence": _render_mu_convergence,
    "cov-decay": _render_cov_decay,
}


def render(spec: FigureSpec) -> Path:
    """Write the figure and its caption sidecar; returns the image path."""
    if spec.kind not in _RENDERERS:
        raise ReportError(f"unknown figure kind {spec.kind!r}; expected one of {KINDS}")
    if spec.output.suffix not in (".png", ".svg"):
        raise ReportError(f"output must be .png or .svg, got {spec.output.name!r}")
    if not spec.inputs:
        raise ReportError("figure spec has no inputs")

    with plt.rc_context(_RC):
        fig = _RENDERERS[spec.kind](spec)
        try:
            spec.output.parent.mkdir(parents=True, exist_ok=True)
            # strip the writer fields that would differ between identical renders
            metadata = {"Software": None} if spec.output.suffix == ".png" else {"Date": None}
            fig.savefig(spec.output, metadata=metadata, bbox_inches="tight")
        finally:
            plt.close(fig)

    lines = [spec.caption, ""]
    for path in spec.inputs:
        lines.append(manifest_line(find_manifest(path), str(path)))
    lines.append(f"style v{STYLE_VERSION}")
    sidecar = spec.output.with_name(spec.output.name + ".caption.txt")
    sidecar.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return spec.output
