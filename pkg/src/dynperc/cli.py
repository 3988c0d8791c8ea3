"""Experiment orchestration: config parsing, subcommands, seed fan-out.

A run reads one JSON config, executes a pipeline, and writes data CSVs
plus a manifest into the output directory.  All randomness flows from the
master seed through named substreams, so a config plus seed pins every
byte of the data files no matter how many workers run the replications.
"""

from __future__ import annotations

import argparse
import csv
import functools
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    TEST_FUNCTIONS,
    InfraConfig,
    TimeGrid,
    TwoScaleConfig,
    simulate_khop_measure,
    simulate_percolation_measure,
)
from .errors import (
    BisectionError,
    InsufficientDataError,
    InvalidParameterError,
    ResourceLimitError,
    SchemaError,
    SupercriticalityError,
)
from .estimators import (
    Estimate,
    PercolationParams,
    estimate_lambda_c,
    estimate_stretch_factor,
    estimate_theta_M,
    phase_intensity_profile,
)
from .geometry import RngStream
from .limits import (
    dense_limit_constant,
    sample_critical_limit,
    sample_limit_percolation_measure,
    sample_sparse_limit,
)
from .mobility import DisplacementDistribution
from .outputs import (
    ESTIMATES_HEADER,
    PAIRINGS_HEADER,
    write_estimates,
    write_manifest,
    write_measure_samples,
    write_pairings,
)
from .parallel import map_replications, resolve_threads
from .stats import EmpiricalDistribution, ks_distance, wasserstein1

__all__ = ["main", "run_subcommand"]

_NUM = (int, float)

# every key the config may contain; unknown keys are hard errors because a
# typo that silently falls back to a default ruins an experiment
_SCHEMA = {
    "model": {"name": str, "horizon": _NUM},
    "geometry": {
        "dimension": int,
        "radius": _NUM,
        "box_side": _NUM,
        "intensity": _NUM,
        "window_side": _NUM,
        "distance_bands": list,
        "box_schedule": list,
    },
    "mobility": {"r_min": _NUM, "r_max": _NUM, "jump_rate": _NUM, "normalize": bool},
    "scaling": {"c0": _NUM, "alpha": _NUM, "mu": _NUM, "theta": _NUM},
    "grid": {"n_t": int},
    "mc": {
        "replications": int,
        "n_inner": int,
        "tolerance": _NUM,
        "n_pairs": int,
        "threads": int,
        "max_points": _NUM,
        "nu_pool": int,
        "profile_samples": int,
    },
    "seeds": {"master": int},
}


def validate_config(config: dict) -> None:
    if not isinstance(config, dict):
        raise SchemaError("config", "top level must be a JSON object")
    for section, body in config.items():
        if section not in _SCHEMA:
            raise SchemaError(section, f"unknown section; expected one of {sorted(_SCHEMA)}")
        if not isinstance(body, dict):
            raise SchemaError(section, "section must be a JSON object")
        for key, value in body.items():
            if key not in _SCHEMA[section]:
                raise SchemaError(f"{section}.{key}", f"unknown key; expected one of {sorted(_SCHEMA[section])}")
            expected = _SCHEMA[section][key]
            if isinstance(value, bool) and expected is not bool:
                raise SchemaError(f"{section}.{key}", "expected a number, got a boolean")
            if not isinstance(value, expected):
                label = "number" if expected is _NUM else expected.__name__ if not isinstance(expected, tuple) else "number"
                raise SchemaError(f"{section}.{key}", f"expected {label}, got {type(value).__name__}")


def _require(config: dict, section: str, key: str):
    if section not in config or key not in config[section]:
        raise SchemaError(f"{section}.{key}", "missing required key")
    return config[section][key]


def _get(config: dict, section: str, key: str, default):
    return config.get(section, {}).get(key, default)


def _master_seed(config: dict, args) -> int:
    if args.seed is not None:
        return int(args.seed)
    if "seeds" in config and "master" in config["seeds"]:
        return int(config["seeds"]["master"])
    raise SchemaError("seeds.master", "missing required key (or pass --seed)")


def _grid(config: dict, args) -> TimeGrid:
    n_t = args.grid_points if args.grid_points is not None else _get(config, "grid", "n_t", 200)
    return TimeGrid(int(n_t))


def _displacement(config: dict, dim: int, normalize_default: bool) -> DisplacementDistribution:
    dist = DisplacementDistribution(
        _get(config, "mobility", "r_min", 0.5),
        _get(config, "mobility", "r_max", 1.5),
        dim=dim,
    )
    if _get(config, "mobility", "normalize", normalize_default):
        dist = dist.crw_normalized()
    return dist


def _percolation_params(config: dict) -> PercolationParams:
    return PercolationParams(
        float(_require(config, "geometry", "intensity")),
        float(_require(config, "geometry", "radius")),
        float(_require(config, "geometry", "box_side")),
        int(_get(config, "geometry", "dimension", 2)),
    )


class _Run:
    """Shared bookkeeping for a subcommand invocation."""

    def __init__(self, args, needs_config: bool = True):
        self.args = args
        self.t0 = time.time()
        if args.config is not None:
            with open(args.config, "r", encoding="utf-8") as fh:
                try:
                    self.config = json.load(fh)
                except json.JSONDecodeError as err:
                    raise SchemaError("config", f"not valid JSON: {err}")
            validate_config(self.config)
        elif needs_config:
            raise SchemaError("config", "this subcommand requires --config")
        else:
            self.config = {}
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.threads = resolve_threads(args.threads, _get(self.config, "mc", "threads", None))

    def stream(self, *tags) -> RngStream:
        return RngStream(self.seed).substream(*tags)

    @property
    def seed(self) -> int:
        return _master_seed(self.config, self.args)

    def finish(self, subcommand: str, outputs: list, realized: dict | None = None, seed: int | None = None) -> Path:
        manifest_path = self.out / "manifest.json"
        write_manifest(
            manifest_path,
            subcommand,
            self.config,
            self.seed if seed is None else seed,
            [str(p) for p in outputs],
            time.time() - self.t0,
            __version__,
            realized=realized,
            threads=self.threads,
        )
        return manifest_path


def _theta_rep(params: PercolationParams, rep_id: int, stream: RngStream) -> float:
    return estimate_theta_M(params, 1, stream).value


def _two_scale_rep(cfg: TwoScaleConfig, rep_id: int, stream: RngStream):
    return simulate_percolation_measure(cfg, stream)


def _khop_rep(cfg: InfraConfig, rep_id: int, stream: RngStream):
    return simulate_khop_measure(cfg, stream)


def _limit_rep(params, dist, grid, n_inner, fast_profile, profile_samples, rep_id: int, stream: RngStream):
    return sample_limit_percolation_measure(
        params, dist, grid, n_inner, stream, fast_profile=fast_profile, profile_samples=profile_samples
    )


def _critical_rep(theta, c0, mu, dim, grid, rep_id: int, stream: RngStream) -> dict:
    # same substream per g replays the same path and sink field, so one
    # draw yields a consistent row per test function
    return {g: sample_critical_limit(theta, c0, mu, dim, grid, g, stream) for g in TEST_FUNCTIONS}


def _pairings_rows(samples):
    for rep_id, sample in enumerate(samples):
        for g in TEST_FUNCTIONS:
            yield rep_id, g, sample.pairing(g)


def cmd_estimate_theta(args) -> int:
    run = _Run(args)
    params = _percolation_params(run.config)
    n = int(_require(run.config, "mc", "replications"))
    values = map_replications(
        functools.partial(_theta_rep, params), n, run.stream("estimate-theta"), run.threads
    )
    est = Estimate.from_samples(np.array(values)) if n > 1 else Estimate(float(values[0]), 0.0, 1)
    path = run.out / "estimates.csv"
    write_estimates(path, [("theta_M", est.value, est.std_error, est.n_samples)])
    run.finish("estimate-theta", [path], realized={"window_side": params.window.side})
    print(f"estimate-theta: theta_M={est.value:.6g} se={est.std_error:.3g} n={n} -> {path}")
    return 0


def cmd_estimate_lambda_c(args) -> int:
    run = _Run(args)
    radius = float(_require(run.config, "geometry", "radius"))
    schedule = tuple(float(b) for b in _require(run.config, "geometry", "box_schedule"))
    tol = float(_get(run.config, "mc", "tolerance", 0.05))
    n_eval = int(_get(run.config, "mc", "replications", 2000))
    dim = int(_get(run.config, "geometry", "dimension", 2))
    bracket = estimate_lambda_c(radius, schedule, tol, run.stream("estimate-lambda-c"), dim, n_eval)
    rows = [("lambda_c_lower", bracket.lower, 0.0, n_eval), ("lambda_c_upper", bracket.upper, 0.0, n_eval)]
    for box_side, lo, hi in bracket.history:
        rows.append((f"lambda_c_lower[M={box_side:g}]", lo, 0.0, n_eval))
        rows.append((f"lambda_c_upper[M={box_side:g}]", hi, 0.0, n_eval))
    path = run.out / "estimates.csv"
    write_estimates(path, rows)
    run.finish("estimate-lambda-c", [path], realized={"box_side": bracket.box_side})
    print(
        f"estimate-lambda-c: [{bracket.lower:.4g}, {bracket.upper:.4g}] at M={bracket.box_side:g} -> {path}"
    )
    return 0


def cmd_estimate_mu(args) -> int:
    run = _Run(args)
    intensity = float(_require(run.config, "geometry", "intensity"))
    radius = float(_require(run.config, "geometry", "radius"))
    window = float(_require(run.config, "geometry", "window_side"))
    bands = _require(run.config, "geometry", "distance_bands")
    n_pairs = int(_get(run.config, "mc", "n_pairs", 200))
    dim = int(_get(run.config, "geometry", "dimension", 2))
    rows, realized = [], {}
    for i, band in enumerate(bands):
        if not (isinstance(band, list) and len(band) == 2):
            raise SchemaError("geometry.distance_bands", f"band {i} must be a [lo, hi] pair")
        lo, hi = float(band[0]), float(band[1])
        est = estimate_stretch_factor(intensity, radius, window, (lo, hi), n_pairs, run.stream("estimate-mu", i), dim)
        rows.append((f"mu[{lo:g},{hi:g}]", est.estimate.value, est.estimate.std_error, est.estimate.n_samples))
        realized[f"giant_fraction[{lo:g},{hi:g}]"] = est.giant_fraction
    path = run.out / "estimates.csv"
    write_estimates(path, rows)
    run.finish("estimate-mu", [path], realized=realized)
    print(f"estimate-mu: {', '.join(f'{r[0]}={r[1]:.4g}' for r in rows)} -> {path}")
    return 0


def cmd_estimate_phase(args) -> int:
    run = _Run(args)
    intensity = float(_require(run.config, "geometry", "intensity"))
    dim = int(_get(run.config, "geometry", "dimension", 2))
    n = int(_require(run.config, "mc", "replications"))
    grid = _grid(run.config, args)
    dist = _displacement(run.config, dim, normalize_default=False)
    slow, fast, se = phase_intensity_profile(grid.times, intensity, dist, n, run.stream("estimate-phase"))
    rows = []
    for t, ls, lf, s in zip(grid.times, slow, fast, se):
        rows.append((f"lambda_s[{float(t)!r}]", ls, s, n))
        rows.append((f"lambda_f[{float(t)!r}]", lf, s, n))
    path = run.out / "estimates.csv"
    write_estimates(path, rows)
    run.finish("estimate-phase", [path])
    print(f"estimate-phase: {grid.n_t} grid times, n={n} -> {path}")
    return 0


def cmd_simulate_two_scale(args) -> int:
    run = _Run(args)
    params = _percolation_params(run.config)
    horizon = float(_require(run.config, "model", "horizon"))
    grid = _grid(run.config, args)
    dist = _displacement(run.config, params.dim, normalize_default=False)
    cfg = TwoScaleConfig(params.intensity, params.radius, params.box_side, horizon, params.dim, dist, grid)
    n = int(_require(run.config, "mc", "replications"))
    samples = map_replications(
        functools.partial(_two_scale_rep, cfg), n, run.stream("simulate-two-scale"), run.threads
    )
    samples_path = run.out / "samples.csv"
    pairings_path = run.out / "pairings.csv"
    write_measure_samples(samples_path, samples)
    write_pairings(pairings_path, _pairings_rows(samples))
    mean_total = float(np.mean([s.total() for s in samples]))
    run.finish(
        "simulate-two-scale",
        [samples_path, pairings_path],
        realized={"window_side": cfg.window.side, "mean_total": mean_total},
    )
    print(f"simulate-two-scale: T={horizon:g} n={n} mean tau(1)={mean_total:.4f} -> {samples_path}")
    return 0


def cmd_simulate_khop(args) -> int:
    run = _Run(args)
    dim = int(_get(run.config, "geometry", "dimension", 2))
    cfg = InfraConfig(
        float(_require(run.config, "geometry", "intensity")),
        float(_require(run.config, "geometry", "radius")),
        float(_require(run.config, "geometry", "box_side")),
        float(_require(run.config, "model", "horizon")),
        float(_require(run.config, "scaling", "c0")),
        float(_require(run.config, "scaling", "alpha")),
        float(_require(run.config, "scaling", "mu")),
        dim,
        _displacement(run.config, dim, normalize_default=True),
        float(_get(run.config, "mobility", "jump_rate", 1.0)),
        _grid(run.config, args),
        max_points=float(_get(run.config, "mc", "max_points", 2e7)),
    )
    n = int(_require(run.config, "mc", "replications"))
    samples = map_replications(functools.partial(_khop_rep, cfg), n, run.stream("simulate-khop"), run.threads)
    samples_path = run.out / "samples.csv"
    pairings_path = run.out / "pairings.csv"
    write_measure_samples(samples_path, samples)
    write_pairings(pairings_path, _pairings_rows(samples))
    mean_total = float(np.mean([s.total() for s in samples]))
    realized = dict(cfg.realized_parameters())
    realized["mean_total"] = mean_total
    run.finish("simulate-khop", [samples_path, pairings_path], realized=realized)
    print(
        f"simulate-khop: T={cfg.horizon:g} k={cfg.k} n={n} mean tau(1)={mean_total:.4f} -> {samples_path}"
    )
    return 0


def cmd_sample_limit(args) -> int:
    run = _Run(args)
    kind = args.kind
    dim = int(_get(run.config, "geometry", "dimension", 2))
    if kind == "theorem2":
        params = _percolation_params(run.config)
        grid = _grid(run.config, args)
        dist = _displacement(run.config, dim, normalize_default=False)
        n = int(_require(run.config, "mc", "replications"))
        n_inner = int(_require(run.config, "mc", "n_inner"))
        profile_n = int(_get(run.config, "mc", "profile_samples", 20_000))
        _, fast_profile, _ = phase_intensity_profile(
            grid.times, params.intensity, dist, profile_n, run.stream("phase-profile")
        )
        samples = map_replications(
            functools.partial(_limit_rep, params, dist, grid, n_inner, fast_profile, profile_n),
            n,
            run.stream("sample-limit-theorem2"),
            run.threads,
        )
        samples_path = run.out / "samples.csv"
        pairings_path = run.out / "pairings.csv"
        write_measure_samples(samples_path, samples)
        write_pairings(pairings_path, _pairings_rows(samples))
        run.finish("sample-limit", [samples_path, pairings_path], realized={"fast_profile_mean": float(fast_profile.mean())})
        print(f"sample-limit theorem2: {n} outer draws, n_inner={n_inner} -> {samples_path}")
        return 0

    theta = float(_require(run.config, "scaling", "theta"))
    c0 = float(_require(run.config, "scaling", "c0"))
    mu = float(_require(run.config, "scaling", "mu"))
    if kind == "dense":
        value = dense_limit_constant(theta, c0, mu, dim)
        path = run.out / "estimates.csv"
        write_estimates(path, [("dense_limit_constant", value, 0.0, 1)])
        run.finish("sample-limit", [path], seed=_get(run.config, "seeds", "master", 0))
        print(f"sample-limit dense: {value:.6g} -> {path}")
        return 0
    n = int(_require(run.config, "mc", "replications"))
    if kind == "sparse":
        draws = sample_sparse_limit(theta, c0, mu, dim, run.stream("sample-limit-sparse"), size=n)
        path = run.out / "pairings.csv"
        write_pairings(path, ((i, "1", v) for i, v in enumerate(draws)))
        est = Estimate.from_samples(draws)
        est_path = run.out / "estimates.csv"
        write_estimates(est_path, [("sparse_limit_mean", est.value, est.std_error, est.n_samples)])
        run.finish("sample-limit", [path, est_path])
        print(f"sample-limit sparse: n={n} mean={est.value:.6g} -> {path}")
        return 0
    # critical
    grid = _grid(run.config, args)
    rows = map_replications(
        functools.partial(_critical_rep, theta, c0, mu, dim, grid),
        n,
        run.stream("sample-limit-critical"),
        run.threads,
    )
    path = run.out / "pairings.csv"
    write_pairings(path, ((i, g, row[g]) for i, row in enumerate(rows) for g in TEST_FUNCTIONS))
    run.finish("sample-limit", [path])
    print(f"sample-limit critical: n={n} grid={grid.n_t} -> {path}")
    return 0


def _read_pairings(path) -> dict[str, np.ndarray]:
    groups: dict[str, list[float]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != PAIRINGS_HEADER:
            raise SchemaError(str(path), f"expected pairings header {','.join(PAIRINGS_HEADER)}")
        for row in reader:
            if len(row) != 3:
                raise SchemaError(str(path), f"malformed row: {row}")
            groups.setdefault(row[1], []).append(float(row[2]))
    if not groups:
        raise SchemaError(str(path), "no data rows")
    return {g: np.array(v) for g, v in groups.items()}


def cmd_compare(args) -> int:
    run = _Run(args, needs_config=False)
    a = _read_pairings(args.first)
    b = _read_pairings(args.second)
    common = [g for g in a if g in b]
    if not common:
        raise SchemaError("inputs", "no common test functions between the two pairing files")
    rows = []
    for g in common:
        da, db = EmpiricalDistribution(a[g]), EmpiricalDistribution(b[g])
        rows.append((f"ks[{g}]", ks_distance(da, db), 0.0, min(da.n, db.n)))
        rows.append((f"w1[{g}]", wasserstein1(da, db), 0.0, min(da.n, db.n)))
    path = run.out / "distances.csv"
    write_estimates(path, rows)
    run.finish("compare", [path], realized={"first": str(args.first), "second": str(args.second)}, seed=0)
    summary = ", ".join(f"{r[0]}={r[1]:.4g}" for r in rows if r[0].startswith("ks"))
    print(f"compare: {summary} -> {path}")
    return 0


def _selfcheck_equivalences(rng: np.random.Generator) -> int:
    """Duel the cell-list kernels against direct small-instance references."""
    from .connectivity import build_graph, graph_distance, k_hop_connected, percolates_M
    from .geometry import PointSet, centered_box

    checks = 0
    for trial in range(60):
        n = int(rng.integers(2, 28))
        pts = (rng.random((n, 2)) - 0.5) * rng.uniform(2.0, 6.0)
        adj = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=2) <= 1.0
        np.fill_diagonal(adj, False)
        labels = build_graph(pts, 1.0).component_labels()
        # reference: repeated boolean closure
        reach = adj | np.eye(n, dtype=bool)
        for _ in range(n):
            reach = reach @ reach
        for i in range(n):
            for j in range(n):
                if (labels[i] == labels[j]) != bool(reach[i, j]):
                    raise AssertionError(f"component mismatch at instance {trial}, pair ({i}, {j})")
        checks += 1
        i, j = int(rng.integers(n)), int(rng.integers(n))
        got = graph_distance(build_graph(pts, 1.0), i, j)
        # reference: breadth-first search on the dense adjacency
        dist = {i: 0}
        frontier = [i]
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.flatnonzero(adj[u]):
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(int(v))
            frontier = nxt
        if got != dist.get(j):
            raise AssertionError(f"distance mismatch at instance {trial}: {got} vs {dist.get(j)}")
        checks += 1
        k = int(rng.integers(1, 5))
        src = pts[0]
        sinks, relays = pts[1:2], pts[2:]
        got_k = k_hop_connected(src, sinks, relays, k, 1.0)
        full = np.vstack([src[None, :], relays])
        fadj = np.sum((full[:, None, :] - full[None, :, :]) ** 2, axis=2) <= 1.0
        marked = np.zeros(len(full), dtype=bool)
        marked[0] = True
        for _ in range(k - 1):
            marked = marked | (fadj @ marked)
        hit = bool(np.any((np.sum((full - sinks[0]) ** 2, axis=1) <= 1.0) & marked))
        if got_k != hit:
            raise AssertionError(f"k-hop mismatch at instance {trial}")
        checks += 1
    region = centered_box(7.0, 2)
    for trial in range(40):
        pts = (rng.random((int(rng.integers(0, 30)), 2)) - 0.5) * 7.0
        got = percolates_M(PointSet(pts, region), 1.0, 5.0)
        cloud = np.vstack([np.zeros((1, 2)), pts])
        cadj = np.sum((cloud[:, None, :] - cloud[None, :, :]) ** 2, axis=2) <= 1.0
        reach = np.zeros(len(cloud), dtype=bool)
        reach[0] = True
        for _ in range(len(cloud)):
            reach = reach | (cadj @ reach)
        dev = np.abs(cloud)
        inside = np.max(dev, axis=1) <= 2.5
        d_in = 2.5 - np.max(dev, axis=1)
        d_out = np.sqrt(np.sum(np.maximum(dev - 2.5, 0.0) ** 2, axis=1))
        near = np.where(inside, d_in, d_out) <= 1.0
        if got != bool(np.any(reach & near)):
            raise AssertionError(f"escape-indicator mismatch at instance {trial}")
        checks += 1
    return checks


def cmd_selfcheck(args) -> int:
    run = _Run(args, needs_config=False)
    rng = np.random.default_rng(1)
    checks = _selfcheck_equivalences(rng)
    # closed-form identity: sparse mean equals the dense constant
    draws = sample_sparse_limit(0.5, 1.0, 1.0, 2, RngStream(1), size=20_000)
    gap = abs(float(draws.mean()) - dense_limit_constant(0.5, 1.0, 1.0, 2))
    if gap > 4 * float(draws.std()) / np.sqrt(draws.size):
        raise AssertionError(f"sparse/dense identity violated by {gap:.4g}")
    checks += 1
    slow, fast, _ = phase_intensity_profile(np.array([0.0, 0.3, 0.8]), 2.0, DisplacementDistribution(), 2000, RngStream(2))
    if not np.all(slow + fast == 2.0):
        raise AssertionError("phase intensities do not partition the total")
    checks += 1
    print(f"selfcheck: {checks} checks passed")
    return 0


_COMMANDS = {
    "estimate-theta": cmd_estimate_theta,
    "estimate-lambda-c": cmd_estimate_lambda_c,
    "estimate-mu": cmd_estimate_mu,
    "estimate-phase": cmd_estimate_phase,
    "simulate-two-scale": cmd_simulate_two_scale,
    "simulate-khop": cmd_simulate_khop,
    "sample-limit": cmd_sample_limit,
    "compare": cmd_compare,
    "selfcheck": cmd_selfcheck,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="path to the JSON experiment config")
    common.add_argument("--seed", type=int, default=None, help="master seed (overrides seeds.master)")
    common.add_argument("--threads", type=int, default=None, help="worker count (env DYNPERC_THREADS wins)")
    common.add_argument("--out", type=str, default=".", help="output directory")
    common.add_argument("--grid-points", type=int, default=None, help="override grid.n_t")
    parser = argparse.ArgumentParser(prog="dynperc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dynperc {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _COMMANDS:
        if name == "sample-limit":
            p = sub.add_parser(name, parents=[common], help="draw from a limiting object")
            p.add_argument("kind", choices=["theorem2", "dense", "sparse", "critical"])
        elif name == "compare":
            p = sub.add_parser(name, parents=[common], help="distribution distances between two pairing files")
            p.add_argument("first", type=str)
            p.add_argument("second", type=str)
        else:
            p = sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except SchemaError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 3
    except ResourceLimitError as err:
        print(f"resource limit: {err}", file=sys.stderr)
        return 4
    except InvalidParameterError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 3
    except (BisectionError, SupercriticalityError, InsufficientDataError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def run_subcommand(argv) -> int:
    """Programmatic entry point mirroring the console script."""
    return main(list(argv))


if __name__ == "__main__":
    sys.exit(main())
