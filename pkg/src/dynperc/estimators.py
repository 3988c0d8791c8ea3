"""Monte Carlo estimators for percolation and mobility summary quantities.

Covers the box percolation probability theta^M, the conditional variant
given a fixed slow configuration, a bisection bracket for the critical
intensity, the stretch factor of graph distances in the giant component,
and the slow/fast phase intensity split of the two-scale model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import bfs_distances_kernel, percolation_kernel
from .connectivity import ComponentSummary, build_graph
from .errors import BisectionError, InvalidParameterError, SupercriticalityError
from .geometry import Box, PointSet, RngStream, _as_generator, centered_box
from .mobility import DisplacementDistribution

__all__ = [
    "Estimate",
    "PercolationParams",
    "LambdaCBracket",
    "StretchEstimate",
    "estimate_theta_M",
    "estimate_conditional_theta",
    "estimate_lambda_c",
    "estimate_stretch_factor",
    "estimate_phase_intensity",
    "phase_intensity_profile",
    "sample_phase_arrivals",
]


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo mean with its standard error."""

    value: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.std_error < 0:
            raise InvalidParameterError(f"std_error must be >= 0, got {self.std_error}")
        if self.n_samples < 1:
            raise InvalidParameterError(f"n_samples must be >= 1, got {self.n_samples}")

    @property
    def ci95(self) -> tuple[float, float]:
        half = 1.96 * self.std_error
        return (self.value - half, self.value + half)

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "Estimate":
        x = np.asarray(samples, dtype=np.float64).ravel()
        se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
        return cls(float(x.mean()), se, int(x.size))


@dataclass(frozen=True)
class PercolationParams:
    """Node intensity, connection radius, and target box for theta^M."""

    intensity: float
    radius: float
    box_side: float
    dim: int = 2
    margin: float = 1.0

    def __post_init__(self):
        if self.intensity < 0:
            raise InvalidParameterError(f"intensity must be >= 0, got {self.intensity}")
        for name in ("radius", "box_side", "margin"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be positive")
        if self.dim < 1:
            raise InvalidParameterError(f"dim must be >= 1, got {self.dim}")

    @property
    def window(self) -> Box:
        # points farther than r from the box cannot join its clusters, and
        # with r <= 2*margin no path can skip the escape shell, so this
        # window computes the escape indicator exactly
        return centered_box(self.box_side + 2.0 * self.radius, self.dim)


def _percolation_indicators(
    params: PercolationParams, n: int, gen: np.random.Generator, extra: np.ndarray | None = None
) -> np.ndarray:
    """n escape indicators on fresh Poisson clouds, optionally unioned with
    a fixed extra configuration; the origin is appended to every cloud."""
    window = params.window
    origin = np.zeros((1, params.dim))
    fixed = origin if extra is None or extra.size == 0 else np.vstack([origin, extra])
    mean_count = params.intensity * window.volume
    block = max(1, int(4_000_000 / max(mean_count, 1.0)))  # cap the staged point pool
    out = np.empty(n, dtype=np.float64)
    for start in range(0, n, block):
        stop = min(start + block, n)
        counts = gen.poisson(mean_count, size=stop - start)
        pool = window.lower + gen.random((int(counts.sum()), params.dim)) * window.side
        offsets = np.concatenate([[0], np.cumsum(counts)])
        for i in range(stop - start):
            pts = np.ascontiguousarray(np.vstack([fixed, pool[offsets[i] : offsets[i + 1]]]))
            out[start + i] = percolation_kernel(pts, params.radius, params.box_side, params.margin)
    return out


def estimate_theta_M(params: PercolationParams, n: int, stream: RngStream) -> Estimate:
    """Estimate the probability that the origin's cluster escapes the M-box.

    Averages n independent escape indicators, each computed on a fresh
    Poisson sample over the padded window with the origin appended.
    """
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    if params.intensity == 0.0:
        return Estimate(0.0, 0.0, n)
    return Estimate.from_samples(_percolation_indicators(params, n, _as_generator(stream)))


def estimate_conditional_theta(
    slow_config: PointSet,
    intensity_fast: float,
    params: PercolationParams,
    n_inner: int,
    stream: RngStream,
) -> Estimate:
    """Escape probability given a frozen slow configuration.

    Each inner replication unions the slow points with a fresh Poisson
    cloud of the fast intensity and recomputes the escape indicator.
    """
    if n_inner < 1:
        raise InvalidParameterError(f"n_inner must be >= 1, got {n_inner}")
    if intensity_fast < 0:
        raise InvalidParameterError(f"intensity_fast must be >= 0, got {intensity_fast}")
    if slow_config.dim != params.dim:
        raise InvalidParameterError("slow_config dimension does not match params")
    window = params.window
    if not (np.all(slow_config.region.lower <= window.lower + 1e-9) and np.all(slow_config.region.upper >= window.upper - 1e-9)):
        raise InvalidParameterError("slow_config must be sampled on the padded percolation window")
    fixed = slow_config.restricted(window).points
    fast = PercolationParams(intensity_fast, params.radius, params.box_side, params.dim, params.margin)
    return Estimate.from_samples(_percolation_indicators(fast, n_inner, _as_generator(stream), extra=fixed))


@dataclass(frozen=True)
class _BisectionPoint:
    intensity: float
    estimate: Estimate
    positive: bool


@dataclass(frozen=True)
class LambdaCBracket:
    """Bisection bracket for the critical intensity at the largest box side.

    history holds one (box_side, lower, upper) triple per schedule entry so
    the box dependence stays visible; evaluations is the raw bisection
    trace at the final box side.
    """

    lower: float
    upper: float
    box_side: float
    history: tuple[tuple[float, float, float], ...]
    evaluations: tuple[_BisectionPoint, ...]

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _bisect_at_box(
    radius: float,
    box_side: float,
    tol: float,
    stream: RngStream,
    dim: int,
    n_per_eval: int,
    threshold: float,
) -> tuple[float, float, list[_BisectionPoint]]:
    trace: list[_BisectionPoint] = []

    def probe(lam: float) -> bool:
        params = PercolationParams(lam, radius, box_side, dim)
        sub = stream.substream("lambda-c", int(box_side * 1024), len(trace))
        est = estimate_theta_M(params, n_per_eval, sub)
        positive = est.ci95[0] > threshold
        trace.append(_BisectionPoint(lam, est, positive))
        for a in trace:
            for b in trace:
                if a.intensity < b.intensity and a.positive and not b.positive:
                    raise BisectionError(
                        "theta estimates are non-monotone beyond noise",
                        [(p.intensity, p.estimate.value, p.estimate.std_error, p.positive) for p in trace],
                    )
        return positive

    lo, hi = 0.0, 1.0
    while not probe(hi):
        lo, hi = hi, 2.0 * hi
        if hi > 64.0:
            raise BisectionError(
                "no supercritical intensity found below 64",
                [(p.intensity, p.estimate.value, p.estimate.std_error, p.positive) for p in trace],
            )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if probe(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi, trace


def estimate_lambda_c(
    radius: float,
    box_schedule: tuple[float, ...],
    tol: float,
    stream: RngStream,
    dim: int = 2,
    n_per_eval: int = 2000,
    threshold: float = 0.02,
) -> LambdaCBracket:
    """Bracket the finite-box pseudo-critical intensity by bisection.

    An intensity counts as supercritical when the lower 95% confidence
    bound of theta^M exceeds the threshold.  The bracket is computed at
    every box side in the (increasing) schedule and returned for the
    largest; smaller boxes are reported in history, not hidden, since the
    bracket center drifts with the box side.
    """
    if tol <= 0:
        raise InvalidParameterError(f"tol must be positive, got {tol}")
    if len(box_schedule) == 0 or any(b <= a for a, b in zip(box_schedule, box_schedule[1:])):
        raise InvalidParameterError("box_schedule must be a nonempty increasing sequence")
    history = []
    final: tuple[float, float, list[_BisectionPoint]] | None = None
    for box_side in box_schedule:
        final = _bisect_at_box(radius, float(box_side), tol, stream, dim, n_per_eval, threshold)
        history.append((float(box_side), final[0], final[1]))
    assert final is not None
    return LambdaCBracket(final[0], final[1], float(box_schedule[-1]), tuple(history), tuple(final[2]))


@dataclass(frozen=True)
class StretchEstimate:
    """Mean hop-per-distance ratio over sampled giant-component pairs.

    hops and distances keep the raw per-pair samples so callers can check
    the hard geometric bound hops >= ceil(distance / radius) themselves.
    """

    estimate: Estimate
    hops: np.ndarray
    distances: np.ndarray
    giant_fraction: float


def estimate_stretch_factor(
    intensity: float,
    radius: float,
    window_side: float,
    band: tuple[float, float],
    n_pairs: int,
    stream: RngStream,
    dim: int = 2,
) -> StretchEstimate:
    """Estimate the stretch factor: graph distance over Euclidean distance.

    Samples a Poisson cloud on the window, takes its largest component as
    the giant-component surrogate, and averages the hop/distance ratio
    over pairs whose Euclidean distance falls in the band.
    """
    lo, hi = band
    if not (0 < lo < hi):
        raise InvalidParameterError(f"band must satisfy 0 < lo < hi, got {band}")
    if lo < 20.0 * radius:
        raise InvalidParameterError(f"band lower end {lo} too small; need >= 20 * radius for the linear regime")
    if window_side < 4.0 * hi:
        raise InvalidParameterError(f"window side {window_side} too small for band {band}")
    if n_pairs < 1:
        raise InvalidParameterError(f"n_pairs must be >= 1, got {n_pairs}")
    gen = _as_generator(stream)
    region = centered_box(window_side, dim)
    counts = int(gen.poisson(intensity * region.volume))
    pts = region.lower + gen.random((counts, dim)) * region.side
    graph = build_graph(pts, radius)
    summary = ComponentSummary.from_graph(graph)
    if summary.labels.size == 0:
        raise SupercriticalityError("empty sample; intensity too low for a giant component")
    giant_fraction = summary.largest_size / summary.labels.size
    if giant_fraction < 0.10:
        raise SupercriticalityError(
            f"largest component holds {giant_fraction:.1%} of points (< 10%); "
            "the stretch factor needs a supercritical intensity"
        )
    giant_label = summary.labels[np.argmax(summary.sizes)]
    giant = np.flatnonzero(summary.labels == giant_label)
    # keep sources away from the boundary so band-mates exist on all sides
    interior = giant[np.all(np.abs(pts[giant]) <= 0.5 * window_side - hi, axis=1)]
    if interior.size == 0:
        raise InvalidParameterError("no giant-component points at distance band depth from the boundary")
    hops = np.empty(n_pairs, dtype=np.int64)
    dists = np.empty(n_pairs, dtype=np.float64)
    max_depth = int(math.ceil(4.0 * hi / radius)) + 8
    filled = 0
    while filled < n_pairs:
        src = int(gen.choice(interior))
        gaps = np.linalg.norm(pts[giant] - pts[src], axis=1)
        mates = giant[(gaps >= lo) & (gaps <= hi)]
        if mates.size == 0:
            continue
        dist_map = bfs_distances_kernel(graph.points, radius, src, max_depth)
        reachable = mates[dist_map[mates] >= 0]
        if reachable.size == 0:  # depth cap hit; only possible for extreme detours
            continue
        take = reachable[gen.integers(reachable.size, size=min(n_pairs - filled, 4))]
        for j in take:
            hops[filled] = dist_map[j]
            dists[filled] = np.linalg.norm(pts[j] - pts[src])
            filled += 1
    ratios = hops / dists
    return StretchEstimate(Estimate.from_samples(ratios), hops, dists, giant_fraction)


def sample_phase_arrivals(dist: DisplacementDistribution, n: int, gen: np.random.Generator) -> np.ndarray:
    """Rescaled leg arrival times for n trajectories, as one padded matrix.

    Row i is 0 = T_0 < T_1 < ... with increments |V_j|; columns continue
    past the first arrival beyond 1, so entries after the stopping time
    are all > 1 and drop out of any phase query on [0, 1].
    """
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    max_legs = int(math.ceil(1.0 / dist.r_min)) + 1 if dist.r_min > 0 else 64
    radii = dist.sample_radii(n * max_legs, gen).reshape(n, max_legs)
    arrivals = np.zeros((n, max_legs + 1))
    np.cumsum(radii, axis=1, out=arrivals[:, 1:])
    while np.any(arrivals[:, -1] <= 1.0):  # r_min = 0 only; top up the short rows
        extra = dist.sample_radii(n, gen)
        arrivals = np.hstack([arrivals, arrivals[:, -1:] + np.cumsum(extra[:, None], axis=1)])
    return arrivals


def _slow_fractions(times: np.ndarray, arrivals: np.ndarray) -> np.ndarray:
    """P(slow at t) estimates for each t, from one arrival matrix."""
    out = np.empty(times.size)
    for i, t in enumerate(times):
        leg = np.sum(arrivals <= t, axis=1) - 1  # arrival at t opens the new leg
        out[i] = np.mean(leg % 2 == 0)
    return out


def phase_intensity_profile(
    times: np.ndarray,
    intensity: float,
    dist: DisplacementDistribution,
    n: int,
    stream: RngStream,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Slow and fast intensity estimates on a whole time grid.

    Returns (slow, fast, std_error) arrays; slow + fast == intensity holds
    exactly at every time because each trajectory is classified into
    exactly one phase.
    """
    times = np.asarray(times, dtype=np.float64)
    if np.any((times < 0) | (times > 1)):
        raise InvalidParameterError("phase times must lie in [0, 1]")
    if intensity < 0:
        raise InvalidParameterError(f"intensity must be >= 0, got {intensity}")
    arrivals = sample_phase_arrivals(dist, n, _as_generator(stream))
    p = _slow_fractions(times, arrivals)
    se = intensity * np.sqrt(p * (1.0 - p) * (n / max(n - 1, 1))) / math.sqrt(n)
    return intensity * p, intensity * (1.0 - p), se


def estimate_phase_intensity(
    t: float,
    intensity: float,
    dist: DisplacementDistribution,
    n: int,
    stream: RngStream,
) -> tuple[Estimate, Estimate]:
    """Slow and fast intensity at a single rescaled time."""
    slow, fast, se = phase_intensity_profile(np.array([t]), intensity, dist, n, stream)
    return Estimate(float(slow[0]), float(se[0]), n), Estimate(float(fast[0]), float(se[0]), n)
