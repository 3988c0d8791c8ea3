"""Dynamic simulations of the two network models on a rescaled time grid.

Both models report the same artifact: a 0/1 indicator per grid time on
[0, 1], read as an empirical time measure through pairings with test
functions.  The two-scale model asks whether the origin percolates beyond
an M-box among waypoint-moving nodes; the infrastructure model asks
whether a moving typical node reaches a static sink within k relay hops.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.stats import poisson as _poisson

from ._kernels import crw_advance_kernel, percolation_kernel
from .connectivity import k_hop_connected
from .errors import InvalidParameterError, ResourceLimitError
from .estimators import Estimate
from .geometry import Box, RngStream, _as_generator, centered_box
from .mobility import DisplacementDistribution

__all__ = [
    "TimeGrid",
    "MeasureSample",
    "TEST_FUNCTIONS",
    "TwoScaleConfig",
    "InfraConfig",
    "simulate_percolation_measure",
    "simulate_khop_measure",
    "estimate_covariance_decay",
]

TEST_FUNCTIONS = {
    "1": lambda t: np.ones_like(t),
    "t": lambda t: t,
    "1-t": lambda t: 1.0 - t,
    "t^2": lambda t: t**2,
    "cos_pi_t": lambda t: np.cos(np.pi * t),
}


@dataclass(frozen=True)
class TimeGrid:
    """Midpoint grid on [0, 1]: t_i = (i + 1/2) / n_t."""

    n_t: int = 200

    def __post_init__(self):
        if self.n_t < 1:
            raise InvalidParameterError(f"n_t must be >= 1, got {self.n_t}")

    @property
    def times(self) -> np.ndarray:
        return (np.arange(self.n_t) + 0.5) / self.n_t

    def pair(self, g, values: np.ndarray) -> float:
        """Midpoint quadrature of g(t) against per-time values.

        g may be a named test function, a callable, or precomputed g(t_i).
        """
        if isinstance(g, str):
            gv = TEST_FUNCTIONS[g](self.times)
        elif callable(g):
            gv = g(self.times)
        else:
            gv = np.asarray(g, dtype=np.float64)
            if gv.shape != (self.n_t,):
                raise InvalidParameterError(f"expected {self.n_t} g values, got shape {gv.shape}")
        return float(np.mean(gv * np.asarray(values, dtype=np.float64)))


@dataclass(frozen=True)
class MeasureSample:
    """One replication of an empirical time measure: 0/1 per grid time."""

    grid: TimeGrid
    indicators: np.ndarray
    model: str  # "two-scale" | "khop"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        ind = np.ascontiguousarray(np.asarray(self.indicators, dtype=np.uint8))
        if ind.shape != (self.grid.n_t,):
            raise InvalidParameterError(f"expected {self.grid.n_t} indicators, got shape {ind.shape}")
        if np.any(ind > 1):
            raise InvalidParameterError("indicators must be 0 or 1")
        object.__setattr__(self, "indicators", ind)

    def pairing(self, g) -> float:
        return self.grid.pair(g, self.indicators)

    def total(self) -> float:
        """Pairing with g = 1: the fraction of grid time the event holds."""
        return float(np.mean(self.indicators))


@dataclass(frozen=True)
class TwoScaleConfig:
    """Scale parameters of the waypoint percolation simulation."""

    intensity: float
    radius: float
    box_side: float
    horizon: float
    dim: int = 2
    dist: DisplacementDistribution = field(default_factory=DisplacementDistribution)
    grid: TimeGrid = field(default_factory=TimeGrid)
    margin: float = 1.0

    def __post_init__(self):
        for name in ("intensity", "radius", "box_side", "horizon", "margin"):
            if getattr(self, name) < 0 or (name != "intensity" and getattr(self, name) == 0):
                raise InvalidParameterError(f"{name} must be positive")
        if self.horizon < self.box_side:
            raise InvalidParameterError(
                f"horizon {self.horizon} below box side {self.box_side}; the scaling regime needs T >= M"
            )
        if self.dist.dim != self.dim:
            raise InvalidParameterError("displacement dimension does not match dim")

    @property
    def eval_side(self) -> float:
        return self.box_side + 2.0 * self.radius

    @property
    def window(self) -> Box:
        # node speed never exceeds 1, so nothing beyond horizon reach of the
        # evaluation box can ever matter: truncation is lossless
        return centered_box(self.eval_side + 2.0 * self.horizon, self.dim)


def _crw_tail_quantile(jump_rate: float, horizon: float, dist: DisplacementDistribution, eps: float) -> float:
    """Upper bound on the 1 - eps quantile of the maximal walk displacement.

    Splits the budget between the Poisson jump-count tail and, per
    coordinate, a Freedman bound on the maximally stopped jump sum with
    increments bounded by r_max and per-jump variance E R^2 / d.
    """
    d = dist.dim
    n_star = float(_poisson.isf(eps / 2.0, jump_rate * horizon))
    log_term = math.log(4.0 * d / eps)
    var = n_star * dist.second_moment_radius / d
    bl3 = dist.r_max * log_term / 3.0
    per_coord = bl3 + math.sqrt(bl3 * bl3 + 2.0 * log_term * var)
    return math.sqrt(d) * per_coord


@dataclass(frozen=True)
class InfraConfig:
    """Scale parameters of the infrastructure k-hop simulation.

    The sink intensity and hop budget follow from (c0, alpha, horizon);
    rounding k to an integer means the realized sink scaling constant can
    drift from c0, which is logged rather than hidden.
    """

    intensity: float
    radius: float
    box_side: float
    horizon: float
    c0: float
    alpha: float
    mu_hat: float
    dim: int = 2
    dist: DisplacementDistribution = field(default_factory=lambda: DisplacementDistribution().crw_normalized())
    jump_rate: float = 1.0
    grid: TimeGrid = field(default_factory=TimeGrid)
    truncation_eps: float = 1e-6
    max_points: float = 2e7

    def __post_init__(self):
        for name in ("intensity", "radius", "box_side", "horizon", "c0", "mu_hat", "jump_rate"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be positive")
        if self.alpha <= 0:
            raise InvalidParameterError(f"alpha must be positive, got {self.alpha}")
        if not 0 < self.truncation_eps < 1e-2:
            raise InvalidParameterError(f"truncation_eps must be in (0, 0.01), got {self.truncation_eps}")
        if self.dist.dim != self.dim:
            raise InvalidParameterError("displacement dimension does not match dim")
        trace_gap = abs(self.dist.covariance_trace - self.dim) / self.dim
        if trace_gap > 0.01:
            raise InvalidParameterError(
                f"jump law covariance trace {self.dist.covariance_trace:.4f} is {trace_gap:.1%} from dim; "
                "pass dist.crw_normalized()"
            )
        drift = abs(self.realized_c0 - self.c0) / self.c0
        if drift > 0.02:
            warnings.warn(
                f"rounded hop budget k={self.k} realizes sink constant {self.realized_c0:.4g} "
                f"({drift:.1%} from c0={self.c0}); comparisons should use the realized value",
                stacklevel=2,
            )
        expected = self.intensity * self.window.volume
        if expected > self.max_points:
            raise ResourceLimitError(
                f"window {self.window.side:.4g} implies {expected:.3g} expected relays "
                f"> max_points={self.max_points:.3g}; lower horizon/intensity or raise max_points"
            )

    @property
    def sink_intensity(self) -> float:
        return self.horizon**-self.alpha

    @property
    def k(self) -> int:
        return max(1, round((self.c0 / self.sink_intensity) ** (1.0 / self.dim)))

    @property
    def realized_c0(self) -> float:
        return self.sink_intensity * self.k**self.dim

    @cached_property
    def tail_quantile(self) -> float:
        return _crw_tail_quantile(self.jump_rate, self.horizon, self.dist, self.truncation_eps)

    @cached_property
    def window(self) -> Box:
        side = 2.0 * (self.k / self.mu_hat + self.tail_quantile + self.radius + self.box_side)
        return centered_box(side, self.dim)

    def realized_parameters(self) -> dict:
        return {
            "sink_intensity": self.sink_intensity,
            "k": self.k,
            "realized_c0": self.realized_c0,
            "tail_quantile": self.tail_quantile,
            "window_side": self.window.side,
            "truncation_eps": self.truncation_eps,
        }


def _sample_pruned_trajectories(cfg: TwoScaleConfig, gen: np.random.Generator):
    """Poisson cloud of trajectory starts on the big window, thinned to the
    walkers whose realized path can touch the evaluation box.

    Returns (arrivals, waypoints) padded matrices for the survivors.  The
    excursion bound sums the traversed length of each leg (fast legs count
    horizon-fold), so discarded walkers provably never enter.
    """
    window = cfg.window
    n = int(gen.poisson(cfg.intensity * window.volume))
    starts = window.lower + gen.random((n, cfg.dim)) * window.side
    if n == 0:
        empty = np.empty((0, 2)), np.empty((0, 2, cfg.dim))
        return empty
    max_legs = int(math.ceil(1.0 / cfg.dist.r_min)) + 1 if cfg.dist.r_min > 0 else 8
    disp = cfg.dist.sample(n * max_legs, gen).reshape(n, max_legs, cfg.dim)
    radii = np.linalg.norm(disp, axis=2)
    while True:  # r_min = 0 laws may need more legs to pass rescaled time 1
        arrivals = np.zeros((n, radii.shape[1] + 1))
        np.cumsum(radii, axis=1, out=arrivals[:, 1:])
        if np.all(arrivals[:, -1] > 1.0):
            break
        more = cfg.dist.sample(n, gen).reshape(n, 1, cfg.dim)
        disp = np.concatenate([disp, more], axis=1)
        radii = np.hstack([radii, np.linalg.norm(more, axis=2)])
    scale = np.where(np.arange(disp.shape[1]) % 2 == 0, 1.0, cfg.horizon)
    traversed = np.clip(np.minimum(arrivals[:, 1:], 1.0) - arrivals[:, :-1], 0.0, None)
    excursion = traversed @ scale
    keep = np.max(np.abs(starts), axis=1) <= 0.5 * cfg.eval_side + excursion
    starts, disp, arrivals = starts[keep], disp[keep], arrivals[keep]
    steps = scale[None, :, None] * disp
    waypoints = np.concatenate([starts[:, None, :], starts[:, None, :] + np.cumsum(steps, axis=1)], axis=1)
    return arrivals, waypoints


def _positions_at(arrivals: np.ndarray, waypoints: np.ndarray, u: float) -> np.ndarray:
    """Walker positions at rescaled time u, by linear interpolation on the
    current leg of each padded trajectory row."""
    leg = np.sum(arrivals <= u, axis=1) - 1
    a0 = np.take_along_axis(arrivals, leg[:, None], 1)
    a1 = np.take_along_axis(arrivals, leg[:, None] + 1, 1)
    w0 = np.take_along_axis(waypoints, leg[:, None, None], 1)[:, 0, :]
    w1 = np.take_along_axis(waypoints, leg[:, None, None] + 1, 1)[:, 0, :]
    return w0 + (w1 - w0) * ((u - a0) / (a1 - a0))


def _two_scale_indicators(cfg: TwoScaleConfig, times: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    arrivals, waypoints = _sample_pruned_trajectories(cfg, gen)
    origin = np.zeros((1, cfg.dim))
    half = 0.5 * cfg.eval_side
    out = np.empty(times.size, dtype=np.uint8)
    for i, u in enumerate(times):
        if arrivals.shape[0]:
            pos = _positions_at(arrivals, waypoints, float(u))
            pts = pos[np.max(np.abs(pos), axis=1) <= half]
            pts = np.ascontiguousarray(np.vstack([origin, pts]))
        else:
            pts = origin
        out[i] = percolation_kernel(pts, cfg.radius, cfg.box_side, cfg.margin)
    return out


def simulate_percolation_measure(cfg: TwoScaleConfig, stream: RngStream) -> MeasureSample:
    """One replication of the empirical percolation time measure.

    Nodes are a Poisson cloud with independent two-scale trajectories; at
    each grid time the escape indicator is computed on the instantaneous
    configuration with the static origin appended.
    """
    gen = _as_generator(stream)
    ind = _two_scale_indicators(cfg, cfg.grid.times, gen)
    meta = {"model": "two-scale", "horizon": cfg.horizon}
    if isinstance(stream, RngStream):
        meta["master_seed"] = stream.master_seed
        meta["stream_id"] = stream.stream_id
    return MeasureSample(cfg.grid, ind, "two-scale", meta)


def _khop_indicators(cfg: InfraConfig, times: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    window = cfg.window
    n_sinks = int(gen.poisson(cfg.sink_intensity * window.volume))
    sinks = window.lower + gen.random((n_sinks, cfg.dim)) * window.side
    n_relays = int(gen.poisson(cfg.intensity * window.volume))
    relays = window.lower + gen.random((n_relays, cfg.dim)) * window.side
    typical = np.zeros((1, cfg.dim))
    out = np.empty(times.size, dtype=np.uint8)
    clock = 0.0
    for i, u in enumerate(times):
        dt = float(u) * cfg.horizon - clock
        clock = float(u) * cfg.horizon
        crw_advance_kernel(typical, cfg.jump_rate, dt, cfg.dist.r_min, cfg.dist.r_max, gen)
        crw_advance_kernel(relays, cfg.jump_rate, dt, cfg.dist.r_min, cfg.dist.r_max, gen)
        if n_sinks == 0:
            out[i] = 0
            continue
        out[i] = k_hop_connected(typical[0], sinks, relays, cfg.k, cfg.radius)
    return out


def simulate_khop_measure(cfg: InfraConfig, stream: RngStream) -> MeasureSample:
    """One replication of the empirical k-hop connection time measure.

    Static sinks, relays on independent jump walks, and a typical node
    walking from the origin; at each grid time the indicator asks whether
    the typical node reaches any sink within k relay hops.  The window is
    finite, so connections through relays outside it are missed; the
    budget for that truncation is truncation_eps per replication and the
    realized window parameters are recorded in the metadata.
    """
    gen = _as_generator(stream)
    ind = _khop_indicators(cfg, cfg.grid.times, gen)
    meta = dict(cfg.realized_parameters())
    meta["model"] = "khop"
    meta["horizon"] = cfg.horizon
    if isinstance(stream, RngStream):
        meta["master_seed"] = stream.master_seed
        meta["stream_id"] = stream.stream_id
    return MeasureSample(cfg.grid, ind, "khop", meta)


def estimate_covariance_decay(
    model: str,
    s: float,
    t: float,
    cfg: TwoScaleConfig | InfraConfig,
    n: int,
    stream: RngStream,
) -> Estimate:
    """Sample covariance of the indicators at two grid times.

    The decorrelation statements being probed condition on the trajectory
    history, which has no finite-sample surrogate; this measures the plain
    unconditional covariance over n replications.
    """
    if model not in ("two-scale", "khop"):
        raise InvalidParameterError(f"model must be 'two-scale' or 'khop', got {model!r}")
    if not (0 <= s <= 1 and 0 <= t <= 1):
        raise InvalidParameterError("times must lie in [0, 1]")
    if s == t:
        raise InvalidParameterError("times must be distinct; equal times would give a variance")
    if n < 2:
        raise InvalidParameterError(f"need n >= 2 replications, got {n}")
    times = np.array(sorted((float(s), float(t))))
    pairs = np.empty((n, 2))
    for rep in range(n):
        gen = stream.substream("cov", rep).generator()
        if model == "two-scale":
            pairs[rep] = _two_scale_indicators(cfg, times, gen)
        else:
            pairs[rep] = _khop_indicators(cfg, times, gen)
    centered = pairs - pairs.mean(axis=0)
    prod = centered[:, 0] * centered[:, 1]
    cov = float(prod.sum() / (n - 1))
    se = float(math.sqrt(max(np.mean(prod**2) - np.mean(prod) ** 2, 0.0) / n))
    return Estimate(cov, se, n)
