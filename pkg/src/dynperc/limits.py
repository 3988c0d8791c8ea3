"""Samplers for the limiting objects of the two models.

The slow-node limit is a birth-death process: particles appear at Poisson
locations with birth times from a renewal measure, drift at speed one for
a lifetime equal to their displacement length, and vanish.  The k-hop
limits are a deterministic constant (dense sinks), a Poisson mixture
(sparse sinks), and a functional of a Brownian path through a Poisson
sink field (critical scaling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import TimeGrid
from .errors import InvalidParameterError
from .estimators import Estimate, PercolationParams, estimate_conditional_theta, phase_intensity_profile
from .geometry import Box, PointSet, RngStream, _as_generator, ball_volume, centered_box
from .mobility import DisplacementDistribution

__all__ = [
    "RenewalMeasureSample",
    "BirthDeathProcess",
    "BrownianPath",
    "LimitMeasureSample",
    "sample_renewal_measure_nu",
    "sample_birth_death",
    "slow_config_at",
    "sample_limit_percolation_measure",
    "dense_limit_constant",
    "sample_sparse_limit",
    "sample_critical_limit",
    "sample_brownian_path",
]


@dataclass(frozen=True)
class RenewalMeasureSample:
    """Empirical renewal measure on [0, 1], pooled over many sequences.

    Inter-arrivals are |V'| + |V''| with independent displacement draws;
    every sequence contributes its deterministic epoch at 0, so the mass
    estimate is always >= 1.  Drawing from the pool samples the normalized
    restriction of the measure to [0, 1].
    """

    epochs: np.ndarray
    n_sequences: int
    mass: Estimate

    def __post_init__(self):
        if self.epochs.size == 0:
            raise InvalidParameterError("renewal pool is empty")
        if np.any((self.epochs < 0) | (self.epochs > 1)):
            raise InvalidParameterError("pooled epochs must lie in [0, 1]")

    def draw(self, size: int, rng) -> np.ndarray:
        return _as_generator(rng).choice(self.epochs, size=size, replace=True)


def sample_renewal_measure_nu(dist: DisplacementDistribution, n: int, stream: RngStream) -> RenewalMeasureSample:
    """Simulate n renewal sequences and pool their epochs in [0, 1]."""
    if n < 1:
        raise InvalidParameterError(f"n must be >= 1, got {n}")
    gen = _as_generator(stream)
    pools = [np.zeros(n)]  # the epoch at 0, once per sequence
    counts = np.ones(n)
    running = np.zeros(n)
    active = np.arange(n)
    while active.size:
        gaps = dist.sample_radii(active.size, gen) + dist.sample_radii(active.size, gen)
        running[active] = running[active] + gaps
        hit = running[active] <= 1.0
        pools.append(running[active][hit])
        counts[active[hit]] += 1
        active = active[hit]
    epochs = np.sort(np.concatenate(pools))
    return RenewalMeasureSample(epochs, n, Estimate.from_samples(counts))


@dataclass(frozen=True)
class BirthDeathProcess:
    """Finite-window draw of the birth-death limit of the slow nodes."""

    births: np.ndarray  # (n, d) birth locations
    birth_times: np.ndarray  # (n,) in [0, 1]
    displacements: np.ndarray  # (n, d); lifetime = |displacement|
    region: Box
    nu_mass: float

    def __post_init__(self):
        n = self.births.shape[0]
        if self.birth_times.shape != (n,) or self.displacements.shape != self.births.shape:
            raise InvalidParameterError("birth-death arrays have mismatched shapes")

    @property
    def n(self) -> int:
        return self.births.shape[0]

    @property
    def lifetimes(self) -> np.ndarray:
        return np.linalg.norm(self.displacements, axis=1)


def sample_birth_death(
    intensity: float,
    dist: DisplacementDistribution,
    region: Box,
    stream: RngStream,
    nu: RenewalMeasureSample | None = None,
    nu_pool: int = 10_000,
) -> BirthDeathProcess:
    """Draw the birth-death process on a box region.

    Locations are uniform with total rate intensity * |region|, birth
    times come from the normalized renewal pool, and each particle gets an
    independent displacement whose length is its lifetime.
    """
    if intensity < 0:
        raise InvalidParameterError(f"intensity must be >= 0, got {intensity}")
    gen = _as_generator(stream)
    if nu is None:
        nu = sample_renewal_measure_nu(dist, nu_pool, gen)
    n = int(gen.poisson(intensity * region.volume))
    births = region.lower + gen.random((n, dist.dim)) * region.side
    birth_times = nu.draw(n, gen)
    disp = dist.sample(n, gen) if n else np.empty((0, dist.dim))
    return BirthDeathProcess(births, birth_times, disp, region, nu.mass.value)


def slow_config_at(proc: BirthDeathProcess, t: float) -> PointSet:
    """Positions of the particles alive at time t.

    A particle born at x at time sigma is alive while sigma <= t <= sigma
    + |V| and sits at x + (t - sigma) V / |V|; the region is padded by the
    maximal lifetime since late-life particles drift out of the birth box.
    """
    if not 0.0 <= t <= 1.0:
        raise InvalidParameterError(f"t must lie in [0, 1], got {t}")
    life = proc.lifetimes
    alive = (proc.birth_times <= t) & (t <= proc.birth_times + life)
    age = (t - proc.birth_times[alive])[:, None]
    v = proc.displacements[alive]
    norms = life[alive][:, None]
    pos = proc.births[alive] + np.where(norms > 0, age * v / np.where(norms > 0, norms, 1.0), 0.0)
    pad = float(life.max()) if life.size else 0.0
    return PointSet(pos, proc.region.padded(pad))


@dataclass(frozen=True)
class LimitMeasureSample:
    """Limit analogue of a measure replication: a [0, 1] value per grid
    time (a conditional probability, not a 0/1 indicator)."""

    grid: TimeGrid
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.n_t,):
            raise InvalidParameterError(f"expected {self.grid.n_t} values, got shape {vals.shape}")
        if np.any((vals < 0) | (vals > 1)):
            raise InvalidParameterError("limit values must lie in [0, 1]")
        object.__setattr__(self, "values", vals)

    def pairing(self, g) -> float:
        return self.grid.pair(g, self.values)

    def total(self) -> float:
        return float(np.mean(self.values))


def sample_limit_percolation_measure(
    params: PercolationParams,
    dist: DisplacementDistribution,
    grid: TimeGrid,
    n_inner: int,
    stream: RngStream,
    fast_profile: np.ndarray | None = None,
    nu: RenewalMeasureSample | None = None,
    profile_samples: int = 20_000,
) -> LimitMeasureSample:
    """One outer draw of the limiting percolation time measure.

    Draws a single birth-death configuration, then for each grid time
    estimates the conditional escape probability given the alive slow
    points, filling the rest of the intensity with fresh fast points.  The
    fast intensity profile is the exact complement of the slow one, so the
    two phases always add up to the full intensity.
    """
    gen = _as_generator(stream)
    if fast_profile is None:
        _, fast_profile, _ = phase_intensity_profile(grid.times, params.intensity, dist, profile_samples, gen)
    fast_profile = np.asarray(fast_profile, dtype=np.float64)
    if fast_profile.shape != (grid.n_t,):
        raise InvalidParameterError(f"fast_profile must have {grid.n_t} entries")
    if np.any((fast_profile < 0) | (fast_profile > params.intensity + 1e-9)):
        raise InvalidParameterError("fast_profile entries must lie in [0, intensity]")
    region = centered_box(params.box_side + 4.0 * params.radius + 2.0 * dist.r_max, params.dim)
    proc = sample_birth_death(params.intensity, dist, region, gen, nu=nu)
    values = np.empty(grid.n_t)
    for i, t in enumerate(grid.times):
        slow = slow_config_at(proc, float(t)).restricted(params.window)
        values[i] = estimate_conditional_theta(slow, float(fast_profile[i]), params, n_inner, gen).value
    meta = {"nu_mass": proc.nu_mass, "region_side": region.side, "n_particles": proc.n}
    return LimitMeasureSample(grid, values, meta)


def _check_limit_params(theta: float, c0: float, mu: float, dim: int) -> None:
    if not 0.0 <= theta <= 1.0:
        raise InvalidParameterError(f"theta must lie in [0, 1], got {theta}")
    if c0 < 0:
        raise InvalidParameterError(f"c0 must be >= 0, got {c0}")
    if mu <= 0:
        raise InvalidParameterError(f"mu must be positive, got {mu}")
    if dim < 1:
        raise InvalidParameterError(f"dim must be >= 1, got {dim}")


def dense_limit_constant(theta: float, c0: float, mu: float, dim: int = 2) -> float:
    """Deterministic k-hop limit under dense sinks."""
    _check_limit_params(theta, c0, mu, dim)
    return theta * (1.0 - math.exp(-c0 * theta * ball_volume(dim, 1.0 / mu)))


def sample_sparse_limit(theta: float, c0: float, mu: float, dim: int = 2, stream=None, size: int | None = None):
    """Draws of the k-hop limit under sparse sinks.

    N ~ Poisson(c0 |B_{1/mu}|) sinks are reachable; each is missed
    independently with probability 1 - theta given percolation.
    """
    _check_limit_params(theta, c0, mu, dim)
    gen = _as_generator(stream)
    n_sinks = gen.poisson(c0 * ball_volume(dim, 1.0 / mu), size=size)
    out = theta * (1.0 - (1.0 - theta) ** n_sinks)
    return float(out) if size is None else out


@dataclass(frozen=True)
class BrownianPath:
    """Standard Brownian motion tabulated at grid times (started at 0)."""

    grid: TimeGrid
    values: np.ndarray  # (n_t, d)

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[0] != self.grid.n_t:
            raise InvalidParameterError(f"expected ({self.grid.n_t}, d) values, got {self.values.shape}")

    @property
    def dim(self) -> int:
        return self.values.shape[1]


def sample_brownian_path(grid: TimeGrid, dim: int, stream: RngStream) -> BrownianPath:
    """Sample W at the grid times by independent Gaussian increments."""
    if dim < 1:
        raise InvalidParameterError(f"dim must be >= 1, got {dim}")
    gen = _as_generator(stream)
    times = grid.times
    gaps = np.diff(times, prepend=0.0)
    steps = gen.standard_normal((grid.n_t, dim)) * np.sqrt(gaps)[:, None]
    return BrownianPath(grid, np.cumsum(steps, axis=0))


def sample_critical_limit(
    theta: float,
    c0: float,
    mu: float,
    dim: int = 2,
    grid: TimeGrid = TimeGrid(),
    g="1",
    stream: RngStream | None = None,
) -> float:
    """One draw of the k-hop limit functional at critical sink scaling.

    A Brownian path carries the reach ball B_{1/mu}(W_t) through a Poisson
    sink field of intensity c0; the functional pairs g with the sparse-type
    term driven by the number of sinks currently in reach.  The field is
    sampled on the realized path's bounding box padded by the reach radius,
    which covers every queried ball exactly.
    """
    _check_limit_params(theta, c0, mu, dim)
    gen = _as_generator(stream)
    path = sample_brownian_path(grid, dim, gen)
    reach = 1.0 / mu
    lo = path.values.min(axis=0) - reach
    hi = path.values.max(axis=0) + reach
    side = float(np.max(hi - lo))
    center = 0.5 * (lo + hi)
    n_sinks = int(gen.poisson(c0 * side**dim))
    sinks = (center - 0.5 * side) + gen.random((n_sinks, dim)) * side
    if isinstance(g, np.ndarray):
        gv = np.asarray(g, dtype=np.float64)
    elif isinstance(g, str):
        from .dynamics import TEST_FUNCTIONS

        gv = TEST_FUNCTIONS[g](grid.times)
    else:
        gv = np.asarray(g(grid.times), dtype=np.float64)
    if gv.shape != (grid.n_t,):
        raise InvalidParameterError(f"g must tabulate to {grid.n_t} grid values")
    if n_sinks == 0:
        counts = np.zeros(grid.n_t, dtype=np.int64)
    else:
        d2 = np.sum((sinks[None, :, :] - path.values[:, None, :]) ** 2, axis=2)
        counts = np.sum(d2 <= reach * reach, axis=1)
    return float(np.mean(gv * theta * (1.0 - (1.0 - theta) ** counts)))
