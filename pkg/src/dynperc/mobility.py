"""Mobility models: two-scale waypoint trajectories and jump random walks.

A two-scale trajectory alternates short slow legs and long fast legs.  Leg
displacements V_j are i.i.d. isotropic with bounded radial support; the
rescaled leg clock advances by |V_j| per leg, legs are generated until the
rescaled clock first exceeds 1, and the real clock runs up to the horizon
T = horizon * rescaled clock.  Even legs move at speed 1/T (waypoint step
V_j), odd legs at speed 1 (waypoint step T * V_j).

The jump model is a continuous-time random walk: hold at a position for an
exponential wait, then jump by a fresh displacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .geometry import RngStream, _as_generator

__all__ = [
    "DisplacementDistribution",
    "TwoScaleTrajectory",
    "PhaseSchedule",
    "JumpTrajectory",
    "sample_displacement",
    "build_two_scale_trajectory",
    "position_at",
    "phase_at",
    "is_T_self_avoiding",
    "build_crw_trajectory",
]

_RADIAL_LAWS = ("uniform",)


@dataclass(frozen=True)
class DisplacementDistribution:
    """Isotropic displacement law with radius supported on [r_min, r_max].

    The radius is absolutely continuous (r_min < r_max required) and the
    direction is uniform on the sphere, so the vector law has mean zero and
    covariance (E R^2 / d) * I.
    """

    r_min: float = 0.5
    r_max: float = 1.5
    radial_law: str = "uniform"
    dim: int = 2

    def __post_init__(self):
        if self.radial_law not in _RADIAL_LAWS:
            raise InvalidParameterError(
                f"unknown radial law {self.radial_law!r}; choose from {_RADIAL_LAWS}"
            )
        if not (0.0 <= self.r_min < self.r_max < math.inf):
            raise InvalidParameterError(
                f"need 0 <= r_min < r_max < inf, got [{self.r_min}, {self.r_max}]"
            )
        if self.dim < 1:
            raise InvalidParameterError(f"dim must be >= 1, got {self.dim}")

    @property
    def mean_radius(self) -> float:
        return 0.5 * (self.r_min + self.r_max)

    @property
    def second_moment_radius(self) -> float:
        a, b = self.r_min, self.r_max
        return (a * a + a * b + b * b) / 3.0

    @property
    def covariance_trace(self) -> float:
        # isotropy: trace of the vector covariance equals E R^2
        return self.second_moment_radius

    def radial_cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.clip((x - self.r_min) / (self.r_max - self.r_min), 0.0, 1.0)

    def sample_radii(self, n: int, rng) -> np.ndarray:
        gen = _as_generator(rng)
        return gen.uniform(self.r_min, self.r_max, size=n)

    def sample(self, n: int, rng) -> np.ndarray:
        """n i.i.d. displacement vectors, shape (n, dim)."""
        gen = _as_generator(rng)
        radii = self.sample_radii(n, gen)
        dirs = gen.standard_normal((n, self.dim))
        norms = np.linalg.norm(dirs, axis=1)
        # resample the (measure-zero) zero vectors rather than dividing by 0
        while np.any(norms == 0.0):
            bad = norms == 0.0
            dirs[bad] = gen.standard_normal((int(bad.sum()), self.dim))
            norms = np.linalg.norm(dirs, axis=1)
        return dirs * (radii / norms)[:, None]

    def crw_normalized(self) -> "DisplacementDistribution":
        """Affinely rescaled copy whose vector covariance trace equals dim."""
        s = math.sqrt(self.dim / self.covariance_trace)
        return DisplacementDistribution(s * self.r_min, s * self.r_max, self.radial_law, self.dim)


def sample_displacement(dist: DisplacementDistribution, rng) -> np.ndarray:
    return dist.sample(1, rng)[0]


@dataclass(frozen=True)
class TwoScaleTrajectory:
    """Piecewise-linear path through waypoints with a rescaled leg clock.

    waypoints[j+1] = waypoints[j] + horizon^(j mod 2) * displacements[j],
    rescaled_arrivals[j+1] = rescaled_arrivals[j] + |displacements[j]|, and
    the final arrival is the first one exceeding 1.  The path starts at the
    origin; callers add their own base point.
    """

    displacements: np.ndarray
    waypoints: np.ndarray
    rescaled_arrivals: np.ndarray
    horizon: float

    def __post_init__(self):
        disp = np.atleast_2d(np.asarray(self.displacements, dtype=np.float64))
        wp = np.atleast_2d(np.asarray(self.waypoints, dtype=np.float64))
        arr = np.asarray(self.rescaled_arrivals, dtype=np.float64).ravel()
        object.__setattr__(self, "displacements", disp)
        object.__setattr__(self, "waypoints", wp)
        object.__setattr__(self, "rescaled_arrivals", arr)
        if not (self.horizon >= 1.0 and math.isfinite(self.horizon)):
            raise InvalidParameterError(f"horizon must be >= 1, got {self.horizon}")
        n_legs = disp.shape[0]
        if wp.shape != (n_legs + 1, disp.shape[1]) or arr.shape != (n_legs + 1,):
            raise InvalidParameterError("waypoint/arrival shapes do not match the legs")
        if arr[0] != 0.0 or np.any(wp[0] != 0.0):
            raise InvalidParameterError("trajectory must start at the origin at time 0")
        radii = np.linalg.norm(disp, axis=1)
        if not np.allclose(np.diff(arr), radii, rtol=1e-9, atol=1e-12):
            raise InvalidParameterError("arrival increments must equal displacement radii")
        scale = np.where(np.arange(n_legs) % 2 == 0, 1.0, self.horizon)
        if not np.allclose(np.diff(wp, axis=0), scale[:, None] * disp, rtol=1e-9, atol=1e-12):
            raise InvalidParameterError("waypoint increments must be scaled displacements")
        if arr[-1] <= 1.0 or (n_legs > 1 and arr[-2] > 1.0):
            raise InvalidParameterError("legs must be generated until the first arrival > 1")

    @property
    def n_legs(self) -> int:
        return self.displacements.shape[0]

    @property
    def dim(self) -> int:
        return self.displacements.shape[1]


def build_two_scale_trajectory(
    dist: DisplacementDistribution, horizon: float, rng
) -> TwoScaleTrajectory:
    """Sample legs until the rescaled clock first exceeds 1."""
    if horizon < 1.0:
        raise InvalidParameterError(f"horizon must be >= 1, got {horizon}")
    gen = _as_generator(rng)
    disps: list[np.ndarray] = []
    clock = 0.0
    j = 0
    while clock <= 1.0:
        v = dist.sample(1, gen)[0]
        disps.append(v)
        clock += float(np.linalg.norm(v))
        j += 1
    disp = np.array(disps)
    radii = np.linalg.norm(disp, axis=1)
    arrivals = np.concatenate([[0.0], np.cumsum(radii)])
    scale = np.where(np.arange(j) % 2 == 0, 1.0, horizon)
    waypoints = np.vstack([np.zeros(dist.dim), np.cumsum(scale[:, None] * disp, axis=0)])
    return TwoScaleTrajectory(disp, waypoints, arrivals, float(horizon))


def _leg_index(traj: TwoScaleTrajectory, u: float) -> int:
    # right-open convention: an arrival time belongs to the leg it opens
    return int(np.searchsorted(traj.rescaled_arrivals, u, side="right")) - 1


def position_at(traj, t: float) -> np.ndarray:
    """Position at real-clock time t.

    Two-scale trajectories interpolate linearly within the current leg;
    jump trajectories are piecewise constant and right-continuous.
    """
    if isinstance(traj, JumpTrajectory):
        return traj.position_at(t)
    if not 0.0 <= t <= traj.horizon:
        raise InvalidParameterError(f"time {t} outside [0, {traj.horizon}]")
    u = t / traj.horizon
    j = min(_leg_index(traj, u), traj.n_legs - 1)
    a0, a1 = traj.rescaled_arrivals[j], traj.rescaled_arrivals[j + 1]
    if a1 == a0:  # zero-length leg in a hand-built path
        return traj.waypoints[j].copy()
    frac = (u - a0) / (a1 - a0)
    return traj.waypoints[j] + frac * (traj.waypoints[j + 1] - traj.waypoints[j])


def phase_at(traj: TwoScaleTrajectory, t: float) -> str:
    """"slow" or "fast" at real-clock time t (even legs are slow)."""
    if not 0.0 <= t <= traj.horizon:
        raise InvalidParameterError(f"time {t} outside [0, {traj.horizon}]")
    u = t / traj.horizon
    j = min(_leg_index(traj, u), traj.n_legs - 1)
    return "slow" if j % 2 == 0 else "fast"


@dataclass(frozen=True)
class PhaseSchedule:
    """Slow/fast intervals of a trajectory on the rescaled clock [0, 1].

    Intervals are right-open, pairwise disjoint, and their union covers
    [0, 1); each is a (start, end) row.
    """

    slow: np.ndarray
    fast: np.ndarray

    @classmethod
    def from_trajectory(cls, traj: TwoScaleTrajectory) -> "PhaseSchedule":
        arr = np.minimum(traj.rescaled_arrivals, 1.0)
        slow, fast = [], []
        for j in range(traj.n_legs):
            a, b = arr[j], arr[j + 1]
            if a >= b:
                continue
            (slow if j % 2 == 0 else fast).append((a, b))
        empty = np.empty((0, 2))
        return cls(
            np.array(slow) if slow else empty,
            np.array(fast) if fast else empty,
        )

    def total_slow(self) -> float:
        return float(np.sum(self.slow[:, 1] - self.slow[:, 0])) if self.slow.size else 0.0

    def total_fast(self) -> float:
        return float(np.sum(self.fast[:, 1] - self.fast[:, 0])) if self.fast.size else 0.0


def _segment_hits_box(p: np.ndarray, q: np.ndarray, center: np.ndarray, half: float) -> bool:
    """Exact test: does the closed segment [p, q] meet the axis box of half-width half?"""
    t0, t1 = 0.0, 1.0
    delta = q - p
    for c in range(p.shape[0]):
        lo = center[c] - half
        hi = center[c] + half
        if delta[c] == 0.0:
            if p[c] < lo or p[c] > hi:
                return False
        else:
            ta = (lo - p[c]) / delta[c]
            tb = (hi - p[c]) / delta[c]
            if ta > tb:
                ta, tb = tb, ta
            t0 = max(t0, ta)
            t1 = min(t1, tb)
            if t0 > t1:
                return False
    return True


def is_T_self_avoiding(traj: TwoScaleTrajectory, box_scale: float) -> bool:
    """Do fast legs stay clear of boxes around non-adjacent slow-phase starts?

    For every slow-phase start waypoint w_{2j} and every fast chord
    [w_{2j'-1}, w_{2j'}] with j' not in {j, j+1} (both within the horizon),
    the chord must miss the side-(4 * box_scale) box centered at w_{2j}.
    """
    if box_scale <= 0:
        raise InvalidParameterError(f"box scale must be positive, got {box_scale}")
    arr = traj.rescaled_arrivals
    half = 2.0 * box_scale
    n_legs = traj.n_legs
    # slow-phase starts are waypoints 2j; fast chords run w_{2j'-1} -> w_{2j'}
    slow_idx = [j for j in range(0, n_legs // 2 + 1) if arr[2 * j] <= 1.0]
    fast_idx = [jp for jp in range(1, n_legs // 2 + 1) if arr[2 * jp - 1] <= 1.0]
    for j in slow_idx:
        center = traj.waypoints[2 * j]
        for jp in fast_idx:
            if jp == j or jp == j + 1:
                continue
            p, q = traj.waypoints[2 * jp - 1], traj.waypoints[2 * jp]
            if _segment_hits_box(p, q, center, half):
                return False
    return True


@dataclass(frozen=True)
class JumpTrajectory:
    """Piecewise-constant path: hold, then jump at each epoch.

    positions[0] is the start (origin); positions[i] holds on
    [jump_times[i-1], jump_times[i]).  Right-continuous at epochs.
    """

    jump_times: np.ndarray
    positions: np.ndarray
    jump_rate: float
    horizon: float

    def __post_init__(self):
        times = np.asarray(self.jump_times, dtype=np.float64).ravel()
        pos = np.atleast_2d(np.asarray(self.positions, dtype=np.float64))
        object.__setattr__(self, "jump_times", times)
        object.__setattr__(self, "positions", pos)
        if pos.shape[0] != times.size + 1:
            raise InvalidParameterError("need one more position than jump epochs")
        if times.size and (np.any(np.diff(times) <= 0) or times[0] < 0 or times[-1] > self.horizon):
            raise InvalidParameterError("jump epochs must be increasing within [0, horizon]")
        if self.jump_rate <= 0:
            raise InvalidParameterError(f"jump rate must be positive, got {self.jump_rate}")

    @property
    def n_jumps(self) -> int:
        return self.jump_times.size

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def position_at(self, t: float) -> np.ndarray:
        if not 0.0 <= t <= self.horizon:
            raise InvalidParameterError(f"time {t} outside [0, {self.horizon}]")
        return self.positions[int(np.searchsorted(self.jump_times, t, side="right"))]

    def max_excursion(self) -> float:
        return float(np.max(np.linalg.norm(self.positions - self.positions[0], axis=1)))


def build_crw_trajectory(
    dist: DisplacementDistribution, jump_rate: float, horizon: float, rng
) -> JumpTrajectory:
    """Continuous-time random walk from the origin over [0, horizon].

    The jump law must be normalized so its vector covariance trace equals
    the dimension (within 1%); use DisplacementDistribution.crw_normalized.
    """
    if jump_rate <= 0 or horizon <= 0:
        raise InvalidParameterError("jump rate and horizon must be positive")
    trace = dist.covariance_trace
    if abs(trace - dist.dim) > 0.01 * dist.dim:
        raise InvalidParameterError(
            f"jump law covariance trace {trace:.4f} deviates from dim {dist.dim} "
            "by more than 1%; rescale with crw_normalized()"
        )
    gen = _as_generator(rng)
    n = int(gen.poisson(jump_rate * horizon))
    times = np.sort(gen.uniform(0.0, horizon, size=n))
    jumps = dist.sample(n, gen)
    pos = np.vstack([np.zeros(dist.dim), np.cumsum(jumps, axis=0)])
    return JumpTrajectory(times, pos, float(jump_rate), float(horizon))
