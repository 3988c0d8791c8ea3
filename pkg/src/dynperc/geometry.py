"""Point-process and box geometry primitives.

Everything downstream (graphs, mobility, measures) works on flat float64
arrays of shape (n, d).  This module owns the sampling-window types, exact
homogeneous Poisson sampling on boxes, and the counter-based RNG streams
that make parallel runs bit-reproducible.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "RngStream",
    "Box",
    "Ball",
    "PointSet",
    "ball_volume",
    "sample_homogeneous_poisson",
    "count_in_ball",
    "boundary_distance",
]


def _derive_stream_id(*parts) -> int:
    """Hash ints/strings into a 64-bit stream id (blake2b, order-sensitive)."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        if isinstance(p, (int, np.integer)):
            h.update(b"i" + int(p).to_bytes(16, "little", signed=True))
        elif isinstance(p, str):
            h.update(b"s" + p.encode("utf-8"))
        else:
            raise TypeError(f"stream id parts must be int or str, got {type(p)!r}")
        h.update(b"\x00")
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by (master_seed, stream_id).

    The generator is Philox with the 128-bit key (master_seed, stream_id),
    so the output is a pure function of the key and the draw counter:
    distinct ids give statistically independent streams and the sequence
    never depends on which thread or process consumes it.

    Child streams are derived with ``substream``: the new id is a blake2b-64
    digest of the parent id followed by the given tags.  Every replication
    and inner Monte Carlo loop gets its own child, so a run is reproducible
    under any parallel schedule.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & (2**64 - 1))
        object.__setattr__(self, "stream_id", int(self.stream_id) & (2**64 - 1))

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, *tags) -> "RngStream":
        return RngStream(self.master_seed, _derive_stream_id(self.stream_id, *tags))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng)!r}")


@dataclass(frozen=True)
class Box:
    """Axis-aligned cube: ``center`` (d,) and edge length ``side``."""

    center: np.ndarray
    side: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(center)):
            raise InvalidParameterError("box center must be finite")
        if not (self.side > 0 and math.isfinite(self.side)):
            raise InvalidParameterError(f"box side must be positive, got {self.side}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "side", float(self.side))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def volume(self) -> float:
        return self.side ** self.dim

    @property
    def lower(self) -> np.ndarray:
        return self.center - 0.5 * self.side

    @property
    def upper(self) -> np.ndarray:
        return self.center + 0.5 * self.side

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points inside the closed box."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        dev = np.abs(pts - self.center)
        return np.all(dev <= 0.5 * self.side + 1e-12, axis=1)

    def padded(self, margin: float) -> "Box":
        if self.side + 2.0 * margin <= 0:
            raise InvalidParameterError("padding would collapse the box")
        return Box(self.center, self.side + 2.0 * margin)


def centered_box(side: float, dim: int) -> Box:
    """Box of the given side centered at the origin."""
    return Box(np.zeros(dim), side)


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(center)):
            raise InvalidParameterError("ball center must be finite")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise InvalidParameterError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def volume(self) -> float:
        return ball_volume(self.dim, self.radius)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        d2 = np.sum((pts - self.center) ** 2, axis=1)
        return d2 <= self.radius**2


@dataclass(frozen=True)
class PointSet:
    """Finite configuration on a sampling window.

    ``points`` is (n, d) float64; ``region`` is the window the points were
    sampled on.  Construction checks that every point lies in the region,
    which catches window-arithmetic mistakes early.
    """

    points: np.ndarray
    region: Box

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2:
            pts = pts.reshape(-1, self.region.dim)
        if pts.shape[1] != self.region.dim:
            raise InvalidParameterError(
                f"points have dim {pts.shape[1]}, region has dim {self.region.dim}"
            )
        if pts.size and not np.all(np.isfinite(pts)):
            raise InvalidParameterError("points must be finite")
        if pts.size and not np.all(self.region.contains(pts)):
            raise InvalidParameterError("points must lie inside the region")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.region.dim

    def restricted(self, box: Box) -> "PointSet":
        """Points falling inside ``box``, as a new set on that window."""
        if self.n == 0:
            return PointSet(np.empty((0, box.dim)), box)
        return PointSet(self.points[box.contains(self.points)], box)


def ball_volume(dim: int, radius: float) -> float:
    """Volume of the Euclidean ball: pi^(d/2) r^d / Gamma(d/2 + 1)."""
    if dim < 1:
        raise InvalidParameterError(f"dimension must be >= 1, got {dim}")
    if radius < 0:
        raise InvalidParameterError(f"radius must be >= 0, got {radius}")
    return math.pi ** (dim / 2.0) * radius**dim / math.gamma(dim / 2.0 + 1.0)


def sample_homogeneous_poisson(intensity: float, region: Box, rng) -> PointSet:
    """Exact homogeneous Poisson sample on a box.

    Draws N ~ Poisson(intensity * |region|), then N independent uniform
    points.  ``rng`` may be an RngStream or a numpy Generator.
    """
    if intensity < 0 or not math.isfinite(intensity):
        raise InvalidParameterError(f"intensity must be >= 0, got {intensity}")
    gen = _as_generator(rng)
    n = int(gen.poisson(intensity * region.volume))
    pts = region.lower + region.side * gen.random((n, region.dim))
    return PointSet(pts, region)


def count_in_ball(points: PointSet | np.ndarray, ball: Ball) -> int:
    pts = points.points if isinstance(points, PointSet) else np.asarray(points)
    if pts.size == 0:
        return 0
    return int(np.count_nonzero(ball.contains(pts)))


def boundary_distance(box: Box, points: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to the box surface.

    Inside the box this is the gap to the nearest face; outside it is the
    distance to the box itself.  Points on the surface get 0.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    half = 0.5 * box.side
    dev = np.abs(pts - box.center)
    inside_gap = half - np.max(dev, axis=1)
    outside = np.sqrt(np.sum(np.maximum(dev - half, 0.0) ** 2, axis=1))
    return np.where(inside_gap >= 0.0, inside_gap, outside)
