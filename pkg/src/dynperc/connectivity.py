"""Geometric graphs with inclusive connection radius.

Two points are adjacent iff their Euclidean distance is <= the connection
radius (boundary included).  Graphs are backed by a uniform cell index with
cell side equal to the radius, so neighbor queries scan at most 3^d cells,
and components come from a union-find forest built in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import (
    bfs_distances_kernel,
    cell_sort,
    component_labels_kernel,
    khop_kernel,
    percolation_kernel,
    _grid_geometry,
)
from .errors import InvalidParameterError
from .geometry import Box, PointSet, centered_box

__all__ = [
    "GilbertGraph",
    "ComponentSummary",
    "build_graph",
    "percolates_M",
    "k_hop_connected",
    "graph_distance",
    "hop_distances_from",
]


class GilbertGraph:
    """Inclusive-radius geometric graph over a fixed point array.

    Holds the cell index (flat cell ids plus a sorted ordering) and the
    union-find component labels.  Edges are enumerated from the index on
    demand; there is no stored edge list.
    """

    def __init__(self, points: np.ndarray, radius: float):
        if radius <= 0 or not np.isfinite(radius):
            raise InvalidParameterError(f"connection radius must be positive, got {radius}")
        pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=np.float64)))
        if pts.size and not np.all(np.isfinite(pts)):
            raise InvalidParameterError("points must be finite")
        self.points = pts
        self.radius = float(radius)
        if self.n:
            self._lo, self._ncells = _grid_geometry(pts, self.radius)
            self._cell_id, self._order, self._starts = cell_sort(
                pts, self.radius, self._lo, self._ncells
            )
        self._labels: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def cell_of(self, i: int) -> int:
        return int(self._cell_id[i])

    def cell_members(self, flat_cell: int) -> np.ndarray:
        lo, hi = self._starts[flat_cell], self._starts[flat_cell + 1]
        return self._order[lo:hi]

    def neighbors(self, i: int) -> np.ndarray:
        """Indices adjacent to i, found by scanning the 3^d cells around it."""
        if self.n == 0:
            return np.empty(0, dtype=np.int64)
        x = self.points[i]
        coords = np.clip(
            ((x - self._lo) / self.radius).astype(np.int64), 0, self._ncells - 1
        )
        found = []
        for delta in np.ndindex(*(3,) * self.dim):
            cc = coords + (np.array(delta) - 1)
            if np.any(cc < 0) or np.any(cc >= self._ncells):
                continue
            flat = 0
            for c in range(self.dim):
                flat = flat * int(self._ncells[c]) + int(cc[c])
            for j in self.cell_members(flat):
                if j != i and np.sum((self.points[j] - x) ** 2) <= self.radius**2:
                    found.append(int(j))
        return np.array(sorted(found), dtype=np.int64)

    def component_labels(self) -> np.ndarray:
        if self._labels is None:
            self._labels = component_labels_kernel(self.points, self.radius)
        return self._labels


@dataclass(frozen=True)
class ComponentSummary:
    """Component labels plus their size table."""

    labels: np.ndarray
    sizes: np.ndarray  # size of the component each point belongs to
    largest_size: int
    n_components: int

    @classmethod
    def from_graph(cls, graph: GilbertGraph) -> "ComponentSummary":
        labels = graph.component_labels()
        if labels.size == 0:
            return cls(labels, np.empty(0, dtype=np.int64), 0, 0)
        roots, inverse, counts = np.unique(labels, return_inverse=True, return_counts=True)
        return cls(labels, counts[inverse], int(counts.max()), int(roots.size))


def build_graph(points: PointSet | np.ndarray, radius: float) -> GilbertGraph:
    pts = points.points if isinstance(points, PointSet) else points
    return GilbertGraph(pts, radius)


def _check_percolation_window(region: Box, box_side: float, radius: float) -> None:
    need = box_side + 2.0 * radius
    lo_ok = np.all(region.lower <= -0.5 * need + 1e-9)
    hi_ok = np.all(region.upper >= 0.5 * need - 1e-9)
    if not (lo_ok and hi_ok):
        raise InvalidParameterError(
            f"sampling region must contain the centered box of side {need} "
            f"(target side {box_side} padded by the radius {radius})"
        )


def percolates_M(
    nodes: PointSet,
    radius: float,
    box_side: float,
    margin: float = 1.0,
    origin_included: bool = True,
) -> bool:
    """Escape indicator for the origin's cluster in a finite box.

    True iff the cluster containing the origin has a node whose distance to
    the boundary of the origin-centered box of side ``box_side`` is at most
    ``margin``.  With ``origin_included`` the origin is appended as an extra
    vertex; otherwise a node already at the origin is required (no such
    node means False).

    The nodes must have been sampled on a window containing the box padded
    by the connection radius, else boundary effects would bias the event.
    """
    if box_side <= 0:
        raise InvalidParameterError(f"box side must be positive, got {box_side}")
    if margin < 0:
        raise InvalidParameterError(f"margin must be >= 0, got {margin}")
    _check_percolation_window(nodes.region, box_side, radius)
    origin = np.zeros((1, nodes.dim))
    if origin_included:
        pts = np.vstack([origin, nodes.points]) if nodes.n else origin
    else:
        at_origin = np.all(nodes.points == 0.0, axis=1) if nodes.n else np.empty(0, bool)
        if not np.any(at_origin):
            return False
        idx = int(np.argmax(at_origin))
        pts = np.vstack([nodes.points[idx : idx + 1], np.delete(nodes.points, idx, axis=0)])
    return bool(percolation_kernel(np.ascontiguousarray(pts), radius, box_side, margin))


def k_hop_connected(
    source: np.ndarray,
    sinks: PointSet | np.ndarray,
    relays: PointSet | np.ndarray,
    k: int,
    radius: float,
) -> bool:
    """Can the source reach some sink in at most k hops through the relays?

    The graph is the inclusive-radius graph on {source, sink} plus the
    relays; only relays can appear as intermediate vertices.  Relays beyond
    (k-1) hops and sinks beyond k * radius of the source are pre-filtered,
    which cannot change the answer.
    """
    if k < 1:
        raise InvalidParameterError(f"hop budget k must be >= 1, got {k}")
    if radius <= 0:
        raise InvalidParameterError(f"radius must be positive, got {radius}")
    src = np.asarray(source, dtype=np.float64).ravel()
    snk = sinks.points if isinstance(sinks, PointSet) else np.atleast_2d(np.asarray(sinks, dtype=np.float64))
    rel = relays.points if isinstance(relays, PointSet) else np.atleast_2d(np.asarray(relays, dtype=np.float64))
    if snk.size == 0:
        return False
    snk = snk[np.sum((snk - src) ** 2, axis=1) <= (k * radius) ** 2]
    if snk.size == 0:
        return False
    if rel.size:
        rel = rel[np.sum((rel - src) ** 2, axis=1) <= ((k - 1) * radius) ** 2]
    return bool(
        khop_kernel(
            np.ascontiguousarray(src),
            np.ascontiguousarray(rel.reshape(-1, src.size)),
            np.ascontiguousarray(snk),
            int(k),
            float(radius),
        )
    )


def hop_distances_from(graph: GilbertGraph, source: int, max_depth: int | None = None) -> np.ndarray:
    """Hop distances from a vertex to all others; -1 where unreachable."""
    if not 0 <= source < graph.n:
        raise InvalidParameterError(f"source index {source} out of range")
    cap = graph.n if max_depth is None else int(max_depth)
    return bfs_distances_kernel(graph.points, graph.radius, int(source), cap)


def graph_distance(graph: GilbertGraph, i: int, j: int) -> int | None:
    """Minimum hop count between vertices i and j; None if disconnected."""
    if not (0 <= i < graph.n and 0 <= j < graph.n):
        raise InvalidParameterError("vertex index out of range")
    if i == j:
        return 0
    d = hop_distances_from(graph, i)[j]
    return int(d) if d >= 0 else None
