"""Numba kernels for cell-indexed geometric graphs.

All kernels share the same layout: points are binned into a uniform grid of
cells with side equal to the connection radius, sorted by flat cell id via a
counting sort, and adjacency is enumerated by scanning the 3^d neighboring
cells of a point.  No explicit edge list is ever materialized.  Kernels are
single-threaded and deterministic; parallelism lives one level up, across
replications.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "cell_sort",
    "component_labels_kernel",
    "percolation_kernel",
    "khop_kernel",
    "bfs_distances_kernel",
    "crw_advance_kernel",
]


@njit(cache=True)
def _grid_geometry(points, radius):
    n, d = points.shape
    lo = np.empty(d, np.float64)
    ncells = np.empty(d, np.int64)
    for c in range(d):
        mn = points[0, c]
        mx = points[0, c]
        for i in range(1, n):
            v = points[i, c]
            if v < mn:
                mn = v
            if v > mx:
                mx = v
        lo[c] = mn
        span = mx - mn
        k = int(span / radius) + 1
        if k < 1:
            k = 1
        ncells[c] = k
    return lo, ncells


@njit(cache=True)
def _flat_cell(points, i, radius, lo, ncells):
    d = points.shape[1]
    idx = 0
    for c in range(d):
        cc = int((points[i, c] - lo[c]) / radius)
        if cc < 0:
            cc = 0
        if cc >= ncells[c]:
            cc = ncells[c] - 1
        idx = idx * ncells[c] + cc
    return idx


@njit(cache=True)
def cell_sort(points, radius, lo, ncells):
    """Counting sort by flat cell id.

    Returns (cell_id, order, starts): points of cell q sit at
    order[starts[q]:starts[q+1]].
    """
    n, d = points.shape
    total = 1
    for c in range(d):
        total *= ncells[c]
    cell_id = np.empty(n, np.int64)
    for i in range(n):
        cell_id[i] = _flat_cell(points, i, radius, lo, ncells)
    starts = np.zeros(total + 1, np.int64)
    for i in range(n):
        starts[cell_id[i] + 1] += 1
    for q in range(total):
        starts[q + 1] += starts[q]
    order = np.empty(n, np.int64)
    fill = starts[:-1].copy()
    for i in range(n):
        q = cell_id[i]
        order[fill[q]] = i
        fill[q] += 1
    return cell_id, order, starts


@njit(cache=True)
def _uf_find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:  # path compression
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@njit(cache=True)
def _union_all(points, radius, lo, ncells, order, starts):
    """Union-find forest over all pairs within the connection radius."""
    n, d = points.shape
    parent = np.arange(n)
    size = np.ones(n, np.int64)
    r2 = radius * radius
    coords = np.empty(d, np.int64)
    deltas = np.empty(d, np.int64)
    for i in range(n):
        for c in range(d):
            cc = int((points[i, c] - lo[c]) / radius)
            if cc < 0:
                cc = 0
            if cc >= ncells[c]:
                cc = ncells[c] - 1
            coords[c] = cc
        # odometer over the 3^d neighbor offsets
        for c in range(d):
            deltas[c] = -1
        while True:
            ok = True
            flat = 0
            for c in range(d):
                cc = coords[c] + deltas[c]
                if cc < 0 or cc >= ncells[c]:
                    ok = False
                    break
                flat = flat * ncells[c] + cc
            if ok:
                for s in range(starts[flat], starts[flat + 1]):
                    j = order[s]
                    if j >= i:  # each unordered pair once
                        continue
                    d2 = 0.0
                    for c in range(d):
                        diff = points[i, c] - points[j, c]
                        d2 += diff * diff
                    if d2 <= r2:
                        ri = _uf_find(parent, i)
                        rj = _uf_find(parent, j)
                        if ri != rj:
                            if size[ri] < size[rj]:  # union by size
                                ri, rj = rj, ri
                            parent[rj] = ri
                            size[ri] += size[rj]
            # advance odometer
            pos = d - 1
            while pos >= 0:
                deltas[pos] += 1
                if deltas[pos] <= 1:
                    break
                deltas[pos] = -1
                pos -= 1
            if pos < 0:
                break
    return parent


@njit(cache=True)
def component_labels_kernel(points, radius):
    """Component root label per point (labels are representative indices)."""
    n = points.shape[0]
    if n == 0:
        return np.empty(0, np.int64)
    lo, ncells = _grid_geometry(points, radius)
    _, order, starts = cell_sort(points, radius, lo, ncells)
    parent = _union_all(points, radius, lo, ncells, order, starts)
    labels = np.empty(n, np.int64)
    for i in range(n):
        labels[i] = _uf_find(parent, i)
    return labels


@njit(cache=True)
def percolation_kernel(points, radius, box_side, margin):
    """Does the cluster of points[0] reach within margin of the side-box_side
    boundary (box centered at the origin)?"""
    n, d = points.shape
    if n == 0:
        return False
    lo, ncells = _grid_geometry(points, radius)
    _, order, starts = cell_sort(points, radius, lo, ncells)
    parent = _union_all(points, radius, lo, ncells, order, starts)
    root0 = _uf_find(parent, 0)
    half = 0.5 * box_side
    for i in range(n):
        if _uf_find(parent, i) != root0:
            continue
        maxdev = 0.0
        out2 = 0.0
        for c in range(d):
            dev = abs(points[i, c])
            if dev > maxdev:
                maxdev = dev
            over = dev - half
            if over > 0.0:
                out2 += over * over
        dist = half - maxdev if maxdev <= half else np.sqrt(out2)
        if dist <= margin:
            return True
    return False


@njit(cache=True)
def khop_kernel(source, relays, sinks, k, radius):
    """Is some sink within k hops of source, relaying only through relays?

    Hop counts: source-sink direct contact is 1 hop; a sink adjacent to a
    relay at BFS depth q costs q + 1 hops.  Depth is capped at k - 1, so
    relays further than (k-1) hops never matter.
    """
    m = relays.shape[0]
    d = source.shape[0]
    r2 = radius * radius
    if k < 1:
        return False
    # sinks directly in contact with the source
    for t in range(sinks.shape[0]):
        d2 = 0.0
        for c in range(d):
            diff = sinks[t, c] - source[c]
            d2 += diff * diff
        if d2 <= r2:
            return True
    if m == 0 or k == 1 or sinks.shape[0] == 0:
        return False
    lo, ncells = _grid_geometry(relays, radius)
    _, order, starts = cell_sort(relays, radius, lo, ncells)
    depth = np.full(m, -1, np.int64)
    queue = np.empty(m, np.int64)
    head = 0
    tail = 0
    coords = np.empty(d, np.int64)
    deltas = np.empty(d, np.int64)
    # seed: relays adjacent to the source get depth 1
    for c in range(d):
        cc = int((source[c] - lo[c]) / radius)
        if cc < 0:
            cc = 0
        if cc >= ncells[c]:
            cc = ncells[c] - 1
        coords[c] = cc
    for c in range(d):
        deltas[c] = -1
    while True:
        ok = True
        flat = 0
        for c in range(d):
            cc = coords[c] + deltas[c]
            if cc < 0 or cc >= ncells[c]:
                ok = False
                break
            flat = flat * ncells[c] + cc
        if ok:
            for s in range(starts[flat], starts[flat + 1]):
                j = order[s]
                d2 = 0.0
                for c in range(d):
                    diff = relays[j, c] - source[c]
                    d2 += diff * diff
                if d2 <= r2 and depth[j] < 0:
                    depth[j] = 1
                    # sink contact from depth 1 costs 2 hops
                    if k >= 2:
                        for t in range(sinks.shape[0]):
                            s2 = 0.0
                            for c in range(d):
                                diff = sinks[t, c] - relays[j, c]
                                s2 += diff * diff
                            if s2 <= r2:
                                return True
                    if 1 < k - 1:
                        queue[tail] = j
                        tail += 1
        pos = d - 1
        while pos >= 0:
            deltas[pos] += 1
            if deltas[pos] <= 1:
                break
            deltas[pos] = -1
            pos -= 1
        if pos < 0:
            break
    while head < tail:
        v = queue[head]
        head += 1
        newdepth = depth[v] + 1  # <= k - 1 by the push guard
        for c in range(d):
            cc = int((relays[v, c] - lo[c]) / radius)
            if cc < 0:
                cc = 0
            if cc >= ncells[c]:
                cc = ncells[c] - 1
            coords[c] = cc
        for c in range(d):
            deltas[c] = -1
        while True:
            ok = True
            flat = 0
            for c in range(d):
                cc = coords[c] + deltas[c]
                if cc < 0 or cc >= ncells[c]:
                    ok = False
                    break
                flat = flat * ncells[c] + cc
            if ok:
                for s in range(starts[flat], starts[flat + 1]):
                    j = order[s]
                    if depth[j] >= 0:
                        continue
                    d2 = 0.0
                    for c in range(d):
                        diff = relays[j, c] - relays[v, c]
                        d2 += diff * diff
                    if d2 <= r2:
                        depth[j] = newdepth
                        for t in range(sinks.shape[0]):
                            s2 = 0.0
                            for c in range(d):
                                diff = sinks[t, c] - relays[j, c]
                                s2 += diff * diff
                            if s2 <= r2:
                                return True
                        if newdepth < k - 1:
                            queue[tail] = j
                            tail += 1
            pos = d - 1
            while pos >= 0:
                deltas[pos] += 1
                if deltas[pos] <= 1:
                    break
                deltas[pos] = -1
                pos -= 1
            if pos < 0:
                break
    return False


@njit(cache=True)
def bfs_distances_kernel(points, radius, source, max_depth):
    """Hop distance from points[source] to every point; -1 if unreached
    within max_depth."""
    n, d = points.shape
    dist = np.full(n, -1, np.int64)
    if n == 0:
        return dist
    lo, ncells = _grid_geometry(points, radius)
    _, order, starts = cell_sort(points, radius, lo, ncells)
    r2 = radius * radius
    queue = np.empty(n, np.int64)
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    coords = np.empty(d, np.int64)
    deltas = np.empty(d, np.int64)
    while head < tail:
        v = queue[head]
        head += 1
        if dist[v] >= max_depth:
            continue
        newdepth = dist[v] + 1
        for c in range(d):
            cc = int((points[v, c] - lo[c]) / radius)
            if cc < 0:
                cc = 0
            if cc >= ncells[c]:
                cc = ncells[c] - 1
            coords[c] = cc
        for c in range(d):
            deltas[c] = -1
        while True:
            ok = True
            flat = 0
            for c in range(d):
                cc = coords[c] + deltas[c]
                if cc < 0 or cc >= ncells[c]:
                    ok = False
                    break
                flat = flat * ncells[c] + cc
            if ok:
                for s in range(starts[flat], starts[flat + 1]):
                    j = order[s]
                    if dist[j] >= 0:
                        continue
                    d2 = 0.0
                    for c in range(d):
                        diff = points[j, c] - points[v, c]
                        d2 += diff * diff
                    if d2 <= r2:
                        dist[j] = newdepth
                        queue[tail] = j
                        tail += 1
            pos = d - 1
            while pos >= 0:
                deltas[pos] += 1
                if deltas[pos] <= 1:
                    break
                deltas[pos] = -1
                pos -= 1
            if pos < 0:
                break
    return dist

@njit(cache=True)
def crw_advance_kernel(positions, rate, dt, r_min, r_max, gen):
    """Advance every walker by its jumps in a window of length dt, in place.

    Each walker jumps a Poisson(rate * dt) number of times; a jump picks a
    uniform direction (rejection in the unit ball) and a uniform radius in
    [r_min, r_max].  The jump-count-then-jumps order makes the draw
    sequence a pure function of the generator state.
    """
    n, d = positions.shape
    u = np.empty(d, np.float64)
    for i in range(n):
        m = gen.poisson(rate * dt)
        for _ in range(m):
            while True:
                s = 0.0
                for c in range(d):
                    u[c] = 2.0 * gen.random() - 1.0
                    s += u[c] * u[c]
                if 1e-12 < s <= 1.0:
                    break
            step = (r_min + (r_max - r_min) * gen.random()) / np.sqrt(s)
            for c in range(d):
                positions[i, c] += u[c] * step
