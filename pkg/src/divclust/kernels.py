"""Hot numeric kernels, each with a numba path and a pure-numpy fallback.

The public functions dispatch on :func:`divclust._accel.numba_enabled`.  Both
paths return identical results (distances agree to rounding; integer and
boolean outputs agree exactly); ``tests/test_kernels.py`` cross-checks them
and ``benchmarks/bench_kernels.py`` times them against each other.

Kernels
-------
pairwise_distances
    Full distance matrix from coordinates.
hop_distances
    Truncated breadth-first hop counts (graph powers, metric completion).
subset_tables
    Per-subset radius cost, diameter and rainbow flag for the exact oracle.
partition_dp
    Min-max set-partition dynamic programme over subset masks.
"""
from __future__ import annotations

import numpy as np

from ._accel import njit, numba_enabled

METRIC_CODES = {"euclidean": 0, "manhattan": 1, "chebyshev": 2}

INF = np.inf


# ---------------------------------------------------------------------------
# pairwise distances


def _np_pairwise(points: np.ndarray, code: int) -> np.ndarray:
    diff = np.abs(points[:, None, :] - points[None, :, :])
    if code == 0:
        out = np.sqrt((diff * diff).sum(axis=-1))
    elif code == 1:
        out = diff.sum(axis=-1)
    else:
        out = diff.max(axis=-1) if points.shape[1] else np.zeros(diff.shape[:2])
    np.fill_diagonal(out, 0.0)
    return out


@njit
def _nb_pairwise(points, code):
    n, dim = points.shape
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for t in range(dim):
                x = abs(points[i, t] - points[j, t])
                if code == 0:
                    acc += x * x
                elif code == 1:
                    acc += x
                elif x > acc:
                    acc = x
            if code == 0:
                acc = np.sqrt(acc)
            out[i, j] = acc
            out[j, i] = acc
    return out


def pairwise_distances(points: np.ndarray, metric: str = "euclidean") -> np.ndarray:
    """Symmetric ``(n, n)`` distance matrix with a zero diagonal."""
    code = METRIC_CODES[metric]
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if numba_enabled():
        return _nb_pairwise(pts, code)
    return _np_pairwise(pts, code)


# ---------------------------------------------------------------------------
# truncated BFS hop distances


def _np_hops(indptr, indices, sources, max_depth):
    n = len(indptr) - 1
    m = len(sources)
    adj = np.zeros((n, n), dtype=np.float64)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    adj[rows, indices] = 1.0
    dist = np.full((m, n), -1, dtype=np.int64)
    frontier = np.zeros((m, n), dtype=bool)
    frontier[np.arange(m), sources] = True
    reached = frontier.copy()
    dist[frontier] = 0
    depth = 0
    while frontier.any() and depth < max_depth:
        depth += 1
        nxt = (frontier.astype(np.float64) @ adj > 0.0) & ~reached
        dist[nxt] = depth
        reached |= nxt
        frontier = nxt
    return dist


@njit
def _nb_hops(indptr, indices, sources, max_depth):
    n = len(indptr) - 1
    m = len(sources)
    dist = np.full((m, n), -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for r in range(m):
        src = sources[r]
        dist[r, src] = 0
        queue[0] = src
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[r, v]
            if dv >= max_depth:
                continue
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if dist[r, u] < 0:
                    dist[r, u] = dv + 1
                    queue[tail] = u
                    tail += 1
    return dist


def hop_distances(indptr, indices, sources=None, max_depth: int | None = None) -> np.ndarray:
    """Hop counts from each source, ``-1`` where unreachable within ``max_depth``.

    The graph is given in CSR form (``indptr``, ``indices``).  Row ``r`` of the
    result holds distances from ``sources[r]`` (all vertices by default).
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    n = len(indptr) - 1
    if sources is None:
        sources = np.arange(n, dtype=np.int64)
    else:
        sources = np.ascontiguousarray(sources, dtype=np.int64)
    depth = n if max_depth is None else int(max_depth)
    if numba_enabled():
        return _nb_hops(indptr, indices, sources, depth)
    return _np_hops(indptr, indices, sources, depth)


# ---------------------------------------------------------------------------
# subset tables for the exact oracle


def _np_subset_tables(dist, colors):
    n = dist.shape[0]
    size = 1 << n
    # far[c, mask] = max distance from point c to any point of mask
    far = np.zeros((n, size))
    diam = np.zeros(size)
    cmask = np.zeros(size, dtype=np.int64)
    rainbow = np.ones(size, dtype=bool)
    for i in range(n):
        lo, hi = 1 << i, 1 << (i + 1)
        far[:, lo:hi] = np.maximum(far[:, :lo], dist[:, i][:, None])
        diam[lo:hi] = np.maximum(diam[:lo], far[i, :lo])
        bit = np.int64(1) << np.int64(colors[i])
        prev = cmask[:lo]
        cmask[lo:hi] = prev | bit
        rainbow[lo:hi] = rainbow[:lo] & ((prev & bit) == 0)
    members = ((np.arange(size)[None, :] >> np.arange(n)[:, None]) & 1).astype(bool)
    radius = np.where(members, far, INF).min(axis=0)
    radius[0] = 0.0
    return radius, diam, rainbow


@njit
def _nb_subset_tables(dist, colors):
    n = dist.shape[0]
    size = 1 << n
    far = np.zeros((n, size))
    diam = np.zeros(size)
    cmask = np.zeros(size, dtype=np.int64)
    rainbow = np.ones(size, dtype=np.bool_)
    radius = np.zeros(size)
    for mask in range(1, size):
        top = 0
        while (mask >> (top + 1)) != 0:
            top += 1
        prev = mask ^ (1 << top)
        for c in range(n):
            far[c, mask] = max(far[c, prev], dist[c, top])
        diam[mask] = max(diam[prev], far[top, prev])
        bit = np.int64(1) << np.int64(colors[top])
        cmask[mask] = cmask[prev] | bit
        rainbow[mask] = rainbow[prev] and (cmask[prev] & bit) == 0
        best = INF
        for c in range(n):
            if (mask >> c) & 1 and far[c, mask] < best:
                best = far[c, mask]
        radius[mask] = best
    return radius, diam, rainbow


def subset_tables(dist: np.ndarray, colors: np.ndarray):
    """Per-mask ``(radius, diameter, rainbow)`` tables over all ``2**n`` subsets.

    ``radius[mask]`` is the best point-center radius of the subset (center
    drawn from the subset), ``diameter[mask]`` its largest pairwise distance
    and ``rainbow[mask]`` whether its colors are pairwise distinct.
    """
    dist = np.ascontiguousarray(dist, dtype=np.float64)
    colors = np.ascontiguousarray(colors, dtype=np.int64)
    if numba_enabled():
        return _nb_subset_tables(dist, colors)
    return _np_subset_tables(dist, colors)


# ---------------------------------------------------------------------------
# min-max set partition


def _lowbit(x):
    return x & -x


def _np_partition_dp(cost, valid, n):
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    dp = np.full(size, INF)
    dp[0] = 0.0
    pop = np.zeros(size, dtype=np.int64)
    for i in range(n):
        pop += (masks >> i) & 1
    low = _lowbit(masks)
    parts = masks[valid & (masks > 0)]
    chunk = 1 << 20
    # dp of a mask only depends on masks with fewer points, so fill by popcount layer
    for k in range(1, n + 1):
        in_layer = pop == k
        for b in range(n):
            rows = masks[in_layer & (low == (1 << b))]
            cand = parts[(low[parts] == (1 << b)) & (pop[parts] <= k)]
            if rows.size == 0 or cand.size == 0:
                continue
            ccost = cost[cand]
            step = max(1, chunk // cand.size)
            for start in range(0, rows.size, step):
                m = rows[start:start + step]
                inside = (m[:, None] & cand[None, :]) == cand[None, :]
                val = np.maximum(dp[m[:, None] ^ cand[None, :]], ccost[None, :])
                dp[m] = np.where(inside, val, INF).min(axis=1)
    return dp


@njit
def _nb_partition_dp(cost, valid, n):
    size = 1 << n
    dp = np.full(size, INF)
    dp[0] = 0.0
    for mask in range(1, size):
        low = mask & -mask
        rest = mask ^ low
        best = INF
        sub = rest
        while True:
            s = sub | low
            if valid[s]:
                other = dp[mask ^ s]
                v = cost[s] if cost[s] > other else other
                if v < best:
                    best = v
            if sub == 0:
                break
            sub = (sub - 1) & rest
        dp[mask] = best
    return dp


def partition_dp(cost: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """``dp[mask]`` = min over partitions of ``mask`` into valid parts of the max part cost.

    ``inf`` marks masks with no valid partition; ``dp[0] == 0``.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    valid = np.ascontiguousarray(valid, dtype=np.bool_)
    n = int(cost.shape[0]).bit_length() - 1
    if cost.shape[0] != 1 << n:
        raise ValueError("cost table length must be a power of two")
    if numba_enabled():
        return _nb_partition_dp(cost, valid, n)
    return _np_partition_dp(cost, valid, n)
