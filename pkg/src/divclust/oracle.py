"""Exponential-time exact solvers used as ground truth on tiny instances."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .diversity import check_feasible, infeasibility_message, resolve_l
from .errors import InfeasibleInstance, TooLarge
from .instance import Cluster, Clustering, Instance
from .outliers import plan_from_counts

MAX_N = 14
MAX_N_OUTLIERS = 12


@dataclass(frozen=True)
class OracleResult:
    """Radius-optimal clustering plus the optimal radius and optimal diameter.

    The two optima are taken over all valid partitions independently; the
    clustering realises ``radius``.
    """

    clustering: Clustering
    radius: float
    diameter: float


def _popcount_table(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pop += (masks >> i) & 1
    return pop


def _reconstruct(mask: int, dp: np.ndarray, cost: np.ndarray, valid: np.ndarray) -> list[int]:
    parts = []
    while mask:
        low = mask & -mask
        rest = mask ^ low
        sub = rest
        while True:
            s = sub | low
            if valid[s] and max(cost[s], dp[mask ^ s]) == dp[mask]:
                break
            if sub == 0:
                raise AssertionError("partition table is inconsistent")
            sub = (sub - 1) & rest
        parts.append(s)
        mask ^= s
    return parts


def _members(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def optimal_partition(dist: np.ndarray, colors: np.ndarray, l: int) -> tuple[float, float, list[Cluster]] | None:
    """``(r*, d*, clusters)`` for the points of ``dist``, or ``None`` if no valid partition exists."""
    n = dist.shape[0]
    if n == 0:
        return 0.0, 0.0, []
    radius, diameter, rainbow = kernels.subset_tables(dist, colors)
    valid = rainbow & (_popcount_table(n) >= l)
    valid[0] = False
    full = (1 << n) - 1
    dp_r = kernels.partition_dp(radius, valid)
    if not np.isfinite(dp_r[full]):
        return None
    dp_d = kernels.partition_dp(diameter, valid)
    clusters = []
    for part in _reconstruct(full, dp_r, radius, valid):
        idx = _members(part)
        far = dist[np.ix_(idx, idx)].max(axis=1)
        center = idx[int(np.argmin(far))]
        clusters.append(Cluster(center, idx))
    clusters.sort(key=lambda c: c.center)
    return float(dp_r[full]), float(dp_d[full]), clusters


def exact_solve(inst: Instance, l: int | None = None) -> OracleResult:
    """Optimal min-max-radius clustering by subset dynamic programming (``n <= 14``)."""
    l = resolve_l(inst, l)
    if inst.n > MAX_N:
        raise TooLarge(f"oracle limited to n <= {MAX_N}, got {inst.n}")
    if not check_feasible(inst, l):
        raise InfeasibleInstance(infeasibility_message(inst, l))
    res = optimal_partition(np.asarray(inst.dist), inst.colors, l)
    assert res is not None  # feasibility guarantees a partition
    r, d, clusters = res
    return OracleResult(Clustering(tuple(clusters), threshold=r), r, d)


def _outlier_sets(inst: Instance, l: int, q: int):
    plan = plan_from_counts(inst.color_counts(), l)
    if q == plan.q:
        # every optimal residual drops exactly |C| - p points of each popular color
        per_color = []
        for c in sorted(plan.popular_colors):
            pts = np.flatnonzero(inst.colors == c).tolist()
            per_color.append(itertools.combinations(pts, plan.per_color_outliers[c]))
        for combo in itertools.product(*per_color):
            yield tuple(sorted(itertools.chain.from_iterable(combo)))
    else:
        yield from itertools.combinations(range(inst.n), q)


def exact_solve_outliers(inst: Instance, l: int | None = None, q: int | None = None) -> OracleResult:
    """Best clustering after dropping exactly ``q`` points (default: the minimum).

    Enumerates outlier sets and solves each residual exactly; ``n <= 12``.
    """
    l = resolve_l(inst, l)
    if inst.n > MAX_N_OUTLIERS:
        raise TooLarge(f"outlier oracle limited to n <= {MAX_N_OUTLIERS}, got {inst.n}")
    if q is None:
        q = plan_from_counts(inst.color_counts(), l).q
    if not 0 <= q <= inst.n:
        raise ValueError("q must lie in [0, n]")
    dist = np.asarray(inst.dist)
    best_r, best_d, best = np.inf, np.inf, None
    for dropped in _outlier_sets(inst, l, q):
        keep = [v for v in range(inst.n) if v not in set(dropped)]
        counts = np.bincount(inst.colors[keep]) if keep else np.zeros(1, dtype=np.int64)
        if keep and counts.max() > len(keep) // l:
            continue
        res = optimal_partition(dist[np.ix_(keep, keep)], inst.colors[keep], l)
        if res is None:
            continue
        r, d, clusters = res
        best_d = min(best_d, d)
        if r < best_r:
            mapped = tuple(Cluster(keep[c.center], [keep[m] for m in c.members]) for c in clusters)
            best_r, best = r, Clustering(mapped, dropped, r, {"q": q})
    if best is None:
        raise InfeasibleInstance(f"no feasible residual after dropping {q} points")
    return OracleResult(best, float(best_r), float(best_d))
