"""Exact solver for two colors: bottleneck perfect matching between the color classes."""
from __future__ import annotations

import numpy as np

from .errors import ExhaustedThresholds, InfeasibleInstance, MoreThanTwoColors, UnequalClassSizes
from .instance import Cluster, Clustering, Instance, sorted_edge_weights
from .matching import Bipartite, max_matching


def solve_two_color(inst: Instance, l: int | None = None) -> Clustering:
    """Optimal clustering of a two-color instance with ``l = 2``.

    Every cluster is one point of each color, so an optimal clustering is a
    perfect matching between the classes minimising its longest edge.  The
    matching found at one threshold seeds the next.
    """
    if l is None:
        l = inst.l if inst.l is not None else 2
    palette = np.unique(inst.colors)
    if palette.size > 2:
        raise MoreThanTwoColors(f"instance has {palette.size} colors")
    if l > 2:
        raise InfeasibleInstance(f"no cluster of {l} distinct colors exists with two colors")
    if l != 2:
        raise ValueError("the two-color solver handles l = 2 only")
    a = np.flatnonzero(inst.colors == palette[0]).tolist()
    b = np.flatnonzero(inst.colors == palette[-1]).tolist() if palette.size == 2 else []
    if len(a) != len(b):
        raise UnequalClassSizes(f"color classes have {len(a)} and {len(b)} points")

    sub = inst.dist[np.ix_(a, b)]
    matching: dict = {}
    for w in sorted_edge_weights(inst):
        rows, cols = np.nonzero(sub <= w)
        edges = tuple((a[i], b[j]) for i, j in zip(rows.tolist(), cols.tolist()))
        matching = max_matching(Bipartite(tuple(a), tuple(b), edges), matching)
        if len(matching) == len(a):
            clusters = sorted((Cluster(min(u, v), (u, v)) for u, v in matching.items()), key=lambda c: c.center)
            return Clustering(tuple(clusters), threshold=w)
    raise ExhaustedThresholds("complete bipartite graph has no perfect matching")
