"""2-approximation for diversity-constrained min-max-radius clustering.

For each candidate threshold ``w`` (distinct bichromatic distances, ascending)
the solver looks for a maximal independent set ``I`` of the threshold graph
``G_w`` that can serve as the centers of a valid spanning star forest: every
star polychromatic with at least ``l`` points.  ``I`` starts greedy and is
grown by Hall violators until both the flow test and the matching test pass,
or the flow test fails and the threshold is rejected.
"""
from __future__ import annotations

import bisect
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass

import numpy as np

from .errors import ExhaustedThresholds, InfeasibleInstance, InvariantViolation
from .flow import FlowNetwork, feasible_flow_with_lower_bounds
from .instance import (
    Cluster,
    Clustering,
    Instance,
    ThresholdGraph,
    singleton_clustering,
    sorted_edge_weights,
    threshold_graph,
)
from .matching import Bipartite, Violator, max_matching, saturating_or_violator


@dataclass(frozen=True)
class SolverState:
    threshold: float
    centers: frozenset[int]
    iteration: int = 0


@dataclass(frozen=True)
class SemiValidAssignment:
    """Point-to-center assignment found by the flow test.

    ``primary[c]`` are the points routed through a per-color slot of center
    ``c`` (pairwise distinct colors, at least ``l`` of them); ``overflow[c]``
    are the remaining points absorbed by that center.
    """

    centers: tuple[int, ...]
    primary: Mapping[int, tuple[int, ...]]
    overflow: Mapping[int, tuple[int, ...]]

    def stars(self) -> dict[int, tuple[int, ...]]:
        return {c: tuple(sorted(self.primary[c] + self.overflow[c])) for c in self.centers}


@dataclass(frozen=True)
class MTestPass:
    matchings: Mapping[int, dict]  # color -> {center: point}


@dataclass(frozen=True)
class MTestFail:
    color: int
    S: frozenset[int]
    NS: frozenset[int]


# ---------------------------------------------------------------------------
# independent sets


def is_independent(g: ThresholdGraph, I: Iterable[int]) -> bool:
    idx = sorted(I)
    return not g.matrix[np.ix_(idx, idx)].any()


def is_maximal_independent(g: ThresholdGraph, I: Iterable[int]) -> bool:
    idx = sorted(I)
    if not is_independent(g, idx):
        return False
    covered = np.zeros(g.n, dtype=bool)
    covered[idx] = True
    if idx:
        covered |= g.matrix[idx].any(axis=0)
    return bool(covered.all())


def extend_to_maximal(g: ThresholdGraph, I: Iterable[int]) -> frozenset[int]:
    """Add points in ascending id order until ``I`` is maximal independent."""
    chosen = set(I)
    blocked = np.zeros(g.n, dtype=bool)
    for v in chosen:
        blocked[v] = True
        blocked[list(g.neighbors(v))] = True
    for v in range(g.n):
        if not blocked[v]:
            chosen.add(v)
            blocked[v] = True
            blocked[list(g.neighbors(v))] = True
    return frozenset(chosen)


def _check_state(g: ThresholdGraph, I: frozenset[int]) -> None:
    if not is_maximal_independent(g, I):
        raise InvariantViolation(f"center set {sorted(I)} is not maximal independent at w={g.threshold}")


# ---------------------------------------------------------------------------
# tests


def _closed_neighborhood(g: ThresholdGraph, c: int) -> list[int]:
    return sorted((c, *g.neighbors(c)))


def f_test(g: ThresholdGraph, I: Iterable[int], l: int) -> SemiValidAssignment | None:
    """Flow test: is there a semi-valid spanning star forest centred on ``I``?

    Network: ``s -> v`` (capacity 1) for every point; per center ``o`` and
    color ``c`` a slot ``p[o, c] -> o`` (capacity 1) fed by every point of
    color ``c`` in the closed neighbourhood of ``o``; ``o -> t`` with lower
    bound ``l``; an overflow node ``o'`` fed by the same points, draining to
    ``t`` without limit.  The test passes iff ``n`` units can flow.
    """
    inst = g.instance
    centers = tuple(sorted(I))
    n = inst.n
    net = FlowNetwork()
    s, t = net.add_node(), net.add_node()
    point_node = list(net.add_nodes(n))
    for v in range(n):
        net.add_arc(s, point_node[v], 0, 1)
    routes: dict[int, tuple[int, str, int]] = {}  # arc id -> (point, kind, center)
    for o in centers:
        o_node, o_over = net.add_node(), net.add_node()
        net.add_arc(o_node, t, lower=l)
        net.add_arc(o_over, t)
        slots: dict[int, int] = {}
        for v in _closed_neighborhood(g, o):
            c = int(inst.colors[v])
            if c not in slots:
                slots[c] = net.add_node()
                net.add_arc(slots[c], o_node, 0, 1)
            routes[net.add_arc(point_node[v], slots[c])] = (v, "primary", o)
            routes[net.add_arc(point_node[v], o_over)] = (v, "overflow", o)
    flow = feasible_flow_with_lower_bounds(net, s, t, demand=n)
    if flow is None:
        return None
    primary = {o: [] for o in centers}
    overflow = {o: [] for o in centers}
    for arc, (v, kind, o) in routes.items():
        if flow.values[arc]:
            (primary if kind == "primary" else overflow)[o].append(v)
    return SemiValidAssignment(
        centers,
        {o: tuple(sorted(vs)) for o, vs in primary.items()},
        {o: tuple(sorted(vs)) for o, vs in overflow.items()},
    )


def color_bipartite(g: ThresholdGraph, I: Iterable[int], color: int) -> Bipartite:
    """``B(I - C, C - I)`` for color class ``C`` with the edges of ``g`` between the sides."""
    colors = g.instance.colors
    I = set(I)
    left = tuple(sorted(o for o in I if colors[o] != color))
    right = tuple(sorted(v for v in np.flatnonzero(colors == color).tolist() if v not in I))
    rset = set(right)
    edges = tuple((o, v) for o in left for v in g.neighbors(o) if v in rset)
    return Bipartite(left, right, edges)


def m_test(g: ThresholdGraph, I: Iterable[int]) -> MTestPass | MTestFail:
    """Matching test: can every non-center of each color get its own center?

    Colors are checked in ascending id order; the first Hall violator wins.
    """
    I = frozenset(I)
    matchings = {}
    for color in np.unique(g.instance.colors).tolist():
        res = saturating_or_violator(color_bipartite(g, I, color))
        if isinstance(res, Violator):
            return MTestFail(color, res.S, res.NS)
        matchings[color] = res.matching
    return MTestPass(matchings)


def augment_is(g: ThresholdGraph, state: SolverState, S: Iterable[int], NS: Iterable[int]) -> SolverState:
    """Swap ``NS`` out for ``S`` and re-extend to a maximal independent set."""
    S, NS = frozenset(S), frozenset(NS)
    grown = extend_to_maximal(g, (state.centers - NS) | S)
    if len(grown) <= len(state.centers):
        raise InvariantViolation("augmentation did not grow the center set")
    return SolverState(state.threshold, grown, state.iteration + 1)


# ---------------------------------------------------------------------------
# extraction


def _prune(inst: Instance, center: int, members: Iterable[int]) -> list[int]:
    # minimal leaf deletion: keep the center, then the lowest id of each other color
    kept, seen = [center], {int(inst.colors[center])}
    for v in sorted(members):
        c = int(inst.colors[v])
        if v != center and c not in seen:
            kept.append(v)
            seen.add(c)
    return kept


def extract_valid_forest(
    g: ThresholdGraph, I: Iterable[int], semi: SemiValidAssignment, l: int
) -> Clustering:
    """Turn a semi-valid forest into a valid spanning one.

    Duplicate colors are pruned from each star, then, color by color, a
    maximum matching warm-started from the pruned stars reassigns every
    non-center point; warm-started centers stay matched, so no star loses a
    color slot.
    """
    inst = g.instance
    centers = frozenset(I)
    stars = {o: _prune(inst, o, members) for o, members in semi.stars().items()}
    owner = {v: o for o, members in stars.items() for v in members if v != o}
    final = {o: [o] for o in centers}
    for color in np.unique(inst.colors).tolist():
        b = color_bipartite(g, centers, color)
        initial = {owner[v]: v for v in b.right if v in owner}
        m = max_matching(b, initial)
        if len(m) != len(b.right):
            raise InvariantViolation(f"color {color}: matching does not cover all non-centers")
        for o, v in m.items():
            final[o].append(v)
    clusters = []
    for o in sorted(final):
        members = final[o]
        if len(members) < l or len({int(inst.colors[v]) for v in members}) != len(members):
            raise InvariantViolation(f"star at {o} is not valid after extraction")
        clusters.append(Cluster(o, members))
    return Clustering(tuple(clusters), threshold=g.threshold)


# ---------------------------------------------------------------------------
# drivers


def solve_threshold(
    g: ThresholdGraph, l: int, trace: Callable[[SolverState], None] | None = None
) -> Clustering | None:
    """Run the center-set search at one threshold; ``None`` rejects the threshold."""
    n = g.n
    state = SolverState(g.threshold, extend_to_maximal(g, ()), 0)
    while True:
        _check_state(g, state.centers)
        if trace is not None:
            trace(state)
        if state.iteration > n:
            raise InvariantViolation("more than n augmentations at one threshold")
        semi = f_test(g, state.centers, l)
        if semi is None:
            return None
        res = m_test(g, state.centers)
        if isinstance(res, MTestPass):
            return extract_valid_forest(g, state.centers, semi, l)
        state = augment_is(g, state, res.S, res.NS)


def check_feasible(inst: Instance, l: int | None = None) -> bool:
    """True iff every color class has at most ``floor(n / l)`` points."""
    l = resolve_l(inst, l)
    return int(inst.color_counts().max()) <= inst.n // l


def resolve_l(inst: Instance, l: int | None) -> int:
    if l is None:
        l = inst.l
    if l is None:
        raise ValueError("cluster size bound l not given and not stored on the instance")
    if isinstance(l, bool) or int(l) != l or l <= 0:
        raise ValueError(f"l must be a positive integer, got {l!r}")
    return int(l)


def infeasibility_message(inst: Instance, l: int) -> str:
    counts = inst.color_counts()
    c = int(np.argmax(counts))
    return (
        f"infeasible: color {inst.color_label(c)!r} has {int(counts[c])} points, "
        f"more than floor(n/l) = floor({inst.n}/{l}) = {inst.n // l}"
    )


def degree_lower_bound(inst: Instance, weights: list[float]) -> int:
    """Index of the first threshold at which every point has a bichromatic neighbour.

    Below it some point is isolated in ``G_w`` and cannot join any star of
    size ``l >= 2``, so the threshold would be rejected anyway.
    """
    d = np.where(inst.colors[:, None] != inst.colors[None, :], inst.dist, np.inf)
    need = float(d.min(axis=1).max())
    return bisect.bisect_left(weights, need)


def solve(
    inst: Instance, l: int | None = None, trace: Callable[[SolverState], None] | None = None
) -> Clustering:
    """Valid clustering with max radius at most the optimal diameter (so at most twice the optimal radius)."""
    l = resolve_l(inst, l)
    if not check_feasible(inst, l):
        raise InfeasibleInstance(infeasibility_message(inst, l))
    if l == 1:
        return singleton_clustering(inst)
    weights = sorted_edge_weights(inst)
    for w in weights[degree_lower_bound(inst, weights):]:
        result = solve_threshold(threshold_graph(inst, w), l, trace)
        if result is not None:
            return result
    raise ExhaustedThresholds(f"no threshold accepted (n={inst.n}, l={l})")
