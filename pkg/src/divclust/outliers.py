"""Constant-factor approximation for diversity clustering with the minimum number of outliers.

The cluster count ``p`` and outlier count ``q`` depend only on the color
counts.  Per threshold ``w`` the pipeline is:

1. reject if a component of ``G_w`` restricted to unpopular points is too small;
2. grow metric balls of radius ``w`` over the unpopular points (big first);
3. shrink balls into nodes of a graph ``D_w``;
4. per component, build a spanning tree of ``D_w**3`` with small nodes as
   leaves and order its big nodes along a Hamiltonian cycle (``traverse``);
5. spread ``p`` virtual centers along the cycles by prefix sums of weights;
6. run the flow test with the virtual centers on the 28th power of
   ``G_w`` plus the virtual centers, asking for ``n - q`` units.

Steps that fail raise :class:`ThresholdRejected`, and the driver moves on to
the next threshold.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .diversity import resolve_l
from .errors import DivClustError, ExhaustedThresholds, InvariantViolation
from .flow import FlowNetwork, feasible_flow_with_lower_bounds
from .instance import (
    Cluster,
    Clustering,
    Instance,
    ThresholdGraph,
    hop_matrix,
    power_adjacency,
    singleton_clustering,
    sorted_edge_weights,
    threshold_graph,
)

HOST_POWER = 28  # hop radius of the final flow test around each virtual center


class ThresholdRejected(DivClustError):
    step = "?"


class Step1Fail(ThresholdRejected):
    step = "1"


class Step4aFail(ThresholdRejected):
    step = "4a"


class Step5Fail(ThresholdRejected):
    step = "5"


class Step6Fail(ThresholdRejected):
    step = "6"


# ---------------------------------------------------------------------------
# outlier plan


@dataclass(frozen=True)
class OutlierPlan:
    p: int
    q: int
    z: int
    popular_colors: frozenset[int]
    per_color_outliers: Mapping[int, int]

    @property
    def cluster_count(self) -> int:
        return self.p


def plan_from_counts(counts: Sequence[int] | Mapping[int, int], l: int) -> OutlierPlan:
    """Cluster count ``p``, minimum outliers ``q`` and popular colors from class sizes.

    ``p`` is the largest integer with ``sum_c min(p, |C_c|) >= p * l``;
    classes larger than ``p`` are popular and lose ``|C_c| - p`` points.
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    if not isinstance(counts, Mapping):
        counts = dict(enumerate(counts))
    counts = {int(c): int(k) for c, k in counts.items() if k > 0}
    n = sum(counts.values())
    p = n // l
    while p > 0 and sum(min(p, k) for k in counts.values()) < p * l:
        p -= 1
    drop = {c: max(0, k - p) for c, k in counts.items()}
    popular = frozenset(c for c, k in counts.items() if k > p)
    q = sum(drop.values())
    plan = OutlierPlan(p, q, len(popular), popular, drop)
    if not (p * l <= n - q < (p + 1) * l):
        raise InvariantViolation(f"cluster-count bounds fail for counts {counts}, l={l}")
    return plan


def outlier_plan(inst: Instance, l: int | None = None) -> OutlierPlan:
    l = resolve_l(inst, l)
    counts = inst.color_counts()
    return plan_from_counts({c: int(k) for c, k in enumerate(counts)}, l)


# ---------------------------------------------------------------------------
# steps 1-3: balls and the shrunken graph


@dataclass(frozen=True)
class Ball:
    center: int
    members: tuple[int, ...]
    big: bool
    weight: Fraction  # |members| / (l - z)


def components(adjacency: Sequence[Sequence[int]], nodes: Sequence[int]) -> list[list[int]]:
    """Connected components over ``nodes`` (ascending, each component sorted)."""
    seen: set[int] = set()
    out = []
    for root in sorted(nodes):
        if root in seen:
            continue
        seen.add(root)
        comp, q = [root], deque([root])
        while q:
            v = q.popleft()
            for u in adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    comp.append(u)
                    q.append(u)
        out.append(sorted(comp))
    return out


def grow_balls(g: ThresholdGraph, unpopular: Sequence[int], l_minus_z: int) -> list[Ball]:
    """Steps 1-2: reject small components, then carve metric balls of radius ``w``.

    Big balls (``>= l - z`` remaining unpopular points) are taken first, always
    at the lowest eligible id; the leftovers are swept into small balls the
    same way.
    """
    if l_minus_z < 1:
        raise ValueError("l - z must be positive")
    unpopular = sorted(unpopular)
    sub = g.induced(unpopular)
    for comp in components(sub, unpopular):
        if len(comp) < l_minus_z:
            raise Step1Fail(f"component {comp} has fewer than {l_minus_z} unpopular points")

    d = g.instance.dist
    w = g.threshold
    remaining = np.zeros(g.n, dtype=bool)
    remaining[unpopular] = True
    balls = []

    def take(v: int) -> None:
        members = np.flatnonzero(remaining & (d[v] <= w)).tolist()
        remaining[members] = False
        big = len(members) >= l_minus_z
        balls.append(Ball(v, tuple(members), big, Fraction(len(members), l_minus_z)))

    # an ineligible center never becomes eligible again, so one pass suffices
    for v in unpopular:
        if remaining[v] and np.count_nonzero(remaining & (d[v] <= w)) >= l_minus_z:
            take(v)
    for v in unpopular:
        if remaining[v]:
            take(v)
    return balls


@dataclass(frozen=True)
class ShrunkenGraph:
    balls: tuple[Ball, ...]
    adjacency: tuple[tuple[int, ...], ...]  # ball index -> adjacent ball indices
    components: tuple[tuple[int, ...], ...]

    def is_big(self, b: int) -> bool:
        return self.balls[b].big


def shrink(balls: Sequence[Ball], g: ThresholdGraph) -> ShrunkenGraph:
    """Step 3: balls become nodes; two are adjacent iff a ``G_w`` edge joins their members."""
    owner = {v: i for i, b in enumerate(balls) for v in b.members}
    adj: list[set[int]] = [set() for _ in balls]
    for v, i in owner.items():
        for u in g.neighbors(v):
            j = owner.get(u)
            if j is not None and j != i:
                adj[i].add(j)
                adj[j].add(i)
    adjacency = tuple(tuple(sorted(a)) for a in adj)
    comps = components(adjacency, range(len(balls)))
    return ShrunkenGraph(tuple(balls), adjacency, tuple(tuple(c) for c in comps))


# ---------------------------------------------------------------------------
# step 4: spanning tree and Hamiltonian order


@dataclass(frozen=True)
class BigTree:
    """Spanning tree over the big nodes of one component plus leaf attachments."""

    root: int
    children: Mapping[int, tuple[int, ...]]
    leaves: Mapping[int, tuple[int, ...]]  # big node -> small nodes attached to it


def spanning_tree_small_leaves(sg: ShrunkenGraph, component: Sequence[int], cube=None) -> BigTree:
    """Step 4(a): tree of ``component**3`` whose small nodes are all leaves.

    Each small node hangs off its lowest-id adjacent big node; the big nodes
    are joined by a breadth-first tree in the graph where two big nodes are
    adjacent iff within three hops.  ``cube`` may pass a precomputed
    ``power_adjacency(sg.adjacency, 3)``.
    """
    comp = sorted(component)
    bigs = [b for b in comp if sg.is_big(b)]
    if not bigs:
        raise Step4aFail(f"component {comp} has no big node")
    leaves: dict[int, list[int]] = {b: [] for b in bigs}
    for s in comp:
        if sg.is_big(s):
            continue
        hosts = [b for b in sg.adjacency[s] if sg.is_big(b)]
        if not hosts:
            raise Step4aFail(f"small node {s} has no big neighbour")
        leaves[min(hosts)].append(s)

    if cube is None:
        cube = power_adjacency(sg.adjacency, 3)
    bigset = set(bigs)
    root = bigs[0]
    children: dict[int, list[int]] = {b: [] for b in bigs}
    seen = {root}
    q = deque([root])
    while q:
        v = q.popleft()
        for u in sorted(cube[v] & bigset):
            if u not in seen:
                seen.add(u)
                children[v].append(u)
                q.append(u)
    if len(seen) != len(bigs):
        raise Step4aFail(f"big nodes of component {comp} are not connected within three hops")
    return BigTree(
        root,
        {b: tuple(c) for b, c in children.items()},
        {b: tuple(s) for b, s in leaves.items()},
    )


def traverse(children: Mapping, root) -> list:
    """Visit order whose consecutive nodes are within 3 tree hops (and last-to-first within 1).

    Nodes at odd depth (root depth 1) are visited before their subtrees,
    nodes at even depth after them.  Iterative, linear time.
    """
    order = []
    stack = [(root, 1, False)]
    while stack:
        v, depth, done = stack.pop()
        if done:
            order.append(v)
            continue
        kids = children.get(v, ())
        if depth % 2:
            order.append(v)
        else:
            stack.append((v, depth, True))
        for u in reversed(kids):
            stack.append((u, depth + 1, False))
    return order


# ---------------------------------------------------------------------------
# step 5: virtual centers


@dataclass(frozen=True)
class ComponentCycle:
    order: tuple[int, ...]  # big nodes in cycle order
    leaves: Mapping[int, tuple[int, ...]]


@dataclass(frozen=True)
class CenterPlacement:
    counts: Mapping[int, int]  # ball index -> number of virtual centers hosted
    hosts: tuple[int, ...]  # host point of each virtual center
    prefix: Mapping[int, Fraction] = field(default_factory=dict)  # ball index -> delta_j


def place_virtual_centers(plan: OutlierPlan, cycles: Sequence[ComponentCycle], balls: Sequence[Ball]) -> CenterPlacement:
    """Step 5: ``floor(delta_j) - floor(delta_(j-1))`` centers at the center of ball ``j``.

    ``delta_j`` is the running sum of ``eta`` (a big node's weight plus its
    leaves' weights) along the component's cycle, in exact rationals.
    """
    counts: dict[int, int] = {}
    prefix: dict[int, Fraction] = {}
    hosts: list[int] = []
    for cyc in cycles:
        delta = Fraction(0)
        for b in cyc.order:
            eta = balls[b].weight + sum((balls[x].weight for x in cyc.leaves.get(b, ())), Fraction(0))
            before = delta
            delta += eta
            k = int(delta) - int(before)  # floor on nonnegative fractions
            counts[b] = k
            prefix[b] = delta
            hosts.extend([balls[b].center] * k)
    if len(hosts) != plan.p:
        raise Step5Fail(f"placed {len(hosts)} virtual centers, need {plan.p}")
    return CenterPlacement(counts, tuple(hosts), prefix)


# ---------------------------------------------------------------------------
# step 6: flow test on H_w**28


def host_graph(g: ThresholdGraph, hosts: Sequence[int]) -> list[list[int]]:
    """``H_w``: ``G_w`` plus one pendant node per virtual center on its host point."""
    n = g.n
    adj = [list(nbrs) for nbrs in g.adjacency]
    for i, h in enumerate(hosts):
        adj.append([h])
        adj[h].append(n + i)
    return adj


def virtual_center_reach(g: ThresholdGraph, hosts: Sequence[int], power: int = HOST_POWER) -> list[frozenset[int]]:
    """Real points adjacent to each virtual center in ``H_w**power``."""
    n = g.n
    adj = host_graph(g, hosts)
    sources = np.arange(n, n + len(hosts))
    hops = hop_matrix(adj, max_depth=power, sources=sources)
    return [frozenset(np.flatnonzero(row[:n] > 0).tolist()) for row in hops]


def outlier_f_test(
    inst: Instance, reach: Sequence[frozenset[int]], hosts: Sequence[int], l: int, demand: int
) -> list[Cluster]:
    """Flow test with the virtual centers as the only centers and no overflow.

    Succeeds iff ``demand`` points can be routed, each to a virtual center it
    reaches, at most one point of each color per center and at least ``l``
    per center.  Unrouted points are the outliers.
    """
    n = inst.n
    net = FlowNetwork()
    s, t = net.add_node(), net.add_node()
    point_node = list(net.add_nodes(n))
    for v in range(n):
        net.add_arc(s, point_node[v], 0, 1)
    routes: dict[int, tuple[int, int]] = {}
    for i, members in enumerate(reach):
        u = net.add_node()
        net.add_arc(u, t, lower=l)
        slots: dict[int, int] = {}
        for v in sorted(members):
            c = int(inst.colors[v])
            if c not in slots:
                slots[c] = net.add_node()
                net.add_arc(slots[c], u, 0, 1)
            routes[net.add_arc(point_node[v], slots[c])] = (v, i)
    flow = feasible_flow_with_lower_bounds(net, s, t, demand=demand)
    if flow is None:
        raise Step6Fail(f"no flow of value {demand} through the virtual centers")
    groups: list[list[int]] = [[] for _ in reach]
    for arc, (v, i) in routes.items():
        if flow.values[arc]:
            groups[i].append(v)
    return [Cluster(hosts[i], members) for i, members in enumerate(groups)]


# ---------------------------------------------------------------------------
# driver


@dataclass(frozen=True)
class ThresholdReport:
    threshold: float
    outcome: str  # "ok" or the failing step


def solve_at_threshold(inst: Instance, g: ThresholdGraph, plan: OutlierPlan, l: int) -> Clustering:
    """Steps 1-6 at one threshold; raises :class:`ThresholdRejected` on failure."""
    colors = inst.colors
    unpopular = [v for v in range(inst.n) if int(colors[v]) not in plan.popular_colors]
    l_minus_z = l - plan.z
    balls = grow_balls(g, unpopular, l_minus_z)
    sg = shrink(balls, g)
    cube = power_adjacency(sg.adjacency, 3)
    cycles = []
    for comp in sg.components:
        tree = spanning_tree_small_leaves(sg, comp, cube)
        cycles.append(ComponentCycle(tuple(traverse(tree.children, tree.root)), tree.leaves))
    placement = place_virtual_centers(plan, cycles, balls)
    reach = virtual_center_reach(g, placement.hosts)
    clusters = outlier_f_test(inst, reach, placement.hosts, l, inst.n - plan.q)
    covered = {v for c in clusters for v in c.members}
    outliers = tuple(v for v in range(inst.n) if v not in covered)
    if len(outliers) != plan.q:
        raise InvariantViolation(f"{len(outliers)} outliers, expected {plan.q}")
    return Clustering(tuple(clusters), outliers, g.threshold, {"p": plan.p, "q": plan.q, "z": plan.z})


def solve_with_outliers(
    inst: Instance, l: int | None = None, report: Callable[[ThresholdReport], None] | None = None
) -> Clustering:
    """Exactly ``p`` valid clusters over all but the minimum ``q`` points.

    Each member lies within ``HOST_POWER * w`` of its cluster's reported
    center, the host point of the cluster's virtual center, where ``w`` is
    the accepted threshold.
    """
    l = resolve_l(inst, l)
    plan = outlier_plan(inst, l)
    info = {"p": plan.p, "q": plan.q, "z": plan.z}
    if plan.p == 0:
        return Clustering((), tuple(range(inst.n)), 0.0, info)
    if l == 1:
        c = singleton_clustering(inst)
        return Clustering(c.clusters, (), 0.0, info)
    for w in sorted_edge_weights(inst):
        try:
            result = solve_at_threshold(inst, threshold_graph(inst, w), plan, l)
        except ThresholdRejected as exc:
            if report is not None:
                report(ThresholdReport(w, exc.step))
            continue
        if report is not None:
            report(ThresholdReport(w, "ok"))
        return result
    raise ExhaustedThresholds(f"no threshold accepted (n={inst.n}, l={l}, p={plan.p}, q={plan.q})")
