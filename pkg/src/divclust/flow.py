"""Integral max-flow (Dinic) and feasible flows with arc lower bounds."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import DivClustError


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    lower: int = 0
    upper: int | None = None  # None = unbounded


@dataclass
class FlowNetwork:
    """Directed network with ``[lower, upper]`` integral bounds per arc.

    Build it incrementally with :meth:`add_node` / :meth:`add_arc`; solvers
    never modify it.
    """

    n_nodes: int = 0
    arcs: list[Arc] = field(default_factory=list)

    def add_node(self) -> int:
        self.n_nodes += 1
        return self.n_nodes - 1

    def add_nodes(self, count: int) -> range:
        start = self.n_nodes
        self.n_nodes += count
        return range(start, self.n_nodes)

    def add_arc(self, tail: int, head: int, lower: int = 0, upper: int | None = None) -> int:
        if not (0 <= tail < self.n_nodes and 0 <= head < self.n_nodes):
            raise DivClustError(f"arc ({tail}, {head}) references a missing node")
        if lower < 0 or (upper is not None and upper < lower):
            raise DivClustError(f"arc ({tail}, {head}) has invalid bounds [{lower}, {upper}]")
        self.arcs.append(Arc(tail, head, int(lower), None if upper is None else int(upper)))
        return len(self.arcs) - 1

    def unbounded_sentinel(self, demand: int = 0) -> int:
        finite = sum(a.lower + (a.upper or 0) for a in self.arcs)
        return finite + demand + 1


@dataclass(frozen=True)
class Flow:
    values: tuple[int, ...]  # per arc, same order as FlowNetwork.arcs
    value: int


class _Dinic:
    """Residual graph with paired edges (``e ^ 1`` is the reverse of ``e``)."""

    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, u: int, v: int, cap: int) -> int:
        e = len(self.to)
        self.to += [v, u]
        self.cap += [cap, 0]
        self.adj[u].append(e)
        self.adj[v].append(e + 1)
        return e

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            for e in self.adj[v]:
                u = self.to[e]
                if self.cap[e] > 0 and level[u] < 0:
                    level[u] = level[v] + 1
                    q.append(u)
        return level if level[t] >= 0 else None

    def _blocking(self, s: int, t: int, level: list[int]) -> int:
        it = [0] * self.n
        total = 0
        adj, to, cap = self.adj, self.to, self.cap
        while True:
            path: list[int] = []
            v = s
            while v != t:
                edges = adj[v]
                while it[v] < len(edges):
                    e = edges[it[v]]
                    if cap[e] > 0 and level[to[e]] == level[v] + 1:
                        break
                    it[v] += 1
                if it[v] < len(edges):
                    e = edges[it[v]]
                    path.append(e)
                    v = to[e]
                    continue
                # dead end: retreat
                if v == s:
                    return total
                level[v] = -1
                e = path.pop()
                v = to[e ^ 1]
                it[v] += 1
            push = min(cap[e] for e in path)
            for e in path:
                cap[e] -= push
                cap[e ^ 1] += push
            total += push

    def run(self, s: int, t: int) -> int:
        total = 0
        while (level := self._levels(s, t)) is not None:
            total += self._blocking(s, t, level)
        return total


def max_flow(net: FlowNetwork, s: int, t: int) -> Flow:
    """Maximum integral ``s``-``t`` flow on a network without lower bounds."""
    if s == t:
        raise ValueError("source and sink must differ")
    if any(a.lower for a in net.arcs):
        raise ValueError("max_flow requires zero lower bounds; use feasible_flow_with_lower_bounds")
    inf = net.unbounded_sentinel()
    g = _Dinic(net.n_nodes)
    ids = [g.add(a.tail, a.head, inf if a.upper is None else a.upper) for a in net.arcs]
    value = g.run(s, t)
    return Flow(tuple(g.cap[e ^ 1] for e in ids), value)


def feasible_flow_with_lower_bounds(
    net: FlowNetwork, s: int | None = None, t: int | None = None, demand: int = 0
) -> Flow | None:
    """A flow of exactly ``demand`` units from ``s`` to ``t`` respecting every arc's bounds.

    With ``s`` and ``t`` omitted the network is treated as a pure circulation.
    Returns ``None`` when no such flow exists.  Standard reduction: close the
    network with a ``t -> s`` arc of bounds ``[demand, demand]``, shift lower
    bounds into node excesses, and check that a max-flow between a super
    source and super sink saturates every excess arc.
    """
    if (s is None) != (t is None):
        raise ValueError("give both s and t, or neither")
    if demand < 0:
        raise ValueError("demand must be nonnegative")
    if s is not None and s == t:
        raise ValueError("source and sink must differ")
    n = net.n_nodes
    inf = net.unbounded_sentinel(demand)
    g = _Dinic(n + 2)
    ss, tt = n, n + 1
    excess = [0] * n
    ids = []
    for a in net.arcs:
        upper = inf if a.upper is None else a.upper
        ids.append(g.add(a.tail, a.head, upper - a.lower))
        excess[a.head] += a.lower
        excess[a.tail] -= a.lower
    if s is not None:
        excess[s] += demand
        excess[t] -= demand
    need = 0
    for v, ex in enumerate(excess):
        if ex > 0:
            g.add(ss, v, ex)
            need += ex
        elif ex < 0:
            g.add(v, tt, -ex)
    if g.run(ss, tt) != need:
        return None
    values = tuple(a.lower + g.cap[e ^ 1] for a, e in zip(net.arcs, ids))
    return Flow(values, demand if s is not None else 0)
