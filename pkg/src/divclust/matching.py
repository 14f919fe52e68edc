"""Bipartite maximum matching with warm starts and Hall-violator certificates."""
from __future__ import annotations

from collections import deque
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .errors import InvalidMatching


@dataclass(frozen=True)
class Bipartite:
    """Bipartite graph between ``left`` and ``right`` vertex sets.

    In the solvers the left side holds candidate centers and the right side
    the points of one color class that still need a center.
    """

    left: tuple
    right: tuple
    edges: tuple[tuple[Hashable, Hashable], ...] = ()

    def __post_init__(self):
        left, right = tuple(sorted(set(self.left))), tuple(sorted(set(self.right)))
        lset, rset = set(left), set(right)
        edges = tuple(sorted(set(self.edges)))
        for a, b in edges:
            if a not in lset or b not in rset:
                raise ValueError(f"edge ({a!r}, {b!r}) does not join left to right")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_adjacency(cls, left: Iterable, right: Iterable, adj: Mapping) -> Bipartite:
        """Build from ``adj[l] -> iterable of right vertices``."""
        return cls(tuple(left), tuple(right), tuple((a, b) for a, bs in adj.items() for b in bs))

    @cached_property
    def left_adj(self) -> dict:
        out = {v: [] for v in self.left}
        for a, b in self.edges:
            out[a].append(b)
        return out

    @cached_property
    def right_adj(self) -> dict:
        out = {v: [] for v in self.right}
        for a, b in self.edges:
            out[b].append(a)
        return out

    def neighborhood(self, rights: Iterable) -> set:
        return {a for b in rights for a in self.right_adj[b]}


@dataclass(frozen=True)
class Saturating:
    matching: dict = field(default_factory=dict)  # left -> right


@dataclass(frozen=True)
class Violator:
    S: frozenset  # right vertices with |N(S)| < |S|
    NS: frozenset  # exactly N(S)


def _check_matching(b: Bipartite, matching: Mapping) -> None:
    edges = set(b.edges)
    rights = list(matching.values())
    if len(set(rights)) != len(rights):
        raise InvalidMatching("a right vertex is matched twice")
    for a, r in matching.items():
        if (a, r) not in edges:
            raise InvalidMatching(f"({a!r}, {r!r}) is not an edge")


def _augment_from(b: Bipartite, root, mate_left: dict, mate_right: dict) -> bool:
    # BFS over alternating paths from a free left vertex
    parent = {root: None}  # left vertex -> right vertex that led to it
    via = {}  # right vertex -> left vertex it was reached from
    q = deque([root])
    while q:
        a = q.popleft()
        for r in b.left_adj[a]:
            if r in via:
                continue
            via[r] = a
            nxt = mate_right.get(r)
            if nxt is None:
                # flip the path ending at r
                while True:
                    a = via[r]
                    prev = mate_left.get(a)
                    mate_left[a] = r
                    mate_right[r] = a
                    if parent[a] is None:
                        return True
                    r = prev
            if nxt not in parent:
                parent[nxt] = r
                q.append(nxt)
    return False


def max_matching(b: Bipartite, initial: Mapping | None = None) -> dict:
    """Maximum matching reached by augmenting-path extension of ``initial``.

    Every left vertex matched in ``initial`` stays matched (augmenting along
    an alternating path never unmatches an interior vertex).  Free left
    vertices are tried in ascending order.
    """
    mate_left = dict(initial or {})
    _check_matching(b, mate_left)
    mate_right = {r: a for a, r in mate_left.items()}
    for a in b.left:
        if a not in mate_left:
            _augment_from(b, a, mate_left, mate_right)
    return mate_left


def saturating_or_violator(b: Bipartite) -> Saturating | Violator:
    """A matching covering every right vertex, or a Hall violator on the right side.

    The violator is the set of right vertices reachable by alternating paths
    from the unmatched right vertices of a maximum matching; it is the
    inclusion-maximal violator and ``NS`` is exactly its neighbourhood.
    """
    m = max_matching(b)
    mate_right = {r: a for a, r in m.items()}
    free = [r for r in b.right if r not in mate_right]
    if not free:
        return Saturating(m)
    S, NS = set(free), set()
    q = deque(free)
    while q:
        r = q.popleft()
        for a in b.right_adj[r]:
            if a in NS:
                continue
            NS.add(a)
            nxt = m[a]  # maximality: every reached left vertex is matched
            if nxt not in S:
                S.add(nxt)
                q.append(nxt)
    return Violator(frozenset(S), frozenset(NS))
