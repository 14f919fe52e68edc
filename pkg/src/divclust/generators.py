"""Seeded random instances and hardness-gadget instances built from 3-dimensional matching."""
from __future__ import annotations

import functools
import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .instance import Cluster, Clustering, Instance, metric_completion


def random_euclidean(
    n: int,
    k_colors: int,
    dim: int = 2,
    seed: int | None = None,
    color_weights: Sequence[float] | None = None,
    l: int | None = None,
) -> Instance:
    """Uniform points in the unit cube with colors drawn by ``color_weights``."""
    if n < 1 or k_colors < 1 or dim < 1:
        raise ValueError("n, k_colors and dim must be positive")
    rng = np.random.default_rng(seed)
    points = rng.random((n, dim))
    if color_weights is None:
        probs = None
    else:
        probs = np.asarray(color_weights, dtype=np.float64)
        if probs.shape != (k_colors,) or (probs < 0).any() or probs.sum() <= 0:
            raise ValueError("color_weights must be k_colors nonnegative numbers with a positive sum")
        probs = probs / probs.sum()
    colors = rng.choice(k_colors, size=n, p=probs)
    return Instance(colors=colors, points=points, l=l)


# ---------------------------------------------------------------------------
# 3-dimensional matching


@dataclass(frozen=True)
class ThreeDMInstance:
    """Tripartite hyper-graph on ``X = Y = Z = range(m)`` with triples ``(x, y, z)``.

    ``planted`` lists indices of ``edges`` forming a known perfect matching.
    """

    m: int
    edges: tuple[tuple[int, int, int], ...]
    planted: tuple[int, ...] = ()

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        edges = tuple(tuple(int(v) for v in e) for e in self.edges)
        for e in edges:
            if len(e) != 3 or not all(0 <= v < self.m for v in e):
                raise ValueError(f"invalid triple {e}")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate triple")
        object.__setattr__(self, "edges", edges)

    def is_perfect_matching(self, chosen: Iterable[int]) -> bool:
        chosen = list(chosen)
        if len(chosen) != self.m:
            return False
        return all(len({self.edges[i][axis] for i in chosen}) == self.m for axis in range(3))


def random_3dm(m: int, extra_edges: int = 0, seed: int | None = None, planted: bool = True) -> ThreeDMInstance:
    """Random 3DM instance; with ``planted`` the first ``m`` triples are a perfect matching."""
    if m < 1:
        raise ValueError("m must be positive")
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int, int]] = []
    if planted:
        ys, zs = rng.permutation(m), rng.permutation(m)
        edges = [(x, int(ys[x]), int(zs[x])) for x in range(m)]
    present = set(edges)
    room = m**3 - len(present)
    want = min(extra_edges, room)
    while want > 0:
        e = tuple(int(v) for v in rng.integers(0, m, size=3))
        if e not in present:
            present.add(e)
            edges.append(e)
            want -= 1
    return ThreeDMInstance(m, tuple(edges), tuple(range(m)) if planted else ())


@dataclass(frozen=True)
class Gadget:
    names: tuple[str, ...]
    colors: tuple[int, ...]  # 0-based color ids
    corners: tuple[str, str, str]  # nodes identified with x, y, z
    edges: tuple[tuple[str, str], ...]


@functools.cache
def load_gadget() -> Gadget:
    """Parse the checked-in gadget edge list (``data/gadget.txt``)."""
    text = resources.files("divclust").joinpath("data/gadget.txt").read_text(encoding="utf-8")
    names, colors, corners, edges = [], [], [], []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if line[0] == "node":
            names.append(line[1])
            colors.append(int(line[2]) - 1)
            if line[3:] == ["corner"]:
                corners.append(line[1])
        elif line[0] == "edge":
            edges.append((line[1], line[2]))
        else:
            raise ValueError(f"bad gadget line: {raw!r}")
    if len(corners) != 3:
        raise ValueError("gadget must declare exactly three corners")
    return Gadget(tuple(names), tuple(colors), tuple(corners), tuple(edges))


@dataclass(frozen=True)
class GadgetGraph:
    adjacency: tuple[tuple[int, ...], ...]
    colors: tuple[int, ...]
    node_of: tuple[dict, ...] = field(repr=False)  # per hyper-edge: gadget name -> node id


def gadget_graph(tdm: ThreeDMInstance) -> GadgetGraph:
    """The 3-colored graph ``G'``: vertex copies of X, Y, Z plus one gadget per triple.

    Vertex ``x`` of X is node ``x``, ``y`` of Y is ``m + y`` and ``z`` of Z is
    ``2m + z``; each gadget adds its inner nodes after those.
    """
    gad = load_gadget()
    m = tdm.m
    colors = [0] * m + [1] * m + [2] * m
    adj: list[set[int]] = [set() for _ in range(3 * m)]
    node_of = []
    inner = [v for v in gad.names if v not in gad.corners]
    for x, y, z in tdm.edges:
        ids = dict(zip(gad.corners, (x, m + y, 2 * m + z)))
        for name in inner:
            ids[name] = len(colors)
            colors.append(gad.colors[gad.names.index(name)])
            adj.append(set())
        for u, v in gad.edges:
            adj[ids[u]].add(ids[v])
            adj[ids[v]].add(ids[u])
        node_of.append(ids)
    return GadgetGraph(tuple(tuple(sorted(a)) for a in adj), tuple(colors), tuple(node_of))


def gadget_from_3dm(tdm: ThreeDMInstance) -> Instance:
    """Metric completion of ``G'`` with ``l = 3``.

    Nodes in different components are placed at distance ``|V(G')|``, which
    exceeds every finite hop distance and keeps the completion a metric.
    """
    gg = gadget_graph(tdm)
    n = len(gg.colors)
    return metric_completion(gg.adjacency, gg.colors, l=3, disconnected_distance=float(n))


_FORM_CHOSEN = (("x", "a1", "a2"), ("y", "b1", "b2"), ("z", "c1", "c2"), ("m1", "m2", "m3"))
_FORM_SKIPPED = (("m1", "a1", "a2"), ("m2", "b1", "b2"), ("m3", "c1", "c2"))


def gadget_partition(tdm: ThreeDMInstance, matching: Iterable[int]) -> Clustering:
    """Diameter-1 clustering of ``gadget_from_3dm(tdm)`` induced by a perfect matching."""
    matching = set(matching)
    if not tdm.is_perfect_matching(matching):
        raise ValueError("not a perfect matching of the 3DM instance")
    gg = gadget_graph(tdm)
    clusters = []
    for i, ids in enumerate(gg.node_of):
        form = _FORM_CHOSEN if i in matching else _FORM_SKIPPED
        for triple in form:
            members = [ids[v] for v in triple]
            clusters.append(Cluster(members[0], members))
    return Clustering(tuple(clusters), threshold=1.0)


def find_perfect_matchings(tdm: ThreeDMInstance) -> list[tuple[int, ...]]:
    """All perfect matchings by brute force (tiny instances only)."""
    return [
        combo
        for combo in itertools.combinations(range(len(tdm.edges)), tdm.m)
        if tdm.is_perfect_matching(combo)
    ]
