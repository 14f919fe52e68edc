"""Colored metric instances, threshold graphs, graph powers and clustering evaluation."""
from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from os import PathLike
from typing import Any

import numpy as np

from . import kernels
from .errors import InstanceError

METRICS = tuple(kernels.METRIC_CODES)


@dataclass(frozen=True, eq=False)
class Instance:
    """Colored points in a metric space.

    Exactly one of ``points`` (coordinates, distances derived with ``metric``)
    or ``matrix`` (explicit symmetric distances) is set.  ``colors`` holds a
    nonnegative integer color id per point; ``color_names`` optionally maps
    ids back to the original labels.  ``l`` is the minimum cluster size
    carried along from the input document, if any.
    """

    colors: np.ndarray
    points: np.ndarray | None = None
    matrix: np.ndarray | None = None
    l: int | None = None
    metric: str = "euclidean"
    color_names: tuple | None = None
    validate_metric: bool = field(default=False, repr=False)

    def __post_init__(self):
        colors = np.asarray(self.colors)
        if colors.ndim != 1:
            raise InstanceError("colors must be a flat sequence")
        if colors.size == 0:
            raise InstanceError("empty instance")
        if not np.issubdtype(colors.dtype, np.integer):
            raise InstanceError("color ids must be integers")
        if colors.min() < 0:
            raise InstanceError("color ids must be nonnegative")
        colors = colors.astype(np.int64)
        colors.flags.writeable = False
        object.__setattr__(self, "colors", colors)
        n = colors.size

        if (self.points is None) == (self.matrix is None):
            raise InstanceError("exactly one of points/matrix must be given")
        if self.metric not in METRICS:
            raise InstanceError(f"unknown metric {self.metric!r}; expected one of {METRICS}")
        if self.points is not None:
            pts = _as_float_array(self.points, "points")
            if pts.ndim != 2:
                raise InstanceError("points must be a list of equal-length coordinate vectors")
            if pts.shape[0] != n:
                raise InstanceError(f"{pts.shape[0]} points but {n} colors")
            if not np.isfinite(pts).all():
                raise InstanceError("coordinates must be finite")
            pts.flags.writeable = False
            object.__setattr__(self, "points", pts)
        else:
            mat = _as_float_array(self.matrix, "matrix")
            if mat.shape != (n, n):
                raise InstanceError(f"matrix must be {n}x{n}, got {mat.shape}")
            if not np.isfinite(mat).all():
                raise InstanceError("distances must be finite")
            if (mat < 0).any():
                raise InstanceError("negative distance in matrix")
            if (np.diag(mat) != 0).any():
                raise InstanceError("matrix diagonal must be zero")
            if (mat != mat.T).any():
                i, j = np.argwhere(mat != mat.T)[0]
                raise InstanceError(f"asymmetric matrix: d({i},{j})={mat[i, j]} but d({j},{i})={mat[j, i]}")
            mat.flags.writeable = False
            object.__setattr__(self, "matrix", mat)
        if self.l is not None:
            if isinstance(self.l, bool) or int(self.l) != self.l or self.l < 1:
                raise InstanceError("l must be a positive integer")
            object.__setattr__(self, "l", int(self.l))
        if self.color_names is not None:
            object.__setattr__(self, "color_names", tuple(self.color_names))
        if self.validate_metric:
            self.check_triangle_inequality()

    @property
    def n(self) -> int:
        return int(self.colors.size)

    @property
    def k(self) -> int:
        """Number of distinct colors."""
        return int(np.unique(self.colors).size)

    @cached_property
    def dist(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        d = kernels.pairwise_distances(self.points, self.metric)
        d.flags.writeable = False
        return d

    def distance(self, u: int, v: int) -> float:
        return float(self.dist[u, v])

    def color_counts(self) -> np.ndarray:
        return np.bincount(self.colors)

    def color_label(self, c: int):
        if self.color_names is not None and c < len(self.color_names):
            return self.color_names[c]
        return int(c)

    def check_triangle_inequality(self, rtol: float = 1e-12) -> None:
        d = self.dist
        # d[i, k] <= d[i, j] + d[j, k] for all triples, checked row by row
        for j in range(self.n):
            via = d[:, j][:, None] + d[j, :][None, :]
            slack = d - via
            if (slack > rtol * np.maximum(1.0, via)).any():
                i, k = np.argwhere(slack > rtol * np.maximum(1.0, via))[0]
                raise InstanceError(f"triangle inequality violated: d({i},{k}) > d({i},{j}) + d({j},{k})")

    def subset(self, ids: Sequence[int]) -> Instance:
        """Sub-instance on ``ids`` (renumbered ``0..len(ids)-1``) with an explicit matrix."""
        ids = np.asarray(ids, dtype=np.int64)
        return Instance(
            colors=self.colors[ids],
            matrix=self.dist[np.ix_(ids, ids)].copy(),
            l=self.l,
            color_names=self.color_names,
        )

    def to_dict(self) -> dict:
        labels = [self.color_label(int(c)) for c in self.colors]
        doc: dict[str, Any] = {
            "points": self.points.tolist() if self.points is not None else None,
            "matrix": self.matrix.tolist() if self.matrix is not None else None,
            "colors": labels,
            "l": self.l,
        }
        if self.metric != "euclidean":
            doc["metric"] = self.metric
        return doc

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _as_float_array(value, name: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"{name}: dimension mismatch or non-numeric entry ({exc})") from None
    return arr


def dense_colors(labels: Sequence) -> tuple[np.ndarray, tuple]:
    """Map arbitrary hashable labels to dense ids in order of first appearance."""
    ids: dict = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        out[i] = ids.setdefault(lab, len(ids))
    return out, tuple(ids)


def load_instance(document: str | bytes | Mapping, validate_metric: bool = False) -> Instance:
    """Build an :class:`Instance` from the JSON instance schema.

    ``document`` is JSON text or an already-decoded mapping with keys
    ``points`` | ``matrix`` (exactly one non-null), ``colors`` and ``l``, and
    an optional ``metric`` tag.  The triangle inequality is only checked when
    ``validate_metric`` is set.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid JSON: {exc}") from None
    else:
        doc = document
    if not isinstance(doc, Mapping):
        raise InstanceError("instance document must be a JSON object")
    unknown = set(doc) - {"points", "matrix", "colors", "l", "metric"}
    if unknown:
        raise InstanceError(f"unknown keys: {sorted(unknown)}")
    labels = doc.get("colors")
    if labels is None:
        raise InstanceError("missing 'colors'")
    if len(labels) == 0:
        raise InstanceError("empty instance")
    points, matrix = doc.get("points"), doc.get("matrix")
    if (points is None) == (matrix is None):
        raise InstanceError("exactly one of 'points'/'matrix' must be present")
    geometry = points if points is not None else matrix
    if len(geometry) == 0:
        raise InstanceError("empty instance")
    if points is not None and len({len(p) for p in points}) > 1:
        raise InstanceError("dimension mismatch between points")
    colors, names = dense_colors(labels)
    return Instance(
        colors=colors,
        points=points,
        matrix=matrix,
        l=doc.get("l"),
        metric=doc.get("metric", "euclidean"),
        color_names=names,
        validate_metric=validate_metric,
    )


def read_instance(path: str | PathLike, validate_metric: bool = False) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return load_instance(fh.read(), validate_metric=validate_metric)


# ---------------------------------------------------------------------------
# threshold graphs


def _bichromatic(inst: Instance) -> np.ndarray:
    return inst.colors[:, None] != inst.colors[None, :]


def sorted_edge_weights(inst: Instance) -> list[float]:
    """Distinct weights of all bichromatic pairs, ascending (the threshold schedule)."""
    iu = np.triu_indices(inst.n, k=1)
    mask = _bichromatic(inst)[iu]
    return np.unique(inst.dist[iu][mask]).tolist()


@dataclass(frozen=True, eq=False)
class ThresholdGraph:
    """Bichromatic pairs at distance ``<= threshold``.

    ``adjacency[v]`` lists the neighbours of ``v`` in ascending id order.
    """

    instance: Instance
    threshold: float
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.adjacency)

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=bool)
        for v, nbrs in enumerate(self.adjacency):
            m[v, list(nbrs)] = True
        m.flags.writeable = False
        return m

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.matrix[u, v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def induced(self, nodes: Iterable[int]) -> tuple[tuple[int, ...], ...]:
        """Adjacency of the subgraph induced by ``nodes`` (other rows empty)."""
        keep = np.zeros(self.n, dtype=bool)
        keep[list(nodes)] = True
        return tuple(
            tuple(u for u in nbrs if keep[u]) if keep[v] else ()
            for v, nbrs in enumerate(self.adjacency)
        )


def threshold_graph(inst: Instance, w: float) -> ThresholdGraph:
    if w < 0:
        raise ValueError("threshold must be nonnegative")
    adj = (inst.dist <= w) & _bichromatic(inst)
    rows = tuple(tuple(np.flatnonzero(row).tolist()) for row in adj)
    return ThresholdGraph(inst, float(w), rows)


# ---------------------------------------------------------------------------
# graph powers and metric completion


def _csr(adjacency: Sequence[Iterable[int]]):
    rows = [sorted(set(nbrs)) for nbrs in adjacency]
    n = len(rows)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r in rows])
    indices = np.fromiter(itertools.chain.from_iterable(rows), dtype=np.int64, count=int(indptr[-1]))
    if indices.size and (indices.min() < 0 or indices.max() >= n):
        raise ValueError("neighbour id out of range")
    return indptr, indices


def hop_matrix(adjacency: Sequence[Iterable[int]], max_depth: int | None = None, sources=None) -> np.ndarray:
    """Hop distances (``-1`` = beyond ``max_depth`` or unreachable)."""
    indptr, indices = _csr(adjacency)
    return kernels.hop_distances(indptr, indices, sources=sources, max_depth=max_depth)


def power_adjacency(adjacency: Sequence[Iterable[int]], d: int) -> tuple[frozenset[int], ...]:
    """Adjacency of the power graph ``G**d``: ``u ~ v`` iff ``1 <= hops(u, v) <= d``."""
    if d < 1:
        raise ValueError("power must be a positive integer")
    hops = hop_matrix(adjacency, max_depth=d)
    return tuple(frozenset(np.flatnonzero(row > 0).tolist()) for row in hops)


def metric_completion(
    adjacency: Sequence[Iterable[int]],
    colors: Sequence[int],
    l: int | None = None,
    disconnected_distance: float | None = None,
) -> Instance:
    """Instance whose distance matrix is the all-pairs hop distance of a unit-weight graph.

    Pairs in different components raise :class:`InstanceError` unless
    ``disconnected_distance`` is given; that value must be at least the largest
    finite hop distance to keep the result a metric.
    """
    hops = hop_matrix(adjacency).astype(np.float64)
    unreachable = hops < 0
    if unreachable.any():
        if disconnected_distance is None:
            raise InstanceError("graph is disconnected; shortest-path distance undefined")
        if disconnected_distance < hops.max():
            raise InstanceError("disconnected_distance smaller than a finite hop distance")
        hops[unreachable] = disconnected_distance
    return Instance(colors=np.asarray(colors, dtype=np.int64), matrix=hops, l=l)


# ---------------------------------------------------------------------------
# clusterings


@dataclass(frozen=True)
class Cluster:
    center: int
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "center", int(self.center))
        object.__setattr__(self, "members", tuple(sorted(int(m) for m in self.members)))

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Clustering:
    """Clusters with designated centers, an outlier set and the threshold that produced them.

    ``info`` carries solver echoes such as ``p``, ``q`` and ``z`` for the
    outlier variant.
    """

    clusters: tuple[Cluster, ...]
    outliers: tuple[int, ...] = ()
    threshold: float = 0.0
    info: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(self.clusters))
        object.__setattr__(self, "outliers", tuple(sorted(int(o) for o in self.outliers)))
        object.__setattr__(self, "threshold", float(self.threshold))

    def radius(self, inst: Instance) -> float:
        return max((cluster_radius(inst, c) for c in self.clusters), default=0.0)

    def labels(self, n: int) -> np.ndarray:
        """Cluster index per point, ``-1`` for outliers and uncovered points."""
        out = np.full(n, -1, dtype=np.int64)
        for i, c in enumerate(self.clusters):
            out[list(c.members)] = i
        return out

    def to_dict(self, inst: Instance) -> dict:
        doc = {
            "threshold": self.threshold,
            "clusters": [
                {"center": c.center, "members": list(c.members), "radius": cluster_radius(inst, c)}
                for c in self.clusters
            ],
            "outliers": list(self.outliers),
        }
        doc.update(self.info)
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> Clustering:
        clusters = tuple(Cluster(c["center"], c["members"]) for c in doc["clusters"])
        info = {k: doc[k] for k in ("p", "q", "z") if k in doc}
        return cls(clusters, tuple(doc.get("outliers", ())), doc.get("threshold", 0.0), info)


def cluster_radius(inst: Instance, cluster: Cluster) -> float:
    if not cluster.members:
        return 0.0
    return float(inst.dist[cluster.center, list(cluster.members)].max())


def cluster_diameter(inst: Instance, members: Sequence[int]) -> float:
    if len(members) < 2:
        return 0.0
    idx = list(members)
    return float(inst.dist[np.ix_(idx, idx)].max())


@dataclass(frozen=True)
class ClusterStats:
    center: int
    size: int
    radius: float
    diameter: float
    distinct_colors: int


@dataclass(frozen=True)
class Evaluation:
    max_radius: float
    max_diameter: float
    clusters: tuple[ClusterStats, ...]
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def evaluate(
    inst: Instance,
    clustering: Clustering,
    l: int | None = None,
    radius_bound: float | None = None,
) -> Evaluation:
    """Exact radii/diameters plus a list of constraint violations.

    Violations reported: ``uncovered`` (point in no cluster and not an
    outlier), ``undersized`` (fewer than ``l`` members), ``polychromatic``
    (the polychromatic requirement fails: a color repeats), ``radius``
    (radius above ``radius_bound``).  Out-of-range ids and overlapping
    clusters are structural errors and raise :class:`InstanceError`.
    """
    l = inst.l if l is None else l
    seen = np.zeros(inst.n, dtype=np.int64)
    for c in clustering.clusters:
        for v in (c.center, *c.members):
            if not 0 <= v < inst.n:
                raise InstanceError(f"point id {v} out of range")
        seen[list(c.members)] += 1
    for v in clustering.outliers:
        if not 0 <= v < inst.n:
            raise InstanceError(f"outlier id {v} out of range")
    if clustering.outliers:
        seen[list(clustering.outliers)] += 1
    if (seen > 1).any():
        raise InstanceError(f"overlapping clusters at point {int(np.argmax(seen > 1))}")

    violations = []
    uncovered = np.flatnonzero(seen == 0)
    if uncovered.size:
        violations.append(f"uncovered: points {uncovered.tolist()} belong to no cluster")
    stats = []
    for i, c in enumerate(clustering.clusters):
        r = cluster_radius(inst, c)
        d = cluster_diameter(inst, c.members)
        ncol = int(np.unique(inst.colors[list(c.members)]).size) if c.members else 0
        stats.append(ClusterStats(c.center, len(c.members), r, d, ncol))
        if l is not None and len(c.members) < l:
            violations.append(f"undersized: cluster {i} has {len(c.members)} < {l} members")
        if ncol != len(c.members):
            violations.append(f"polychromatic: cluster {i} repeats a color")
        if radius_bound is not None and r > radius_bound:
            violations.append(f"radius: cluster {i} radius {r} exceeds bound {radius_bound}")
    return Evaluation(
        max_radius=max((s.radius for s in stats), default=0.0),
        max_diameter=max((s.diameter for s in stats), default=0.0),
        clusters=tuple(stats),
        violations=tuple(violations),
    )


def singleton_clustering(inst: Instance) -> Clustering:
    return Clustering(tuple(Cluster(v, (v,)) for v in range(inst.n)), threshold=0.0)

