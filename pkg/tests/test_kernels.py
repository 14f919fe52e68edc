import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divclust import _accel, kernels


def _both(monkeypatch, fn, *args):
    monkeypatch.setenv("DIVCLUST_NUMBA", "1")
    fast = fn(*args)
    monkeypatch.setenv("DIVCLUST_NUMBA", "0")
    slow = fn(*args)
    return fast, slow


@pytest.mark.parametrize("value,expected", [("0", False), ("off", False), ("No", False), ("1", True), ("", True)])
def test_env_flag(monkeypatch, value, expected):
    monkeypatch.setenv("DIVCLUST_NUMBA", value)
    assert _accel.numba_enabled() == (expected and _accel.HAVE_NUMBA)
    assert _accel.backend() == ("numba" if _accel.numba_enabled() else "numpy")


@pytest.mark.parametrize("metric", ["euclidean", "manhattan", "chebyshev"])
def test_pairwise_backends_agree(monkeypatch, metric):
    pts = np.random.default_rng(0).random((15, 3))
    fast, slow = _both(monkeypatch, kernels.pairwise_distances, pts, metric)
    np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=1e-15)
    i, j = 2, 7
    diff = np.abs(pts[i] - pts[j])
    ref = {"euclidean": np.sqrt((diff**2).sum()), "manhattan": diff.sum(), "chebyshev": diff.max()}[metric]
    assert fast[i, j] == pytest.approx(ref)
    assert (np.diag(fast) == 0).all() and (fast == fast.T).all()


def _random_adjacency(rng, n, p):
    adj = [set() for _ in range(n)]
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def _csr(adj):
    indptr = np.concatenate([[0], np.cumsum([len(a) for a in adj])])
    indices = np.array([v for a in adj for v in sorted(a)], dtype=np.int64)
    return indptr, indices


def _bfs(adj, s, depth):
    dist = {s: 0}
    frontier = [s]
    while frontier:
        nxt = []
        for v in frontier:
            for u in adj[v]:
                if u not in dist and dist[v] < depth:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        frontier = nxt
    return dist


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("depth", [1, 2, 3, None])
def test_hop_distances_match_bfs(monkeypatch, seed, depth):
    rng = np.random.default_rng(seed)
    n = 12
    adj = _random_adjacency(rng, n, 0.2)
    indptr, indices = _csr(adj)
    fast, slow = _both(monkeypatch, kernels.hop_distances, indptr, indices, None, depth)
    assert (fast == slow).all()
    for s in range(n):
        ref = _bfs(adj, s, n if depth is None else depth)
        row = [ref.get(v, -1) for v in range(n)]
        assert fast[s].tolist() == row


def test_hop_distances_with_sources(monkeypatch):
    adj = [{1}, {0, 2}, {1, 3}, {2}]
    indptr, indices = _csr(adj)
    fast, slow = _both(monkeypatch, kernels.hop_distances, indptr, indices, [3, 0], 2)
    assert fast.tolist() == slow.tolist() == [[-1, 2, 1, 0], [0, 1, 2, -1]]


def _subset_reference(dist, colors):
    n = len(colors)
    radius, diam, rainbow = [], [], []
    for mask in range(1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        if not idx:
            radius.append(0.0)
            diam.append(0.0)
            rainbow.append(True)
            continue
        radius.append(min(max(dist[c][v] for v in idx) for c in idx))
        diam.append(max(dist[u][v] for u in idx for v in idx))
        rainbow.append(len({colors[v] for v in idx}) == len(idx))
    return radius, diam, rainbow


@pytest.mark.parametrize("seed", range(4))
def test_subset_tables_match_enumeration(monkeypatch, seed):
    rng = np.random.default_rng(seed)
    n = 7
    dist = kernels.pairwise_distances(rng.random((n, 2)))
    colors = rng.integers(0, 3, n)
    (rf, df, bf), (rs, ds, bs) = _both(monkeypatch, kernels.subset_tables, dist, colors)
    radius, diam, rainbow = _subset_reference(dist.tolist(), colors.tolist())
    assert rf.tolist() == rs.tolist() == radius
    assert df.tolist() == ds.tolist() == diam
    assert bf.tolist() == bs.tolist() == rainbow


def _partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest) + 1):
        for combo in itertools.combinations(rest, k):
            block = (first, *combo)
            remaining = [x for x in rest if x not in combo]
            for tail in _partitions(remaining):
                yield [block, *tail]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_partition_dp_matches_enumeration(n, seed):
    rng = np.random.default_rng(seed)
    size = 1 << n
    cost = rng.integers(0, 6, size).astype(float)
    valid = rng.random(size) < 0.5
    valid[0] = False
    for i in range(n):
        valid[1 << i] |= rng.random() < 0.3
    best = np.inf
    for part in _partitions(list(range(n))):
        masks = [sum(1 << v for v in block) for block in part]
        if all(valid[m] for m in masks):
            best = min(best, max(cost[m] for m in masks))
    with pytest.MonkeyPatch.context() as mp:
        fast, slow = _both(mp, kernels.partition_dp, cost, valid)
    assert fast[size - 1] == best
    assert np.array_equal(fast, slow)


def test_partition_dp_rejects_bad_length():
    with pytest.raises(ValueError):
        kernels.partition_dp(np.zeros(3), np.zeros(3, dtype=bool))
