import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divclust import (
    InfeasibleInstance,
    Instance,
    TooLarge,
    check_feasible,
    evaluate,
    exact_solve,
    exact_solve_outliers,
    random_euclidean,
    solve,
)
from divclust.oracle import optimal_partition


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest) + 1):
        for combo in itertools.combinations(rest, k):
            remaining = [x for x in rest if x not in combo]
            for tail in set_partitions(remaining):
                yield [(first, *combo), *tail]


def enumerate_optimum(inst, l, points=None):
    """(r*, d*) by listing every set partition; point-centers drawn from each block."""
    points = list(range(inst.n)) if points is None else list(points)
    d = inst.dist
    best_r = best_d = np.inf
    for part in set_partitions(points):
        if any(len(b) < l or len({int(inst.colors[v]) for v in b}) < len(b) for b in part):
            continue
        r = max(min(max(d[c, v] for v in b) for c in b) for b in part) if part else 0.0
        dd = max(max(d[u, v] for u in b for v in b) for b in part) if part else 0.0
        best_r, best_d = min(best_r, r), min(best_d, dd)
    return best_r, best_d


def test_fix1(fix1):
    res = exact_solve(fix1)
    assert res.radius == 1 == enumerate_optimum(fix1, 2)[0]
    assert evaluate(fix1, res.clustering).max_radius == 1


def test_two_points():
    inst = Instance(colors=[0, 1], points=[[0, 0], [3, 4]])
    assert exact_solve(inst, 2).radius == 5


def test_infeasible_and_too_large():
    with pytest.raises(InfeasibleInstance):
        exact_solve(Instance(colors=[0, 0, 1], points=[[0], [1], [2]]), 2)
    big = Instance(colors=np.arange(15) % 3, points=np.zeros((15, 1)))
    with pytest.raises(TooLarge):
        exact_solve(big, 3)
    with pytest.raises(TooLarge):
        exact_solve_outliers(Instance(colors=np.arange(13) % 3, points=np.zeros((13, 1))), 3)


def test_outliers_fix4(fix4):
    res = exact_solve_outliers(fix4, 3, 3)
    assert res.radius == pytest.approx(0.1)
    assert len(res.clustering.outliers) == 3
    assert evaluate(fix4, res.clustering, 3).ok


def test_outliers_q_zero_is_plain_oracle(fix2):
    assert exact_solve_outliers(fix2, 2, 0).radius == exact_solve(fix2, 2).radius


def test_outliers_drop_everything(fix1):
    res = exact_solve_outliers(fix1, 2, 4)
    assert res.radius == 0 and res.clustering.clusters == () and len(res.clustering.outliers) == 4


def test_optimal_partition_none_when_impossible():
    assert optimal_partition(np.zeros((2, 2)), np.array([0, 0]), 2) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dp_matches_partition_enumeration(seed):
    rng = np.random.default_rng(seed)
    n, k, l = int(rng.integers(2, 8)), int(rng.integers(2, 5)), int(rng.integers(1, 4))
    inst = random_euclidean(n, k, 2, seed, l=l)
    if not check_feasible(inst, l):
        return
    res = exact_solve(inst)
    r, d = enumerate_optimum(inst, l)
    assert res.radius == r and res.diameter == d
    assert r <= d <= 2 * r + 1e-12
    ev = evaluate(inst, res.clustering, l)
    assert ev.ok and ev.max_radius == r


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_outlier_oracle_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n, k, l = int(rng.integers(2, 8)), int(rng.integers(2, 4)), int(rng.integers(2, 4))
    inst = random_euclidean(n, k, 2, seed, color_weights=rng.random(k) + 0.1, l=l)
    q = int(rng.integers(0, n + 1))
    best = np.inf
    for dropped in itertools.combinations(range(n), q):
        keep = [v for v in range(n) if v not in dropped]
        best = min(best, enumerate_optimum(inst, l, keep)[0])
    if np.isinf(best):
        with pytest.raises(InfeasibleInstance):
            exact_solve_outliers(inst, l, q)
    else:
        assert exact_solve_outliers(inst, l, q).radius == best


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_oracle_lower_bounds_solver(seed):
    rng = np.random.default_rng(seed)
    inst = random_euclidean(int(rng.integers(2, 11)), 3, 2, seed, l=2)
    if not check_feasible(inst):
        return
    assert exact_solve(inst).radius <= evaluate(inst, solve(inst)).max_radius
