"""Time each hot kernel under the numba and pure-numpy backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--oracle-n 12]

The backend is switched through the DIVCLUST_NUMBA environment flag, which
the dispatchers read on every call.  Numba timings exclude the first
(compiling) call.
"""
from __future__ import annotations

import argparse
import os
import time

import numpy as np

from divclust import kernels, random_euclidean
from divclust.instance import _csr, threshold_graph


def _time(fn, repeat):
    fn()  # warm-up (jit compile / caches)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(oracle_n: int):
    rng = np.random.default_rng(0)
    pts = rng.random((600, 3))
    inst = random_euclidean(400, 4, 2, 1)
    g = threshold_graph(inst, 0.08)
    indptr, indices = _csr(g.adjacency)
    small = random_euclidean(oracle_n, 4, 2, 2)
    dist, colors = np.asarray(small.dist), small.colors
    radius, _, rainbow = kernels.subset_tables(dist, colors)
    return {
        "pairwise_distances (600 x 3)": lambda: kernels.pairwise_distances(pts),
        "hop_distances (400 nodes, depth 28)": lambda: kernels.hop_distances(indptr, indices, None, 28),
        f"subset_tables (n={oracle_n})": lambda: kernels.subset_tables(dist, colors),
        f"partition_dp (n={oracle_n})": lambda: kernels.partition_dp(radius, rainbow),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--oracle-n", type=int, default=12)
    args = ap.parse_args(argv)
    rows = []
    for name, fn in cases(args.oracle_n).items():
        times = {}
        for flag, label in (("1", "numba"), ("0", "numpy")):
            os.environ["DIVCLUST_NUMBA"] = flag
            times[label] = _time(fn, args.repeat)
        rows.append((name, times["numba"], times["numpy"]))
    os.environ.pop("DIVCLUST_NUMBA", None)
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba ms':>10}  {'numpy ms':>10}  {'speedup':>8}")
    for name, nb, npy in rows:
        print(f"{name:<{width}}  {nb * 1e3:>10.2f}  {npy * 1e3:>10.2f}  {npy / nb:>7.1f}x")


if __name__ == "__main__":
    main()
