"""Time each hot kernel under the numba and numpy backends and check they agree.

    python benchmarks/bench_kernels.py [--repeat 3]

The first numba call per kernel includes JIT compilation (or a cache load) and
is reported separately from the steady-state time.
"""

import argparse
import itertools
import time

import numpy as np

from wclique import kernels
from wclique._backend import HAVE_NUMBA, set_backend
from wclique.distributions import log_ratio, named_pair
from wclique.model import edge_endpoints, sample_planted
from wclique.risk import _subset_tables


def _cases():
    bd = named_pair("bernoulli_dirac")
    gs = named_pair("gaussian_shift")
    g = sample_planted(26, 6, gs, seed=11).graph
    lr = g.edge_values(lambda w: log_ratio(gs, w))
    yield "subset_max n=26 k=6", lambda: kernels.subset_max(lr, 6)
    yield "subset_logsumexp n=26 k=6", lambda: kernels.subset_logsumexp(lr, 6)

    _, pm, qm = bd.finite_support()
    members, edges = _subset_tables(7, 3)
    yield "enumerate_outcomes n=7 k=3 (2^21)", lambda: kernels.enumerate_outcomes(pm, qm, members, edges)

    du = named_pair("disjoint_uniform")
    g = sample_planted(300, 12, du, seed=5).graph
    order = np.argsort(g.weights, kind="stable")
    i, j = edge_endpoints(g.n)
    args = (i[order], j[order], g.weights[order], g.n, 12)
    yield "interval_windows n=300 k=12", lambda: kernels.interval_windows(*args)


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, dict):
        return all(np.isclose(a[key], b[key], rtol=1e-12, atol=1e-14) for key in a)
    flat_a, flat_b = [], []
    for x, y in itertools.zip_longest(a, b):
        if isinstance(x, tuple):
            flat_a += x
            flat_b += y
        else:
            flat_a.append(x)
            flat_b.append(y)
    return np.allclose(np.array(flat_a, float), np.array(flat_b, float), rtol=1e-12, equal_nan=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    opts = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':36s} {'numba 1st':>10s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}  agree")
    for name, fn in _cases():
        set_backend("numba")
        t0 = time.perf_counter()
        fn()
        first = time.perf_counter() - t0
        t_nb, out_nb = _time(fn, opts.repeat)
        set_backend("numpy")
        t_np, out_np = _time(fn, 1)
        ok = _same(out_nb, out_np)
        print(f"{name:36s} {first:10.4f} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}  {ok}")
    set_backend("numba")


if __name__ == "__main__":
    main()
