"""Hot loops, each with a numba and a numpy implementation.

The active implementation is chosen per call from :func:`wclique._backend.get_backend`,
so ``WCLIQUE_DISABLE_NUMBA=1`` or :func:`wclique._backend.set_backend` switches
everything at once.
"""

import math

import numpy as np

from .._backend import HAVE_NUMBA, get_backend
from . import _numpy

if HAVE_NUMBA:
    from . import _numba
else:  # pragma: no cover
    _numba = None

__all__ = [
    "OUTCOME_FIELDS",
    "enumerate_outcomes",
    "interval_windows",
    "subset_logsumexp",
    "subset_max",
]

OUTCOME_FIELDS = (
    "p0_total",  # sum of null probabilities (1)
    "e0_L",  # E0[L] (1 when Q << P)
    "e0_L2",
    "e0_sqrtL",
    "e0_abs_L_minus_1",
    "p0_reject",  # P0(L > 1)
    "p1_accept",  # P1(L <= 1), p1 computed from the planted mixture directly
    "p1_total",
    "tv_p0_p1",  # (1/2) sum |p0 - p1|
    "n_ties",  # outcomes with p0 > 0 and L == 1 exactly
)


def _impl():
    return _numba if get_backend() == "numba" else _numpy


def _ratio_arrays(log_ratios):
    lr = np.asarray(log_ratios, dtype=np.float64)
    pos = (lr == np.inf).astype(np.int8)
    neg = (lr == -np.inf).astype(np.int8)
    F = np.ascontiguousarray(np.where(np.isfinite(lr), lr, 0.0))
    return F, pos, neg


def subset_max(log_ratios, k):
    """Maximum over k-subsets of the summed pairwise log-ratios.

    ``log_ratios`` is a symmetric n x n matrix that may hold +-inf. A subset
    with any -inf edge scores -inf; otherwise any +inf edge makes it +inf.
    Returns ``(score, subset)``; ties go to the lexicographically first subset.
    """
    F, pos, neg = _ratio_arrays(log_ratios)
    cls, val, best = _impl().subset_max(F, pos, neg, int(k))
    score = {0: -np.inf, 1: float(val), 2: np.inf}[int(cls)]
    return score, tuple(int(v) for v in best)


def subset_logsumexp(log_ratios, k):
    """``(log sum_S exp(score_S), first +inf subset or None)`` over k-subsets."""
    F, pos, neg = _ratio_arrays(log_ratios)
    m, acc, n_pos, first = _impl().subset_logsumexp(F, pos, neg, int(k))
    if n_pos > 0:
        return np.inf, tuple(int(v) for v in first)
    if acc == 0.0:
        return -np.inf, None
    return float(m) + math.log(acc), None


def enumerate_outcomes(pm, qm, members, subset_edges):
    """Exhaustive sums over all weight configurations; see ``OUTCOME_FIELDS``."""
    out = _impl().enumerate_outcomes(
        np.ascontiguousarray(pm, dtype=np.float64),
        np.ascontiguousarray(qm, dtype=np.float64),
        np.ascontiguousarray(members, dtype=np.bool_),
        np.ascontiguousarray(subset_edges, dtype=np.int64),
    )
    return dict(zip(OUTCOME_FIELDS, (float(x) for x in out)))


def interval_windows(eu, ev, w, n, k):
    """Indices ``(i, j)`` of the longest qualifying window of sorted weights, or ``(-1, -1)``."""
    i, j = _impl().interval_windows(
        np.ascontiguousarray(eu, dtype=np.int64),
        np.ascontiguousarray(ev, dtype=np.int64),
        np.ascontiguousarray(w, dtype=np.float64),
        int(n),
        int(k),
    )
    return int(i), int(j)
