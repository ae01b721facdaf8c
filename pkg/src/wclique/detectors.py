"""Tests for a planted subset in a weighted complete graph.

Every test returns a :class:`TestVerdict`. All of them accept H0 when the
statistic ties the threshold.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .distributions import RealSet, log_ratio
from .divergences import null_set, tv_via_density_set
from .linalg import operator_norm
from .model import WeightedGraph, edge_endpoints

__all__ = [
    "DETECTORS",
    "BudgetExceeded",
    "Decision",
    "Detector",
    "TestVerdict",
    "exact_lrt",
    "interval_false_alarm_bound",
    "interval_scan_test",
    "make_detector",
    "min_test",
    "scan_test",
    "spectral_test_T1",
    "spectral_test_T2",
    "spectral_threshold",
    "support_test",
]

DEFAULT_BUDGET = 10**8


class BudgetExceeded(ValueError):
    """Exhaustive enumeration would exceed the configured budget."""


class Decision(str, enum.Enum):
    ACCEPT = "accept_H0"
    REJECT = "reject_H0"


@dataclass(frozen=True)
class TestVerdict:
    __test__ = False  # not a pytest class

    detector: str
    decision: Decision
    statistic: float
    threshold: float
    direction: str = "greater"
    witness: dict = None
    details: dict = field(default_factory=dict)

    @property
    def rejected(self):
        return self.decision is Decision.REJECT

    def to_dict(self):
        return {
            "detector": self.detector,
            "decision": self.decision.value,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "direction": self.direction,
            "witness": self.witness,
            "details": self.details,
        }


def _verdict(name, statistic, threshold, direction="greater", witness=None, **details):
    if direction == "greater":
        reject = statistic > threshold
    else:
        reject = statistic < threshold
    return TestVerdict(
        name, Decision.REJECT if reject else Decision.ACCEPT, float(statistic), float(threshold), direction, witness, details
    )


def _check_budget(n, k, budget):
    count = math.comb(n, k)
    if count > budget:
        raise BudgetExceeded(f"C({n},{k}) = {count} subsets exceeds the budget of {budget}")


def _check_k(g, k):
    if not 2 <= k <= g.n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={g.n}")


def support_test(g, set_a, p=None):
    """Reject iff some edge weight falls in ``set_a``, a set P should never hit.

    If ``p`` is given, ``P(set_a) = 0`` is checked.
    """
    if set_a.is_empty:
        raise ValueError("empty set descriptor")
    if p is not None:
        mass = p.prob(set_a)
        if mass > 0:
            raise ValueError(f"P puts mass {mass} on the set; the test needs P(A) = 0")
    hits = set_a.contains(g.weights)
    count = int(np.count_nonzero(hits))
    witness = None
    if count:
        i, j = edge_endpoints(g.n)
        verts = np.union1d(i[hits], j[hits])
        witness = {"vertices": verts.tolist()}
    return _verdict("support", count, 0, witness=witness)


def _log_ratio_matrix(g, pair):
    return g.edge_values(lambda w: log_ratio(pair, w))


def scan_test(g, pair, k, budget=DEFAULT_BUDGET):
    """Maximum over k-subsets of the summed edge log-likelihood ratios.

    Rejects when it exceeds ``k log n``. Enumeration is exhaustive.
    """
    _check_k(g, k)
    _check_budget(g.n, k, budget)
    score, subset = kernels.subset_max(_log_ratio_matrix(g, pair), k)
    return _verdict("scan", score, k * math.log(g.n), witness={"vertices": list(subset)})


def exact_lrt(g, pair, k, budget=DEFAULT_BUDGET):
    """Log of the likelihood ratio averaged over all k-subsets, threshold 0."""
    _check_k(g, k)
    _check_budget(g.n, k, budget)
    lse, plus_subset = kernels.subset_logsumexp(_log_ratio_matrix(g, pair), k)
    if plus_subset is not None:
        return _verdict("lrt", math.inf, 0.0, witness={"vertices": list(plus_subset)})
    stat = lse - math.log(math.comb(g.n, k)) if math.isfinite(lse) else lse
    return _verdict("lrt", stat, 0.0)


def spectral_threshold(n, delta, width=1.0):
    """``4 (b - a) sqrt(n log 9 + log(4/delta))``."""
    return 4.0 * width * math.sqrt(math.log(9.0) * n + math.log(4.0 / delta))


def spectral_test_T2(g, mu_p, support, delta, method="auto", rel_tol=1e-8):
    """Norm of the weights minus their null mean, for laws on ``[a, b]``."""
    a, b = float(support[0]), float(support[1])
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError(f"T2 needs a bounded support [a, b], got [{a}, {b}]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    w = g.weights
    if w.size and (w.min() < a or w.max() > b):
        raise ValueError(f"edge weights leave the support [{a}, {b}]")
    centered = g.matrix - mu_p
    np.fill_diagonal(centered, 0.0)
    res = operator_norm(centered, rel_tol=rel_tol, method=method, full_output=True)
    return _verdict(
        "t2",
        res.value,
        spectral_threshold(g.n, delta, b - a),
        converged=res.converged,
        norm_method=res.method,
    )


def spectral_test_T1(g, set_a, p_of_A, delta, q_of_A=None, method="auto", rel_tol=1e-8):
    """T2 applied to the indicator matrix of ``set_a`` with null mean ``P(A)``."""
    if not 0.0 <= p_of_A <= 1.0:
        raise ValueError("p_of_A must lie in [0, 1]")
    z = WeightedGraph(g.n, set_a.contains(g.weights).astype(np.float64))
    v = spectral_test_T2(z, p_of_A, (0.0, 1.0), delta, method=method, rel_tol=rel_tol)
    details = dict(v.details)
    if q_of_A is not None:
        details["separation"] = p_of_A - q_of_A
    return TestVerdict("t1", v.decision, v.statistic, v.threshold, v.direction, None, details)


def interval_scan_test(g, k):
    """Look for a weight interval whose edges number >= k yet touch <= k vertices.

    Only contiguous windows of the stably sorted weights are searched, and
    window ends never split tied weights. The witness is the longest
    qualifying window (earliest on ties).
    """
    if not 2 <= k <= g.n / 2:
        raise ValueError(f"need 2 <= k <= n/2, got k={k}, n={g.n}")
    order = np.argsort(g.weights, kind="stable")
    w = g.weights[order]
    i_all, j_all = edge_endpoints(g.n)
    eu, ev = i_all[order], j_all[order]
    lo, hi = kernels.interval_windows(eu, ev, w, g.n, k)
    if lo < 0:
        return _verdict("interval", 0, k - 1)
    verts = np.union1d(eu[lo : hi + 1], ev[lo : hi + 1])
    witness = {"vertices": verts.tolist(), "interval": [float(w[lo]), float(w[hi])]}
    return _verdict("interval", hi - lo + 1, k - 1, witness=witness)


def interval_false_alarm_bound(n, k):
    """``n^4 C(n, k) / C(C(n, 2), k)``, the union bound on the interval test's Type I error."""
    m = n * (n - 1) // 2
    log_b = 4 * math.log(n) + _log_comb(n, k) - _log_comb(m, k)
    return math.exp(log_b)


def _log_comb(n, k):
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def min_test(g):
    """Reject iff the smallest weight is below ``2^-n``."""
    if g.n > 1022:
        raise ValueError("2^-n underflows the double range for n > 1022")
    return _verdict("min", float(np.min(g.weights)), 2.0 ** (-g.n), direction="less")


# ---------------------------------------------------------------------------
# configured detectors for the risk harness and CLI
# ---------------------------------------------------------------------------

DETECTORS = ("support", "scan", "t1", "t2", "interval", "min", "lrt")


@dataclass(frozen=True)
class Detector:
    """A test bound to its parameters; calling it on a graph returns a verdict."""

    name: str
    pair: object
    k: int = 0
    delta: float = 0.1
    budget: int = DEFAULT_BUDGET
    set_a: RealSet = None
    p_of_A: float = 0.0
    q_of_A: float = 0.0
    norm_method: str = "auto"

    def __call__(self, g):
        name = self.name
        if name == "support":
            return support_test(g, self.set_a)
        if name == "scan":
            return scan_test(g, self.pair, self.k, self.budget)
        if name == "lrt":
            return exact_lrt(g, self.pair, self.k, self.budget)
        if name == "t1":
            return spectral_test_T1(g, self.set_a, self.p_of_A, self.delta, self.q_of_A, method=self.norm_method)
        if name == "t2":
            return spectral_test_T2(g, self.pair.p.mean, self.pair.support, self.delta, method=self.norm_method)
        if name == "interval":
            return interval_scan_test(g, self.k)
        if name == "min":
            return min_test(g)
        raise ValueError(f"unknown detector {name!r}")


def make_detector(name, pair, k=0, delta=0.1, budget=DEFAULT_BUDGET, set_a=None, norm_method="auto"):
    """Resolve everything a test needs from the pair once, up front.

    ``support`` defaults to the set where P vanishes and Q does not; ``t1``
    defaults to ``{p > q}``. A caller-supplied ``set_a`` replaces either.
    """
    if name not in DETECTORS:
        raise ValueError(f"unknown detector {name!r}; choose from {', '.join(DETECTORS)}")
    p_of_A = q_of_A = 0.0
    if name == "support":
        if set_a is None:
            set_a = null_set(pair)
        if set_a.is_empty:
            raise ValueError("Q << P: there is no P-null set for the support test")
        if pair.p.prob(set_a) > 0:
            raise ValueError("P puts mass on the support-test set")
    elif name == "t1":
        if set_a is None:
            _, set_a = tv_via_density_set(pair)
        p_of_A, q_of_A = pair.p.prob(set_a), pair.q.prob(set_a)
    elif name == "t2":
        lo, hi = pair.support
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("t2 needs bounded support; this pair is unbounded")
    return Detector(name, pair, int(k), float(delta), int(budget), set_a, p_of_A, q_of_A, norm_method)
