"""Risk of a test: Monte Carlo estimates, exact enumeration on tiny graphs,
second-moment bounds and the detection thresholds."""

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .detectors import DEFAULT_BUDGET, spectral_threshold
from .divergences import divergences
from .model import sample_null, sample_planted
from .rng import derive_seed

__all__ = [
    "ExactRisk",
    "RiskEstimate",
    "ThresholdReport",
    "bc_risk_lower_bound",
    "default_workers",
    "estimate_risk",
    "exact_lrt_risk",
    "likelihood_moments",
    "omega_n",
    "second_moment",
    "second_moment_risk_lower_bound",
    "thresholds",
]

Z95 = 1.959963984540054


def default_workers():
    """Worker count from ``WCLIQUE_WORKERS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("WCLIQUE_WORKERS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RiskEstimate:
    detector: str
    type1: float
    type2: float
    risk: float
    trials_per_hypothesis: int
    ci95_halfwidth: float
    stderr: float
    base_seed: int
    failures_null: int = 0
    failures_planted: int = 0

    def to_dict(self):
        return asdict(self)


def _halfwidth(rate, trials):
    if trials == 0 or math.isnan(rate):
        return math.nan
    if min(rate, 1.0 - rate) * trials < 10:
        # Wilson score interval half-width
        z2 = Z95 * Z95
        return Z95 * math.sqrt(rate * (1 - rate) / trials + z2 / (4 * trials * trials)) / (1 + z2 / trials)
    return Z95 * math.sqrt(rate * (1 - rate) / trials)


def _trial_seed(base_seed, hypothesis, i):
    return derive_seed(base_seed, hypothesis, i)


def _run_trials(detector, n, k, pair, base_seed, hypothesis, start, stop):
    """(decisive count, failures) for trials ``start..stop-1`` of one hypothesis.

    Under H0 the decisive count is rejections; under H1 it is acceptances.
    """
    hits = 0
    failures = 0
    for i in range(start, stop):
        seed = _trial_seed(base_seed, hypothesis, i)
        if hypothesis == 0:
            inst = sample_null(n, pair.p, seed, k)
        else:
            inst = sample_planted(n, k, pair, seed)
        try:
            verdict = detector(inst.graph)
        except (ValueError, ArithmeticError, RuntimeError):
            failures += 1
            continue
        rejected = verdict if isinstance(verdict, (bool, np.bool_)) else verdict.rejected
        if bool(rejected) == (hypothesis == 0):
            hits += 1
    return hits, failures


def _chunks(trials, workers):
    size = max(1, math.ceil(trials / (4 * workers)))
    return [(s, min(trials, s + size)) for s in range(0, trials, size)]


def estimate_risk(detector, n, k, pair, trials, seed, workers=None, hypotheses=(0, 1)):
    """Monte Carlo Type I / Type II rates of ``detector``.

    ``detector`` maps a :class:`~wclique.model.WeightedGraph` to a verdict
    (anything with ``.rejected``) or a bool meaning "reject". Trial ``i`` under
    hypothesis ``h`` uses seed ``derive_seed(seed, h, i)``, so results do not
    depend on ``workers``. Trials whose detector raises are counted as failures
    and left out of the rates. Pass ``hypotheses=(0,)`` to skip planted draws;
    the Type II rate is then NaN.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    workers = default_workers() if workers is None else max(1, int(workers))
    counts = {}
    for h in (0, 1):
        if h not in hypotheses:
            counts[h] = (0, 0)
            continue
        if workers == 1:
            counts[h] = _run_trials(detector, n, k, pair, seed, h, 0, trials)
            continue
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_trials, detector, n, k, pair, seed, h, a, b) for a, b in _chunks(trials, workers)
            ]
            parts = [f.result() for f in futures]
        counts[h] = (sum(p[0] for p in parts), sum(p[1] for p in parts))

    def rate(h):
        hits, fails = counts[h]
        done = trials - fails
        if h not in hypotheses or done == 0:
            return math.nan, 0
        return hits / done, done

    t1, n1 = rate(0)
    t2, n2 = rate(1)
    hw = math.sqrt(sum(_halfwidth(r, m) ** 2 for r, m in ((t1, n1), (t2, n2)) if m))
    se = math.sqrt(sum(r * (1 - r) / m for r, m in ((t1, n1), (t2, n2)) if m))
    name = getattr(detector, "name", getattr(detector, "__name__", "custom"))
    return RiskEstimate(
        detector=str(name),
        type1=t1,
        type2=t2,
        risk=t1 + t2,
        trials_per_hypothesis=int(trials),
        ci95_halfwidth=hw,
        stderr=se,
        base_seed=int(seed),
        failures_null=counts[0][1],
        failures_planted=counts[1][1],
    )


# ---------------------------------------------------------------------------
# exact enumeration on tiny graphs
# ---------------------------------------------------------------------------


class ExactRisk(NamedTuple):
    risk: float  # R(T*)
    half_l1: float  # E0|L - 1| / 2
    root_likelihood: float  # E0 sqrt(L)


def _subset_tables(n, k):
    m = n * (n - 1) // 2

    def edge_id(i, j):
        return i * n - i * (i + 1) // 2 + (j - i - 1)

    subsets = list(itertools.combinations(range(n), k))
    members = np.zeros((len(subsets), m), dtype=bool)
    edges = np.zeros((len(subsets), k * (k - 1) // 2), dtype=np.int64)
    for s, sub in enumerate(subsets):
        ids = [edge_id(i, j) for i, j in itertools.combinations(sub, 2)]
        edges[s] = ids
        members[s, ids] = True
    return members, edges


def likelihood_moments(n, k, pair, budget=DEFAULT_BUDGET):
    """Sums over every weight configuration of a finite-support pair.

    Keys are listed in :data:`wclique.kernels.OUTCOME_FIELDS`.
    """
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    _, pm, qm = pair.finite_support()
    m = n * (n - 1) // 2
    if len(pm) ** m > budget:
        raise ValueError(f"{len(pm)}^{m} outcomes exceeds the budget of {budget}")
    members, edges = _subset_tables(n, k)
    return kernels.enumerate_outcomes(pm, qm, members, edges)


def exact_lrt_risk(n, k, pair, budget=DEFAULT_BUDGET, tol=1e-12):
    """Exact ``R(T*)``, ``E0|L-1|/2`` and ``E0 sqrt(L)`` by full enumeration.

    ``R(T*)`` is summed directly as ``P0(L > 1) + P1(L <= 1)`` with the
    planted probabilities computed from the mixture over subsets, then checked
    against ``1 - TV(P0, P1)`` (and against ``1 - E0|L-1|/2`` when Q << P).
    """
    mo = likelihood_moments(n, k, pair, budget)
    risk = mo["p0_reject"] + mo["p1_accept"]
    half_l1 = 0.5 * mo["e0_abs_L_minus_1"]
    if abs(risk - (1.0 - mo["tv_p0_p1"])) > tol:
        raise ArithmeticError(f"R(T*) = {risk} but 1 - TV = {1.0 - mo['tv_p0_p1']}")
    if pair.abs_continuous and abs(risk - (1.0 - half_l1)) > tol:
        raise ArithmeticError(f"R(T*) = {risk} but 1 - E0|L-1|/2 = {1.0 - half_l1}")
    return ExactRisk(risk, half_l1, mo["e0_sqrtL"])


# ---------------------------------------------------------------------------
# second moment and thresholds
# ---------------------------------------------------------------------------


def _log_comb(n, k):
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _logsumexp(xs):
    xs = [x for x in xs if x != -math.inf]
    if not xs:
        return -math.inf
    top = max(xs)
    if top == math.inf:
        return math.inf
    return top + math.log(math.fsum(math.exp(x - top) for x in xs))


def second_moment(n, k, rho):
    """``(E0[L^2], sum_{i>=1} C(k,i) C(n-k,k-i) / C(n,k) * rho^C(i,2))``.

    The first is the full hypergeometric sum (including ``i = 0``); the second
    bounds ``E0[L^2] - 1``. Both are evaluated in log space.
    """
    if not rho >= 1.0:
        raise ValueError(f"rho must be >= 1, got {rho}")
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    log_rho = math.log(rho)
    base = _log_comb(n, k)
    terms = [
        _log_comb(k, i) + _log_comb(n - k, k - i) - base + (i * (i - 1) // 2) * log_rho for i in range(k + 1)
    ]
    return _exp(_logsumexp(terms)), _exp(_logsumexp(terms[1:]))


def _exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def second_moment_risk_lower_bound(n, k, rho):
    """``1 - sqrt(E0[L^2] - 1)``, clipped to [0, 1]."""
    e2, _ = second_moment(n, k, rho)
    return min(1.0, max(0.0, 1.0 - math.sqrt(max(e2 - 1.0, 0.0))))


def bc_risk_lower_bound(k, pair=None, bc=None):
    """``1 - sqrt(1 - BC^(2 C(k,2)))`` from the Bhattacharyya coefficient."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if bc is None:
        bc = divergences(pair).bhattacharyya
    bc = min(max(bc, 0.0), 1.0)
    return 1.0 - math.sqrt(max(0.0, 1.0 - bc ** (k * (k - 1))))


def omega_n(n, rho):
    """``2 log_rho n - 2 log_rho log_rho n - 1 + 2 log_rho e``.

    For ``rho = inf`` every ``log_rho`` term vanishes and the limit ``-1`` is
    returned.
    """
    if not rho > 1.0:
        raise ValueError("omega_n needs rho > 1")
    if math.isinf(rho):
        return -1.0
    lr = math.log(rho)
    ln = math.log(n) / lr
    return 2 * ln - 2 * math.log(ln) / lr - 1 + 2 / lr


@dataclass(frozen=True)
class ThresholdReport:
    n: int
    epsilon: float
    delta: float
    kl: float
    rho: float
    tv: float
    mean_gap: float
    kl_threshold_k: float
    omega_n: float
    chi2_indist_k: int
    spectral_k_T1: float
    spectral_k_T2: float
    spectral_threshold_T1: float
    spectral_threshold_T2: float
    bc_k: int
    bc_risk_lower_bound: float
    spectral_constants_asymptotic: bool = True

    def to_dict(self):
        return asdict(self)


def thresholds(n, pair, epsilon=1.0, delta=0.1, bc_k=2, log_constant=1.0, report=None):
    """Clique sizes at which the known bounds kick in for ``pair`` at size ``n``.

    The spectral sizes drop the ``(1 + o(1))`` factor, so they are the leading
    term only (flagged by ``spectral_constants_asymptotic``). When KL is infinite
    the scan threshold falls back to ``log_constant * log n``.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    rep = divergences(pair) if report is None else report
    if not rep.rho > 1.0:
        raise ValueError("rho <= 1: P and Q agree in chi-squared, nothing to detect")
    log_n = math.log(n)
    kl_k = (2 + epsilon) * log_n / rep.kl if math.isfinite(rep.kl) else log_constant * log_n
    om = omega_n(n, rep.rho)
    indist = math.floor(om - epsilon)
    t1 = spectral_threshold(n, delta, 1.0)
    lo, hi = pair.support
    width = hi - lo
    gap = abs(pair.q.mean - pair.p.mean)
    t2 = spectral_threshold(n, delta, width) if math.isfinite(width) else math.inf
    k_t1 = t1 / rep.tv if rep.tv > 0 else math.inf
    k_t2 = t2 / gap if gap > 0 and math.isfinite(t2) else math.inf
    return ThresholdReport(
        n=int(n),
        epsilon=float(epsilon),
        delta=float(delta),
        kl=rep.kl,
        rho=rep.rho,
        tv=rep.tv,
        mean_gap=gap,
        kl_threshold_k=kl_k,
        omega_n=om,
        chi2_indist_k=indist,
        spectral_k_T1=k_t1,
        spectral_k_T2=k_t2,
        spectral_threshold_T1=t1,
        spectral_threshold_T2=t2,
        bc_k=int(bc_k),
        bc_risk_lower_bound=bc_risk_lower_bound(bc_k, bc=rep.bhattacharyya),
    )
