"""Divergences between the two laws of a pair and the set where p exceeds q."""

import math
from dataclasses import asdict, dataclass

import numpy as np

from .distributions import Interval, RealSet, discrete, make_pair
from .quadrature import NonFiniteIntegrand, integrate_piecewise

__all__ = [
    "DivergenceReport",
    "check_relations",
    "divergences",
    "null_set",
    "random_discrete_pair",
    "tv_via_density_set",
]

SCAN_POINTS = 4096
ROOT_TOL = 1e-12
RTOL = 1e-9


@dataclass(frozen=True)
class DivergenceReport:
    tv: float
    kl: float
    chi2: float
    hellinger_sq: float
    bhattacharyya: float
    rho: float

    def to_dict(self):
        return asdict(self)


# ---------------------------------------------------------------------------
# partition of the line into pieces where sign(p - q) is constant
# ---------------------------------------------------------------------------


def _segment_grid(a, b, num):
    if math.isfinite(a) and math.isfinite(b):
        return np.linspace(a, b, num)[1:-1]
    lo = math.atan(a) if math.isfinite(a) else -math.pi / 2
    hi = math.atan(b) if math.isfinite(b) else math.pi / 2
    return np.tan(np.linspace(lo, hi, num)[1:-1])


def _bisect(f, lo, hi, f_lo):
    while hi - lo > ROOT_TOL * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        f_mid = float(f(mid))
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _cut_points(pair, budget):
    """Breakpoints plus sign changes of the continuous density difference."""
    pts = set(pair.breakpoints)
    if not pts:
        return []

    def diff(x):
        return pair.p.density(x) - pair.q.density(x)

    found = []
    ordered = sorted(pts)
    for a, b in zip(ordered[:-1], ordered[1:]):
        xs = _segment_grid(a, b, SCAN_POINTS)
        d = diff(xs)
        nz = np.flatnonzero(d)
        if len(nz) < 2:
            continue
        signs = np.sign(d[nz])
        for j in np.flatnonzero(signs[:-1] != signs[1:]):
            i0, i1 = nz[j], nz[j + 1]
            if i1 == i0 + 1:
                found.append(_bisect(diff, xs[i0], xs[i1], d[i0]))
            else:
                found.extend([xs[i0 + 1], xs[i1 - 1]])
            if len(found) > budget:
                raise ValueError(f"density difference changes sign more than {budget} times")
    return sorted(pts | set(float(x) for x in found))


def _representative(a, b):
    if math.isfinite(a) and math.isfinite(b):
        return 0.5 * (a + b)
    if math.isfinite(b):
        return b - 1.0 - abs(b)
    if math.isfinite(a):
        return a + 1.0 + abs(a)
    return 0.0


def _intervals_where(pair, cuts, predicate):
    """Half-open intervals between consecutive cuts on which ``predicate`` holds."""
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        x = _representative(a, b)
        if not predicate(float(pair.p.density(x)), float(pair.q.density(x))):
            continue
        if out and out[-1][1] == a:
            out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return [Interval(a, b) for a, b in out]


def _atoms_inside(atoms, intervals):
    return tuple(x for x in atoms if any(bool(iv.contains(x)) for iv in intervals))


def tv_via_density_set(pair, budget=64):
    """Return ``(P(A) - Q(A), A)`` for ``A = {x : p(x) > q(x)}``.

    ``A`` is described by the atoms where P's mass beats Q's plus the
    intervals where the continuous density of P beats that of Q, found by a
    sign scan of the difference refined by bisection.

    Raises:
        ValueError: the difference has more than ``budget`` sign changes, or
            ``A`` needs more than ``budget`` intervals.
    """
    locs = np.asarray(pair.dominating_atoms, dtype=float)
    pm, qm = pair.p.mass_at(locs), pair.q.mass_at(locs)
    cuts = _cut_points(pair, budget)
    intervals = _intervals_where(pair, cuts, lambda p, q: p > q)
    if len(intervals) > budget:
        raise ValueError(f"set needs {len(intervals)} intervals, budget is {budget}")
    winners = tuple(float(x) for x in locs[pm > qm])
    losers = tuple(float(x) for x in locs[pm <= qm])
    region = RealSet(winners, tuple(intervals), _atoms_inside(losers, intervals))
    value = float(np.sum(pm[pm > qm] - qm[pm > qm]))
    for iv in intervals:
        value += float(pair.p.continuous_cdf(iv.hi) - pair.p.continuous_cdf(iv.lo))
        value -= float(pair.q.continuous_cdf(iv.hi) - pair.q.continuous_cdf(iv.lo))
    return value, region


def null_set(pair, budget=64):
    """``{x : p(x) = 0 < q(x)}`` as a :class:`RealSet` (empty when Q << P)."""
    locs = np.asarray(pair.dominating_atoms, dtype=float)
    pm, qm = pair.p.mass_at(locs), pair.q.mass_at(locs)
    cuts = _cut_points(pair, budget)
    intervals = _intervals_where(pair, cuts, lambda p, q: p == 0.0 and q > 0.0)
    q_only = tuple(float(x) for x in locs[(pm == 0) & (qm > 0)])
    p_atoms = tuple(float(x) for x in locs[pm > 0])
    return RealSet(q_only, tuple(intervals), _atoms_inside(p_atoms, intervals))


# ---------------------------------------------------------------------------
# the five divergences
# ---------------------------------------------------------------------------


def _integral(f, cuts):
    if len(cuts) < 2:
        return 0.0
    value, _ = integrate_piecewise(f, cuts, rtol=RTOL, atol=1e-15)
    return value


def divergences(pair):
    """TV, KL(Q||P), chi^2(Q||P), squared Hellinger, Bhattacharyya and rho.

    Atom contributions are exact sums over the joint atom set; continuous
    contributions come from adaptive Simpson split at every breakpoint and at
    each sign change of ``p - q``. KL and chi^2 are ``inf`` unless Q << P.

    Raises:
        wclique.quadrature.IntegrationError: a continuous integral did not
            converge.
    """
    locs = np.asarray(pair.dominating_atoms, dtype=float)
    pm, qm = pair.p.mass_at(locs), pair.q.mass_at(locs)
    cuts = _cut_points(pair, budget=10**6)
    p, q = pair.p.density, pair.q.density

    tv = 0.5 * float(np.sum(np.abs(pm - qm))) + 0.5 * _integral(lambda x: np.abs(p(x) - q(x)), cuts)
    hell = 0.5 * float(np.sum((np.sqrt(qm) - np.sqrt(pm)) ** 2))
    hell += 0.5 * _integral(lambda x: (np.sqrt(q(x)) - np.sqrt(p(x))) ** 2, cuts)
    bc = float(np.sum(np.sqrt(pm * qm))) + _integral(lambda x: np.sqrt(p(x) * q(x)), cuts)

    if pair.abs_continuous:
        pos = qm > 0
        kl = float(np.sum(qm[pos] * np.log(qm[pos] / pm[pos])))
        live = pm > 0
        chi2 = float(np.sum((qm[live] - pm[live]) ** 2 / pm[live]))

        lp, lq = pair.p.log_density, pair.q.log_density

        def kl_density(x):
            lpx, lqx = lp(x), lq(x)
            with np.errstate(invalid="ignore"):
                val = np.exp(lqx) * (lqx - lpx)
            return np.where(lqx > -np.inf, val, 0.0)

        def chi2_density(x):
            # p (q/p - 1)^2, switching to q^2/p once q/p is astronomically large
            lpx, lqx = lp(x), lq(x)
            with np.errstate(invalid="ignore", over="ignore"):
                d = lqx - lpx
                near = np.exp(lpx) * np.expm1(np.minimum(d, 300.0)) ** 2
                far = np.exp(2.0 * lqx - lpx)
                val = np.where(d < 300.0, near, far)
            return np.where(lpx > -np.inf, val, 0.0)

        kl += _integral(kl_density, cuts)
        try:
            chi2 += _integral(chi2_density, cuts)
        except NonFiniteIntegrand:
            # q^2/p overflows a double, so chi^2 does too
            chi2 = math.inf
    else:
        kl = chi2 = math.inf
    # quadrature error can push the bounded ones a hair outside [0, 1]
    tv, hell, bc = (min(max(v, 0.0), 1.0) for v in (tv, hell, bc))
    return DivergenceReport(
        tv=tv, kl=kl, chi2=chi2, hellinger_sq=hell, bhattacharyya=bc, rho=chi2 + 1.0
    )


def check_relations(report, tol=1e-9):
    """Names of the standard divergence relations that ``report`` violates."""
    r = report
    bad = []
    if abs(r.hellinger_sq - (1.0 - r.bhattacharyya)) > tol:
        bad.append("hellinger_eq_1_minus_bc")
    if math.isfinite(r.chi2):
        if r.kl > math.log1p(r.chi2) + tol:
            bad.append("kl_le_log1p_chi2")
        if math.log1p(r.chi2) > r.chi2 + tol:
            bad.append("log1p_chi2_le_chi2")
    if r.hellinger_sq > r.tv + tol:
        bad.append("hellinger_sq_le_tv")
    if r.tv > math.sqrt(2.0) * math.sqrt(max(r.hellinger_sq, 0.0)) + tol:
        bad.append("tv_le_sqrt2_hellinger")
    for name in ("tv", "hellinger_sq", "bhattacharyya"):
        v = getattr(r, name)
        if not (-tol <= v <= 1.0 + tol):
            bad.append(f"{name}_in_unit_interval")
    if r.kl < -tol or r.chi2 < -tol:
        bad.append("nonnegative")
    return bad


def random_discrete_pair(rng, max_support=8):
    """Two laws on a common random support of size ``1..max_support``."""
    s = int(rng.integers(1, max_support + 1))
    locs = np.sort(rng.choice(64, size=s, replace=False)).astype(float)
    pw = rng.random(s) + 1e-12
    qw = rng.random(s) + 1e-12
    return make_pair(discrete(locs, pw / pw.sum()), discrete(locs, qw / qw.sum()))
