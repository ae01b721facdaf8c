"""Laws on the real line and pairs of them.

A :class:`Distribution` is a finite set of atoms plus an optional absolutely
continuous part. Densities of a pair are taken against one dominating measure:
counting measure on the union of both atom sets plus Lebesgue measure. At an
atom location the "density" of a law is its point mass (zero if it has no
atom there); everywhere else it is the density of the continuous part.

Continuous parts are half-open on the right: ``Uniform(0, 1)`` has density 1 on
``[0, 1)`` and 0 at 1. Samplers follow the same convention.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .quadrature import integrate_piecewise

__all__ = [
    "Distribution",
    "DistributionPair",
    "Interval",
    "Normal",
    "PiecewiseConstant",
    "RealSet",
    "PAIR_NAMES",
    "bernoulli",
    "build_prop3_density",
    "dirac",
    "discrete",
    "kprime_from_k",
    "log_ratio",
    "make_pair",
    "named_pair",
    "normal",
    "parse_pair_spec",
    "piecewise",
    "sample",
    "uniform",
]

NORMALIZATION_TOL = 1e-9


# ---------------------------------------------------------------------------
# continuous components (normalized to total mass 1)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseConstant:
    """Density ``values[i]`` on ``[edges[i], edges[i+1])``."""

    edges: tuple
    values: tuple

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if e.ndim != 1 or v.ndim != 1 or len(e) != len(v) + 1 or len(v) == 0:
            raise ValueError("need len(edges) == len(values) + 1 >= 2")
        if not np.all(np.isfinite(e)) or not np.all(np.diff(e) > 0):
            raise ValueError("edges must be finite and strictly increasing")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("density values must be finite and nonnegative")
        object.__setattr__(self, "_e", e)
        object.__setattr__(self, "_v", v)
        cum = np.concatenate([[0.0], np.cumsum(v * np.diff(e))])
        object.__setattr__(self, "_cum", cum)

    @property
    def support(self):
        return float(self._e[0]), float(self._e[-1])

    @property
    def total_mass(self):
        return float(math.fsum(self._v * np.diff(self._e)))

    @property
    def breakpoints(self):
        return tuple(float(x) for x in self._e)

    @property
    def mean(self):
        e, v = self._e, self._v
        return float(np.sum(v * (e[1:] ** 2 - e[:-1] ** 2)) / 2.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._e, x, side="right") - 1
        inside = (idx >= 0) & (idx < len(self._v))
        out = np.where(inside, self._v[np.clip(idx, 0, len(self._v) - 1)], 0.0)
        return out

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        e, v = self._e, self._v
        idx = np.clip(np.searchsorted(e, x, side="right") - 1, 0, len(v) - 1)
        val = self._cum[idx] + v[idx] * (x - e[idx])
        return np.where(x <= e[0], 0.0, np.where(x >= e[-1], self._cum[-1], val))

    def ppf(self, u):
        u = np.asarray(u, dtype=float) * self._cum[-1]
        idx = np.clip(np.searchsorted(self._cum, u, side="right") - 1, 0, len(self._v) - 1)
        # skip zero-density pieces: searchsorted on the cumulative already lands past them
        v = self._v[idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = self._e[idx] + np.where(v > 0, (u - self._cum[idx]) / v, 0.0)
        return np.minimum(x, np.nextafter(self._e[-1], -np.inf))


@dataclass(frozen=True)
class Normal:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma) and math.isfinite(self.mu)):
            raise ValueError("normal needs finite mu and sigma > 0")

    @property
    def support(self):
        return -math.inf, math.inf

    @property
    def total_mass(self):
        return 1.0

    @property
    def breakpoints(self):
        # not discontinuities: they pin quadrature to where the mass is
        return tuple(self.mu + self.sigma * z for z in (-8.0, -2.0, 0.0, 2.0, 8.0))

    @property
    def mean(self):
        return float(self.mu)

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))

    def logpdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return -0.5 * z * z - math.log(self.sigma * math.sqrt(2.0 * math.pi))

    def cdf(self, x):
        return special.ndtr((np.asarray(x, dtype=float) - self.mu) / self.sigma)

    def ppf(self, u):
        return self.mu + self.sigma * special.ndtri(np.asarray(u, dtype=float))


# ---------------------------------------------------------------------------
# sets of reals: finite unions of intervals plus atoms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = False

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        left = x >= self.lo if self.lo_closed else x > self.lo
        right = x <= self.hi if self.hi_closed else x < self.hi
        return left & right

    def __str__(self):
        return f"{'[' if self.lo_closed else '('}{self.lo!r},{self.hi!r}{']' if self.hi_closed else ')'}"


@dataclass(frozen=True)
class RealSet:
    """``atoms ∪ (∪ intervals) \\ excluded``.

    ``excluded`` only removes points from the intervals; listed atoms are always
    members. Intervals are assumed pairwise disjoint.
    """

    atoms: tuple = ()
    intervals: tuple = ()
    excluded: tuple = ()

    @property
    def is_empty(self):
        return not self.atoms and not self.intervals

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        hit = np.zeros(x.shape, dtype=bool)
        for iv in self.intervals:
            hit |= iv.contains(x)
        if self.excluded:
            hit &= ~np.isin(x, np.asarray(self.excluded, dtype=float))
        if self.atoms:
            hit |= np.isin(x, np.asarray(self.atoms, dtype=float))
        return hit

    def to_dict(self):
        return {
            "atoms": list(self.atoms),
            "intervals": [str(iv) for iv in self.intervals],
            "excluded": list(self.excluded),
        }

    @classmethod
    def parse(cls, text):
        """Parse ``"[1,2);(3,4];{0,5}"``: intervals and ``{...}`` atom lists."""
        atoms, intervals = [], []
        for part in filter(None, (s.strip() for s in text.split(";"))):
            if part.startswith("{") and part.endswith("}"):
                atoms.extend(float(a) for a in part[1:-1].split(",") if a.strip())
                continue
            m = re.fullmatch(r"([\[(])\s*([^,]+?)\s*,\s*([^,]+?)\s*([\])])", part)
            if not m:
                raise ValueError(f"cannot parse set component {part!r}")
            lo, hi = float(m.group(2)), float(m.group(3))
            if not lo < hi:
                raise ValueError(f"empty interval {part!r}")
            intervals.append(Interval(lo, hi, m.group(1) == "[", m.group(4) == "]"))
        return cls(tuple(sorted(set(atoms))), tuple(intervals))


# ---------------------------------------------------------------------------
# Distribution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Distribution:
    """Atoms ``((location, mass), ...)`` plus an optional continuous part.

    The continuous part is a normalized component scaled by the mass left over
    after the atoms.
    """

    atoms: tuple = ()
    continuous: object = None
    label: str = ""
    mean: float = field(init=False)

    def __post_init__(self):
        atoms = tuple(sorted((float(x), float(w)) for x, w in self.atoms))
        locs = [x for x, _ in atoms]
        if len(set(locs)) != len(locs):
            raise ValueError("atom locations must be distinct")
        if any(not (0.0 < w <= 1.0) for _, w in atoms):
            raise ValueError("atom masses must lie in (0, 1]")
        if any(not math.isfinite(x) for x in locs):
            raise ValueError("atom locations must be finite")
        total = math.fsum(w for _, w in atoms)
        if self.continuous is None:
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise ValueError(f"atom masses sum to {total}, not 1")
        else:
            if total > 1.0 + NORMALIZATION_TOL:
                raise ValueError(f"atom masses sum to {total} > 1")
            lo, hi = self.continuous.support
            if not lo < hi:
                raise ValueError("continuous support needs lo < hi")
            mass = getattr(self.continuous, "total_mass", None)
            if mass is None:
                pts = [lo, hi, *self.continuous.breakpoints]
                mass, _ = integrate_piecewise(self.continuous.pdf, pts, rtol=1e-12, atol=1e-15)
            if abs(mass - 1.0) > NORMALIZATION_TOL:
                raise ValueError(f"continuous density integrates to {mass}, not 1")
        object.__setattr__(self, "atoms", atoms)
        mean = math.fsum(x * w for x, w in atoms)
        if self.continuous is not None:
            mean += self.continuous_weight * self.continuous.mean
        object.__setattr__(self, "mean", mean)

    @property
    def atom_locations(self):
        return np.array([x for x, _ in self.atoms], dtype=float)

    @property
    def atom_masses(self):
        return np.array([w for _, w in self.atoms], dtype=float)

    @property
    def continuous_weight(self):
        if self.continuous is None:
            return 0.0
        return max(0.0, 1.0 - math.fsum(w for _, w in self.atoms))

    @property
    def support(self):
        """Smallest closed interval holding all the mass."""
        lo, hi = math.inf, -math.inf
        if self.atoms:
            lo, hi = self.atoms[0][0], self.atoms[-1][0]
        if self.continuous is not None and self.continuous_weight > 0:
            clo, chi = self.continuous.support
            lo, hi = min(lo, clo), max(hi, chi)
        return lo, hi

    @property
    def breakpoints(self):
        if self.continuous is None:
            return ()
        return tuple(sorted({*self.continuous.support, *self.continuous.breakpoints}))

    def mass_at(self, x):
        """Point mass at each ``x`` (0 away from atoms)."""
        x = np.asarray(x, dtype=float)
        if not self.atoms:
            return np.zeros(x.shape)
        locs, masses = self.atom_locations, self.atom_masses
        idx = np.clip(np.searchsorted(locs, x), 0, len(locs) - 1)
        return np.where(locs[idx] == x, masses[idx], 0.0)

    def density(self, x):
        """Density of the continuous part against Lebesgue measure."""
        x = np.asarray(x, dtype=float)
        if self.continuous is None:
            return np.zeros(x.shape)
        return self.continuous_weight * self.continuous.pdf(x)

    def log_density(self, x):
        """Log of :meth:`density`, computed without underflow in the tails."""
        x = np.asarray(x, dtype=float)
        w = self.continuous_weight
        if w == 0.0:
            return np.full(x.shape, -np.inf)
        return math.log(w) + self.continuous.logpdf(x)

    def continuous_cdf(self, x):
        if self.continuous is None:
            return np.zeros(np.shape(x))
        return self.continuous_weight * self.continuous.cdf(x)

    def from_uniform(self, u):
        """Inverse-transform map from ``U[0, 1)`` draws to this law."""
        u = np.asarray(u, dtype=float)
        if not self.atoms:
            return self.continuous.ppf(u)
        locs = self.atom_locations
        cum = np.cumsum(self.atom_masses)
        idx = np.searchsorted(cum, u, side="right")
        if self.continuous is None or self.continuous_weight == 0.0:
            return locs[np.minimum(idx, len(locs) - 1)]
        atom_total = cum[-1]
        v = np.clip((u - atom_total) / (1.0 - atom_total), 0.0, np.nextafter(1.0, 0.0))
        cont = self.continuous.ppf(v)
        return np.where(idx < len(locs), locs[np.minimum(idx, len(locs) - 1)], cont)

    def prob(self, s):
        """Mass this law puts on a :class:`RealSet`."""
        total = 0.0
        if self.atoms:
            total += float(np.sum(self.atom_masses[s.contains(self.atom_locations)]))
        if self.continuous is not None and self.continuous_weight > 0:
            for iv in s.intervals:
                total += float(self.continuous_cdf(iv.hi) - self.continuous_cdf(iv.lo))
        return total

    def __str__(self):
        return self.label or repr(self)


def sample(d, rng, size=None):
    """Draw from ``d`` with a numpy ``Generator`` (scalar when ``size`` is None)."""
    out = d.from_uniform(rng.random(size))
    return float(out) if size is None else out


def dirac(x):
    return Distribution(((x, 1.0),), label=f"Dirac({x:g})")


def bernoulli(p):
    if not 0.0 < p < 1.0:
        raise ValueError(f"Bernoulli parameter must be in (0, 1), got {p}")
    return Distribution(((0.0, 1.0 - p), (1.0, p)), label=f"Bern({p:g})")


def discrete(locations, masses, label=""):
    return Distribution(tuple(zip(locations, masses)), label=label)


def uniform(a, b):
    if not a < b:
        raise ValueError("uniform needs a < b")
    return Distribution((), PiecewiseConstant((a, b), (1.0 / (b - a),)), label=f"Unif({a:g},{b:g})")


def normal(mu=0.0, sigma=1.0):
    return Distribution((), Normal(mu, sigma), label=f"N({mu:g},{sigma:g}^2)")


def piecewise(edges, values, label=""):
    return Distribution((), PiecewiseConstant(tuple(edges), tuple(values)), label=label)


def kprime_from_k(ks):
    """Running suffix minimum ``k'_n = min_{m >= n} k_m`` of a finite sequence."""
    ks = np.asarray(ks, dtype=np.int64)
    return tuple(int(x) for x in np.minimum.accumulate(ks[::-1])[::-1])


def build_prop3_density(kprime, depth):
    """Dyadic piecewise-constant density on [0, 1) for the minimum-weight test.

    For ``m = 1`` the density on ``[1/2, 1)`` is ``(1 - 1/k'_1) + 1/2``; for
    ``2 <= m <= depth`` it is ``2^{m-1}(1/k'_{m-1} - 1/k'_m) + 1/2`` on
    ``[2^-m, 2^{-(m-1)})``. The tail below ``2^-depth`` carries the remaining
    mass ``1/(2 k'_depth) + 2^-(depth+1)`` uniformly, which is the mass the
    untruncated construction puts there as ``k'`` grows without bound.
    """
    depth = int(depth)
    if depth < 2:
        raise ValueError("depth must be at least 2")
    if depth > 1000:
        raise ValueError("depth above 1000 underflows the dyadic edges")
    ks = [int(k) for k in kprime]
    if len(ks) < depth:
        raise ValueError(f"need at least {depth} entries of k', got {len(ks)}")
    ks = ks[:depth]
    if ks[0] < 1:
        raise ValueError("k'_1 must be >= 1")
    if any(b < a for a, b in zip(ks, ks[1:])):
        raise ValueError("k' must be nondecreasing")

    values = [(1.0 - 1.0 / ks[0]) + 0.5]
    for m in range(2, depth + 1):
        values.append(2.0 ** (m - 1) * (1.0 / ks[m - 2] - 1.0 / ks[m - 1]) + 0.5)
    values.append(2.0 ** (depth - 1) / ks[depth - 1] + 0.5)
    # pieces listed from the top down; edges ascend
    edges = [0.0] + [2.0 ** -m for m in range(depth, -1, -1)]
    return piecewise(edges, values[::-1], label=f"dyadic(depth={depth})")


# ---------------------------------------------------------------------------
# pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistributionPair:
    p: Distribution
    q: Distribution
    name: str = ""
    params: tuple = ()
    dominating_atoms: tuple = field(init=False)
    abs_continuous: bool = field(init=False)

    def __post_init__(self):
        locs = sorted({x for x, _ in self.p.atoms} | {x for x, _ in self.q.atoms})
        object.__setattr__(self, "dominating_atoms", tuple(locs))
        object.__setattr__(self, "abs_continuous", _q_mass_where_p_null(self.p, self.q) <= 1e-12)

    @property
    def breakpoints(self):
        return tuple(sorted({*self.p.breakpoints, *self.q.breakpoints}))

    @property
    def support(self):
        plo, phi = self.p.support
        qlo, qhi = self.q.support
        return min(plo, qlo), max(phi, qhi)

    @property
    def is_discrete(self):
        return self.p.continuous is None and self.q.continuous is None

    def spec(self):
        if not self.name:
            return ""
        return self.name + (":" + ",".join(_fmt_param(v) for v in self.params) if self.params else "")

    def finite_support(self):
        """``(locations, p_mass, q_mass)`` over the joint atom set."""
        if not self.is_discrete:
            raise ValueError("pair has a continuous part")
        locs = np.asarray(self.dominating_atoms, dtype=float)
        return locs, self.p.mass_at(locs), self.q.mass_at(locs)

    def p_value(self, x):
        """Density of P against the dominating measure."""
        x = np.asarray(x, dtype=float)
        at_atom = np.isin(x, np.asarray(self.dominating_atoms, dtype=float))
        return np.where(at_atom, self.p.mass_at(x), self.p.density(x))

    def q_value(self, x):
        x = np.asarray(x, dtype=float)
        at_atom = np.isin(x, np.asarray(self.dominating_atoms, dtype=float))
        return np.where(at_atom, self.q.mass_at(x), self.q.density(x))

    def log_p_value(self, x):
        return self._log_value(self.p, x)

    def log_q_value(self, x):
        return self._log_value(self.q, x)

    def _log_value(self, d, x):
        x = np.asarray(x, dtype=float)
        at_atom = np.isin(x, np.asarray(self.dominating_atoms, dtype=float))
        with np.errstate(divide="ignore"):
            return np.where(at_atom, np.log(d.mass_at(x)), d.log_density(x))


def _fmt_param(v):
    short = format(v, "g")
    return short if float(short) == v else repr(float(v))


def _q_mass_where_p_null(p, q):
    mass = sum(w for x, w in q.atoms if p.mass_at(x) == 0.0)
    if q.continuous is not None and q.continuous_weight > 0:
        lo, hi = q.continuous.support
        pts = {lo, hi, *q.breakpoints, *(b for b in p.breakpoints if lo < b < hi)}

        def f(x):
            return np.where(p.log_density(x) > -np.inf, 0.0, q.density(x))

        extra, _ = integrate_piecewise(f, pts, rtol=1e-10, atol=1e-15)
        mass += extra
    return mass


def make_pair(p, q, name="", params=()):
    return DistributionPair(p, q, name, tuple(float(v) for v in params))


def log_ratio(pair, x):
    """``log(q(x)/p(x))`` against the dominating measure.

    Returns ``-inf`` where only q vanishes and ``+inf`` where only p vanishes.

    Raises:
        ValueError: if both densities vanish at some ``x``.
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    lp, lq = pair.log_p_value(x), pair.log_q_value(x)
    both = (lp == -np.inf) & (lq == -np.inf)
    if np.any(both):
        bad = x[both] if x.ndim else x
        raise ValueError(f"likelihood ratio undefined at {np.ravel(bad)[:5]} (both densities vanish)")
    out = lq - lp
    return float(out) if scalar else out


PAIR_NAMES = (
    "bernoulli_dirac",
    "bernoulli_bernoulli",
    "uniform_shift",
    "gaussian_shift",
    "uniform_vs_prop3",
    "disjoint_uniform",
)

_DEFAULTS = {
    "bernoulli_dirac": (0.5,),
    "bernoulli_bernoulli": (0.5, 0.75),
    "uniform_shift": (0.5,),
    "gaussian_shift": (1.0, 1.0),
    "uniform_vs_prop3": (30, 2.0),
    "disjoint_uniform": (),
}


def named_pair(name, params=()):
    """Build one of the stock pairs by name.

    ``params`` fill positional slots; missing trailing ones take defaults:

    ========================  ==================================================
    bernoulli_dirac p         P = Bern(p), Q = Dirac(1)
    bernoulli_bernoulli p q   P = Bern(p), Q = Bern(q)
    uniform_shift s           P = Unif(0,1), Q = Unif(s, 1+s)
    gaussian_shift mu sigma   P = N(0, sigma^2), Q = N(mu, sigma^2)
    uniform_vs_prop3 d g      P = Unif(0,1), Q = dyadic density, depth d,
                              k'_m = ceil(g^(m-1))
    disjoint_uniform          P = Unif(0,1), Q = Unif(1,2)
    ========================  ==================================================
    """
    if name not in _DEFAULTS:
        raise ValueError(f"unknown pair {name!r}; choose from {', '.join(PAIR_NAMES)}")
    defaults = _DEFAULTS[name]
    params = tuple(float(v) for v in params)
    if len(params) > len(defaults):
        raise ValueError(f"{name} takes at most {len(defaults)} parameters")
    full = params + defaults[len(params):]

    if name == "bernoulli_dirac":
        (pp,) = full
        p, q = bernoulli(pp), dirac(1.0)
    elif name == "bernoulli_bernoulli":
        pp, qq = full
        p, q = bernoulli(pp), bernoulli(qq)
    elif name == "uniform_shift":
        (s,) = full
        if not math.isfinite(s):
            raise ValueError("shift must be finite")
        p, q = uniform(0.0, 1.0), uniform(s, 1.0 + s)
    elif name == "gaussian_shift":
        mu, sigma = full
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        p, q = normal(0.0, sigma), normal(mu, sigma)
    elif name == "uniform_vs_prop3":
        depth, growth = full
        if depth != int(depth) or not growth >= 1.0:
            raise ValueError("uniform_vs_prop3 needs integer depth and growth >= 1")
        ks = [math.ceil(growth ** (m - 1) - 1e-9) for m in range(1, int(depth) + 1)]
        p, q = uniform(0.0, 1.0), build_prop3_density(ks, int(depth))
    else:
        p, q = uniform(0.0, 1.0), uniform(1.0, 2.0)
    return make_pair(p, q, name, full)


def parse_pair_spec(text):
    """``"name:1,2"`` -> :func:`named_pair` result."""
    name, _, rest = text.strip().partition(":")
    params = [float(v) for v in rest.split(",") if v.strip()] if rest else []
    return named_pair(name.strip(), params)
