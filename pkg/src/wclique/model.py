"""Null and planted weighted complete graphs, plus the instance text format.

Edge weights are stored as the condensed upper triangle in lexicographic
``(i, j), i < j`` order, the same order used to draw them and to write them.
"""

import enum
import io
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np

from .rng import generator

__all__ = [
    "Hypothesis",
    "MAX_N",
    "PlantedInstance",
    "WeightedGraph",
    "edge_endpoints",
    "read_instance",
    "sample_null",
    "sample_planted",
    "write_instance",
]

MAX_N = 1 << 15


class Hypothesis(str, enum.Enum):
    H0 = "H0"
    H1 = "H1"


@lru_cache(maxsize=16)
def _triu(n):
    i, j = np.triu_indices(n, 1)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


def edge_endpoints(n):
    """Row and column index arrays of the edges in lexicographic order."""
    return _triu(int(n))


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    n: int
    weights: np.ndarray  # length n(n-1)/2, lexicographic

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if self.n < 2:
            raise ValueError("need at least 2 vertices")
        if w.shape != (self.n * (self.n - 1) // 2,):
            raise ValueError(f"expected {self.n * (self.n - 1) // 2} weights, got {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def m(self):
        return len(self.weights)

    @cached_property
    def matrix(self):
        """Symmetric n x n matrix with a zero diagonal (read-only)."""
        i, j = edge_endpoints(self.n)
        out = np.zeros((self.n, self.n))
        out[i, j] = self.weights
        out[j, i] = self.weights
        out.setflags(write=False)
        return out

    def edge_values(self, fn):
        """Apply a vectorized map to the weights and return the symmetric matrix."""
        vals = np.asarray(fn(self.weights), dtype=np.float64)
        i, j = edge_endpoints(self.n)
        out = np.zeros((self.n, self.n))
        out[i, j] = vals
        out[j, i] = vals
        return out

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.weights, other.weights)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    graph: WeightedGraph
    hypothesis: Hypothesis
    seed: int
    k: int = 0
    hidden_set: tuple = None

    def __post_init__(self):
        hyp = Hypothesis(self.hypothesis)
        object.__setattr__(self, "hypothesis", hyp)
        if hyp is Hypothesis.H1:
            if self.hidden_set is None:
                raise ValueError("H1 instance needs a hidden set")
            s = tuple(sorted(int(v) for v in self.hidden_set))
            if len(set(s)) != len(s) or len(s) != self.k:
                raise ValueError("hidden set must hold k distinct vertices")
            if s and (s[0] < 0 or s[-1] >= self.graph.n):
                raise ValueError("hidden set vertex out of range")
            object.__setattr__(self, "hidden_set", s)
        elif self.hidden_set is not None:
            raise ValueError("H0 instance cannot carry a hidden set")

    @property
    def n(self):
        return self.graph.n

    def __eq__(self, other):
        if not isinstance(other, PlantedInstance):
            return NotImplemented
        return (self.graph, self.hypothesis, self.seed, self.k, self.hidden_set) == (
            other.graph,
            other.hypothesis,
            other.seed,
            other.k,
            other.hidden_set,
        )

    __hash__ = None


def _check_n(n, max_n):
    if n < 2:
        raise ValueError("n must be at least 2")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the cap of {max_n}")


def sample_null(n, p, seed, k=0, max_n=MAX_N):
    """Draw ``G(n, P)``. ``k`` is only recorded, for file headers."""
    _check_n(n, max_n)
    rng = generator(seed)
    w = p.from_uniform(rng.random(n * (n - 1) // 2))
    return PlantedInstance(WeightedGraph(n, w), Hypothesis.H0, int(seed), int(k))


def _partial_shuffle(rng, n, k):
    perm = np.arange(n)
    for i in range(k):
        j = int(rng.integers(i, n))
        perm[i], perm[j] = perm[j], perm[i]
    return np.sort(perm[:k])


def sample_planted(n, k, pair, seed, max_n=MAX_N):
    """Draw ``G(n, k, P, Q)``: a uniform k-subset gets Q-weights inside it."""
    _check_n(n, max_n)
    if not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    rng = generator(seed)
    hidden = _partial_shuffle(rng, n, k)
    u = rng.random(n * (n - 1) // 2)
    member = np.zeros(n, dtype=bool)
    member[hidden] = True
    i, j = edge_endpoints(n)
    inside = member[i] & member[j]
    w = pair.p.from_uniform(u)
    w[inside] = pair.q.from_uniform(u[inside])
    return PlantedInstance(WeightedGraph(n, w), Hypothesis.H1, int(seed), int(k), tuple(hidden.tolist()))


def write_instance(inst, dest):
    """Write the text format: header ``n k hypothesis seed``, one weight per line
    (17 significant digits), then the hidden set on a final line for H1."""
    buf = io.StringIO()
    buf.write(f"{inst.n} {inst.k} {inst.hypothesis.value} {inst.seed}\n")
    np.savetxt(buf, inst.graph.weights, fmt="%.17g")
    if inst.hidden_set is not None:
        buf.write(" ".join(str(v) for v in inst.hidden_set) + "\n")
    text = buf.getvalue()
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text)


def read_instance(src):
    if hasattr(src, "read"):
        text = src.read()
    else:
        text = Path(src).read_text()
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty instance file")
    try:
        n_s, k_s, hyp_s, seed_s = lines[0].split()
        n, k, seed = int(n_s), int(k_s), int(seed_s)
        hyp = Hypothesis(hyp_s)
    except ValueError as exc:
        raise ValueError(f"bad instance header {lines[0]!r}") from exc
    m = n * (n - 1) // 2
    if len(lines) < 1 + m:
        raise ValueError(f"instance file has {len(lines) - 1} weight lines, expected {m}")
    weights = np.array([float(x) for x in lines[1 : 1 + m]])
    rest = [ln for ln in lines[1 + m :] if ln.strip()]
    hidden = None
    if hyp is Hypothesis.H1:
        if len(rest) != 1:
            raise ValueError("H1 instance file must end with the hidden set")
        hidden = tuple(int(v) for v in rest[0].split())
    elif rest:
        raise ValueError("unexpected trailing lines in H0 instance file")
    return PlantedInstance(WeightedGraph(n, weights), hyp, seed, k, hidden)
