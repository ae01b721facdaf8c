"""Spectral norm of a symmetric matrix."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .rng import generator

__all__ = ["NormConvergenceError", "NormResult", "operator_norm", "power_iteration"]

DENSE_CUTOFF = 64


class NormConvergenceError(RuntimeError):
    def __init__(self, msg, estimate, iterations):
        super().__init__(msg)
        self.estimate = estimate
        self.iterations = iterations


@dataclass(frozen=True)
class NormResult:
    value: float
    converged: bool
    iterations: int
    method: str


def _start_vector(n, seed):
    v = generator(seed).standard_normal(n)
    return v / np.linalg.norm(v)


def power_iteration(m, rel_tol=1e-8, shift=0.0, seed=0, max_iter=None):
    """Top eigenvalue of ``m + shift*I`` for a positive semidefinite shift.

    Stops once successive Rayleigh quotients agree to ``rel_tol``. Returns
    ``(eigenvalue, converged, iterations)``.
    """
    n = m.shape[0]
    if max_iter is None:
        max_iter = 10 * n + 1000
    v = _start_vector(n, seed)
    prev = None
    rq = 0.0
    for it in range(1, max_iter + 1):
        w = m @ v
        if shift:
            w = w + shift * v
        rq = float(v @ w)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0, True, it
        v = w / norm
        if prev is not None and abs(rq - prev) <= rel_tol * abs(rq):
            return rq, True, it
        prev = rq
    return rq, False, max_iter


def _power_norm(m, rel_tol, seed, max_iter):
    # ||M v|| over unit v climbs monotonically to the largest |eigenvalue|, and
    # a +-lambda pair cannot make it oscillate. No shift, so the contraction
    # rate is (lambda_2 / lambda_1)^2 rather than something near 1.
    n = m.shape[0]
    if max_iter is None:
        max_iter = 10 * n + 1000
    v = _start_vector(n, seed)
    prev = None
    est = 0.0
    for it in range(1, max_iter + 1):
        w = m @ v
        est = float(np.linalg.norm(w))
        if est == 0.0:
            return 0.0, True, it
        v = w / est
        if prev is not None and est - prev <= rel_tol * est:
            return est, True, it
        prev = est
    return est, False, max_iter


def _lanczos_norm(m, rel_tol, seed, max_iter):
    n = m.shape[0]
    if max_iter is None:
        max_iter = 10 * n + 1000
    v0 = _start_vector(n, seed)
    try:
        # largest magnitude is the norm itself; about 3x cheaper than both ends
        vals = eigsh(m, k=1, which="LM", v0=v0, tol=rel_tol, maxiter=max_iter, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        vals = exc.eigenvalues
        best = float(np.max(np.abs(vals))) if len(vals) else math.nan
        return best, False, max_iter
    return float(np.max(np.abs(vals))), True, -1


def operator_norm(m, rel_tol=1e-8, method="auto", seed=0, max_iter=None, full_output=False):
    """Largest absolute eigenvalue of the symmetric matrix ``m``.

    ``method`` is ``"dense"`` (full eigendecomposition), ``"power"`` (power
    iteration tracking ``||m v||``),
    ``"lanczos"`` (ARPACK, largest magnitude) or ``"auto"``: dense up to
    n = 64, Lanczos above.

    With ``full_output`` a :class:`NormResult` is returned and failure to
    converge is only flagged; otherwise it raises :class:`NormConvergenceError`
    carrying the best estimate.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("need a square matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    n = m.shape[0]
    if method == "auto":
        method = "dense" if n <= DENSE_CUTOFF else "lanczos"
    if method == "lanczos" and n < 4:
        method = "dense"
    if method not in ("dense", "power", "lanczos"):
        raise ValueError(f"unknown method {method!r}")
    if not m.any():
        # ARPACK rejects the zero operator outright
        return NormResult(0.0, True, 0, method) if full_output else 0.0

    if method == "dense":
        value = float(np.max(np.abs(np.linalg.eigvalsh(m)))) if n else 0.0
        result = NormResult(value, True, 0, "dense")
    elif method == "power":
        value, ok, its = _power_norm(m, rel_tol, seed, max_iter)
        result = NormResult(value, ok, its, "power")
    elif method == "lanczos":
        value, ok, its = _lanczos_norm(m, rel_tol, seed, max_iter)
        result = NormResult(value, ok, its, "lanczos")
    else:
        raise ValueError(f"unknown method {method!r}")

    if full_output:
        return result
    if not result.converged:
        raise NormConvergenceError(
            f"{result.method} did not converge; best estimate {result.value}", result.value, result.iterations
        )
    return result.value
