"""Adaptive Simpson quadrature, vectorized over subintervals.

Every level of refinement evaluates the integrand once on the midpoints of all
still-active subintervals, so integrands are expected to accept and return
numpy arrays. Infinite endpoints are handled by the substitution
``x = tan(theta)``. Jump discontinuities must be passed as breakpoints; the
routine does not hunt for them.
"""

import math

import numpy as np

__all__ = ["IntegrationError", "adaptive_simpson", "integrate_piecewise"]

_HALF_PI = math.pi / 2.0
# tan() of this is ~1e12; any density in this package is 0 there.
_THETA_EDGE = _HALF_PI - 1e-12


class IntegrationError(RuntimeError):
    """Adaptive refinement hit its level or interval cap before converging."""


class NonFiniteIntegrand(IntegrationError):
    """The integrand returned inf or NaN (for example after overflow)."""


def _transformed(f, a, b):
    if math.isfinite(a) and math.isfinite(b):
        return f, a, b

    def g(theta):
        x = np.tan(theta)
        # overflow here surfaces as NonFiniteIntegrand below
        with np.errstate(over="ignore"):
            return f(x) / np.cos(theta) ** 2

    lo = math.atan(a) if math.isfinite(a) else -_THETA_EDGE
    hi = math.atan(b) if math.isfinite(b) else _THETA_EDGE
    if a == math.inf or b == -math.inf:
        raise ValueError("empty integration range")
    return g, lo, hi


def adaptive_simpson(f, a, b, rtol=1e-9, atol=1e-14, max_level=52, max_active=1 << 20, initial=8):
    """Integrate a vectorized ``f`` over ``[a, b]``.

    Acceptance per subinterval uses the classic ``|S2 - S1| <= 15 * tol_i``
    test with the global tolerance ``max(atol, rtol * |I|)`` shared out in
    proportion to width, and the accepted value carries the Richardson
    correction. Returns ``(value, error_estimate)``.

    Raises:
        IntegrationError: refinement did not converge within ``max_level``
            halvings or the active set grew past ``max_active``.
    """
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, err = adaptive_simpson(f, b, a, rtol, atol, max_level, max_active, initial)
        return -value, err
    g, lo, hi = _transformed(f, a, b)
    total_width = hi - lo

    edges = np.linspace(lo, hi, initial + 1)
    left, right = edges[:-1], edges[1:]
    mid = 0.5 * (left + right)
    # one-sided values at the segment ends: densities jump at breakpoints
    probe = edges.copy()
    probe[0] = np.nextafter(lo, hi)
    probe[-1] = np.nextafter(hi, lo)
    f_edges = np.asarray(g(probe), dtype=float)
    fl, fr = f_edges[:-1], f_edges[1:]
    fm = np.asarray(g(mid), dtype=float)
    whole = (right - left) / 6.0 * (fl + 4.0 * fm + fr)

    accepted = 0.0
    err_total = 0.0
    for _level in range(max_level):
        lm = 0.5 * (left + mid)
        rm = 0.5 * (mid + right)
        f_lm = np.asarray(g(lm), dtype=float)
        f_rm = np.asarray(g(rm), dtype=float)
        h = (right - left) / 12.0
        s_left = h * (fl + 4.0 * f_lm + fm)
        s_right = h * (fm + 4.0 * f_rm + fr)
        refined = s_left + s_right
        if not np.all(np.isfinite(refined)):
            raise NonFiniteIntegrand("integrand produced non-finite values")
        delta = refined - whole

        estimate = accepted + float(np.sum(refined))
        tol = max(atol, rtol * abs(estimate))
        share = tol * (right - left) / total_width
        done = np.abs(delta) <= 15.0 * share
        accepted += float(np.sum(refined[done] + delta[done] / 15.0))
        err_total += float(np.sum(np.abs(delta[done]))) / 15.0

        keep = ~done
        if not keep.any():
            return accepted, err_total
        if 2 * int(keep.sum()) > max_active:
            raise IntegrationError(f"more than {max_active} active subintervals")
        left_k, mid_k, right_k = left[keep], mid[keep], right[keep]
        left = np.concatenate([left_k, mid_k])
        right = np.concatenate([mid_k, right_k])
        mid = np.concatenate([lm[keep], rm[keep]])
        fl_new = np.concatenate([fl[keep], fm[keep]])
        fr_new = np.concatenate([fm[keep], fr[keep]])
        fm = np.concatenate([f_lm[keep], f_rm[keep]])
        fl, fr = fl_new, fr_new
        whole = np.concatenate([s_left[keep], s_right[keep]])
    raise IntegrationError(f"no convergence after {max_level} levels on [{a}, {b}]")


def integrate_piecewise(f, breakpoints, rtol=1e-9, atol=1e-14):
    """Sum of :func:`adaptive_simpson` over consecutive breakpoint segments."""
    pts = sorted(set(float(x) for x in breakpoints))
    value = 0.0
    err = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        v, e = adaptive_simpson(f, a, b, rtol=rtol, atol=atol)
        value += v
        err += e
    return value, err
