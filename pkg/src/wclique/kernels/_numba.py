"""numba-compiled kernels. Signatures mirror :mod:`wclique.kernels._numpy`."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _advance(c, d, n, k):
    # next combination in lexicographic order; returns new depth or -1 when exhausted
    c[d] += 1
    while c[d] > n - k + d:
        d -= 1
        if d < 0:
            return -1
        c[d] += 1
    return d


@njit(cache=True)
def subset_max(F, pos, neg, k):
    """Best k-subset by (class, finite sum); class 2=+inf, 1=finite, 0=-inf."""
    n = F.shape[0]
    c = np.empty(k, np.int64)
    s = np.zeros(k + 1)
    cp = np.zeros(k + 1, np.int64)
    cn = np.zeros(k + 1, np.int64)
    best = np.empty(k, np.int64)
    best_cls = -1
    best_val = -np.inf
    d = 0
    c[0] = 0
    while True:
        v = c[d]
        add = 0.0
        ap = 0
        an = 0
        for t in range(d):
            u = c[t]
            add += F[u, v]
            ap += pos[u, v]
            an += neg[u, v]
        s[d + 1] = s[d] + add
        cp[d + 1] = cp[d] + ap
        cn[d + 1] = cn[d] + an
        if d + 1 == k:
            if cn[k] > 0:
                cls = 0
            elif cp[k] > 0:
                cls = 2
            else:
                cls = 1
            val = s[k] if cls == 1 else 0.0
            if cls > best_cls or (cls == best_cls and cls == 1 and val > best_val):
                best_cls = cls
                best_val = val
                best[:] = c
            d = _advance(c, d, n, k)
            if d < 0:
                break
        else:
            d += 1
            c[d] = c[d - 1] + 1
    return best_cls, best_val, best


@njit(cache=True)
def subset_logsumexp(F, pos, neg, k):
    """Streaming log-sum-exp of finite-class subset sums.

    Returns (max, scaled_sum, n_plus_inf, first_plus_inf_subset) with
    log(sum) = max + log(scaled_sum).
    """
    n = F.shape[0]
    c = np.empty(k, np.int64)
    s = np.zeros(k + 1)
    cp = np.zeros(k + 1, np.int64)
    cn = np.zeros(k + 1, np.int64)
    first_pos = np.full(k, -1, np.int64)
    n_pos = 0
    m = -np.inf
    acc = 0.0
    d = 0
    c[0] = 0
    while True:
        v = c[d]
        add = 0.0
        ap = 0
        an = 0
        for t in range(d):
            u = c[t]
            add += F[u, v]
            ap += pos[u, v]
            an += neg[u, v]
        s[d + 1] = s[d] + add
        cp[d + 1] = cp[d] + ap
        cn[d + 1] = cn[d] + an
        if d + 1 == k:
            if cn[k] == 0:
                if cp[k] > 0:
                    if n_pos == 0:
                        first_pos[:] = c
                    n_pos += 1
                else:
                    val = s[k]
                    if val > m:
                        acc = acc * math.exp(m - val) + 1.0
                        m = val
                    else:
                        acc += math.exp(val - m)
            d = _advance(c, d, n, k)
            if d < 0:
                break
        else:
            d += 1
            c[d] = c[d - 1] + 1
    return m, acc, n_pos, first_pos


@njit(cache=True)
def _kahan_add(acc, comp, j, x):
    # Neumaier compensated summation into slot j
    t = acc[j] + x
    if abs(acc[j]) >= abs(x):
        comp[j] += (acc[j] - t) + x
    else:
        comp[j] += (x - t) + acc[j]
    acc[j] = t


@njit(cache=True)
def enumerate_outcomes(pm, qm, members, subset_edges):
    """Exhaustive sums over every weight configuration of a finite-support pair.

    ``members[S, e]`` marks edge e inside subset S; ``subset_edges[S]`` lists
    those edges. Output slots are documented in ``kernels.OUTCOME_FIELDS``.
    """
    s = pm.shape[0]
    n_sub, m = members.shape
    e_k = subset_edges.shape[1]
    ratio = np.zeros(s)
    for a in range(s):
        if pm[a] > 0:
            ratio[a] = qm[a] / pm[a]
    acc = np.zeros(10)
    comp = np.zeros(10)
    digits = np.zeros(m, np.int64)
    total = 1
    for _ in range(m):
        total *= s
    inv_c = 1.0 / n_sub
    for _o in range(total):
        p0 = 1.0
        for e in range(m):
            p0 *= pm[digits[e]]
        p1 = 0.0
        for S in range(n_sub):
            prod = 1.0
            for e in range(m):
                if members[S, e]:
                    prod *= qm[digits[e]]
                else:
                    prod *= pm[digits[e]]
            p1 += prod
        p1 *= inv_c
        _kahan_add(acc, comp, 0, p0)
        _kahan_add(acc, comp, 7, p1)
        _kahan_add(acc, comp, 8, 0.5 * abs(p0 - p1))
        if p0 > 0:
            L = 0.0
            for S in range(n_sub):
                prod = 1.0
                for t in range(e_k):
                    prod *= ratio[digits[subset_edges[S, t]]]
                L += prod
            L *= inv_c
            _kahan_add(acc, comp, 1, p0 * L)
            _kahan_add(acc, comp, 2, p0 * L * L)
            _kahan_add(acc, comp, 3, p0 * math.sqrt(L))
            _kahan_add(acc, comp, 4, p0 * abs(L - 1.0))
            if L > 1.0:
                _kahan_add(acc, comp, 5, p0)
            else:
                _kahan_add(acc, comp, 6, p1)
                if L == 1.0:
                    acc[9] += 1.0
        # odometer
        e = 0
        while e < m:
            digits[e] += 1
            if digits[e] < s:
                break
            digits[e] = 0
            e += 1
    return acc + comp


@njit(cache=True)
def interval_windows(eu, ev, w, n, k):
    """Longest tie-respecting window of sorted weights with >= k edges on <= k vertices."""
    m = w.shape[0]
    deg = np.zeros(n, np.int64)
    best_i = -1
    best_j = -1
    best_len = 0
    for i in range(m):
        if i > 0 and w[i] == w[i - 1]:
            continue
        nv = 0
        j = i
        while j < m:
            a = eu[j]
            b = ev[j]
            if deg[a] == 0:
                nv += 1
            deg[a] += 1
            if deg[b] == 0:
                nv += 1
            deg[b] += 1
            if nv > k:
                break
            length = j - i + 1
            if length >= k and length > best_len and (j == m - 1 or w[j + 1] != w[j]):
                best_len = length
                best_i = i
                best_j = j
            j += 1
        last = min(j, m - 1)
        for t in range(i, last + 1):
            deg[eu[t]] = 0
            deg[ev[t]] = 0
    return best_i, best_j
