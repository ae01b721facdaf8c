"""Plain numpy versions of the kernels, used when numba is disabled.

Subset and outcome enumerations are vectorized over chunks; the interval window
scan has no useful vectorized form and runs as Python loops.
"""

import itertools
import math

import numpy as np

CHUNK = 1 << 14


def _combination_chunks(n, k, chunk=CHUNK):
    it = itertools.combinations(range(n), k)
    dtype = np.dtype((np.int64, k))
    while True:
        block = np.fromiter(itertools.islice(it, chunk), dtype=dtype)
        if len(block) == 0:
            return
        yield block


def _chunk_scores(F, pos, neg, combos, pairs):
    a, b = combos[:, pairs[:, 0]], combos[:, pairs[:, 1]]
    vals = F[a, b].sum(axis=1)
    cp = pos[a, b].sum(axis=1)
    cn = neg[a, b].sum(axis=1)
    cls = np.where(cn > 0, 0, np.where(cp > 0, 2, 1))
    return cls, np.where(cls == 1, vals, 0.0)


def _pairs(k):
    return np.array(list(itertools.combinations(range(k), 2)), dtype=np.int64).reshape(-1, 2)


def subset_max(F, pos, neg, k):
    n = F.shape[0]
    pairs = _pairs(k)
    best_cls, best_val, best = -1, -np.inf, None
    for combos in _combination_chunks(n, k):
        cls, vals = _chunk_scores(F, pos, neg, combos, pairs)
        top = cls.max()
        if top < best_cls:
            continue
        cand = np.flatnonzero(cls == top)
        i = cand[np.argmax(vals[cand])] if top == 1 else cand[0]
        if top > best_cls or (top == 1 and vals[i] > best_val):
            best_cls, best_val, best = int(top), float(vals[i]), combos[i].copy()
    return best_cls, (best_val if best_cls == 1 else 0.0), best


def subset_logsumexp(F, pos, neg, k):
    n = F.shape[0]
    pairs = _pairs(k)
    m, acc, n_pos = -np.inf, 0.0, 0
    first_pos = np.full(k, -1, dtype=np.int64)
    for combos in _combination_chunks(n, k):
        cls, vals = _chunk_scores(F, pos, neg, combos, pairs)
        plus = np.flatnonzero(cls == 2)
        if len(plus):
            if n_pos == 0:
                first_pos = combos[plus[0]].copy()
            n_pos += len(plus)
        fin = vals[cls == 1]
        if len(fin) == 0:
            continue
        top = fin.max()
        if top > m:
            acc = acc * math.exp(m - top) if acc else 0.0
            m = top
        acc += float(np.exp(fin - m).sum())
    return m, acc, n_pos, first_pos


def enumerate_outcomes(pm, qm, members, subset_edges):
    s = len(pm)
    n_sub, m = members.shape
    total = s**m
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(pm > 0, qm / np.where(pm > 0, pm, 1.0), 0.0)
    powers = s ** np.arange(m, dtype=np.int64)
    parts = [[] for _ in range(10)]
    chunk = max(1, CHUNK // max(1, n_sub))
    for start in range(0, total, chunk):
        o = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = (o[:, None] // powers[None, :]) % s
        P = pm[digits]
        Q = qm[digits]
        p0 = P.prod(axis=1)
        p1 = np.where(members[None, :, :], Q[:, None, :], P[:, None, :]).prod(axis=2).mean(axis=1)
        R = ratio[digits]
        L = R[:, subset_edges].prod(axis=2).mean(axis=1)
        live = p0 > 0
        rej = live & (L > 1.0)
        acc_ = live & ~(L > 1.0)
        parts[0].append(p0.sum())
        parts[1].append((p0 * L)[live].sum())
        parts[2].append((p0 * L * L)[live].sum())
        parts[3].append((p0 * np.sqrt(L))[live].sum())
        parts[4].append((p0 * np.abs(L - 1.0))[live].sum())
        parts[5].append(p0[rej].sum())
        parts[6].append(p1[acc_].sum())
        parts[7].append(p1.sum())
        parts[8].append((0.5 * np.abs(p0 - p1)).sum())
        parts[9].append(float(np.count_nonzero(live & (L == 1.0))))
    return np.array([math.fsum(p) for p in parts])


def interval_windows(eu, ev, w, n, k):
    m = len(w)
    deg = np.zeros(n, dtype=np.int64)
    best_i, best_j, best_len = -1, -1, 0
    w = w.tolist()
    eu = eu.tolist()
    ev = ev.tolist()
    for i in range(m):
        if i > 0 and w[i] == w[i - 1]:
            continue
        nv = 0
        j = i
        touched = []
        while j < m:
            a, b = eu[j], ev[j]
            for x in (a, b):
                if deg[x] == 0:
                    nv += 1
                    touched.append(x)
                deg[x] += 1
            if nv > k:
                break
            length = j - i + 1
            if length >= k and length > best_len and (j == m - 1 or w[j + 1] != w[j]):
                best_i, best_j, best_len = i, j, length
            j += 1
        deg[touched] = 0
    return best_i, best_j
