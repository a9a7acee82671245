"""Compiled inner loop for the functional-pruning segmentation solver.

Mirrors the pure-Python piece list in detect.py, but over preallocated
arrays so numba can compile it. Kept in its own module so detect.py can
fall back cleanly when numba is unavailable.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap

_INF = np.inf


@njit(cache=True)
def _fpop_arrays(z, k, beta):  # pragma: no cover - exercised via detect()
    n = z.size
    cap = 8 * n + 64
    left = np.empty(cap)
    qa = np.empty(cap)
    qb = np.empty(cap)
    qc = np.empty(cap)
    lab = np.empty(cap, np.int64)
    nleft = np.empty(cap)
    na = np.empty(cap)
    nb = np.empty(cap)
    nc = np.empty(cap)
    nlab = np.empty(cap, np.int64)
    F = np.zeros(n + 1)
    shat = np.zeros(n + 1, np.int64)

    kk = k * k
    y0 = z[0]
    m = 3
    left[0] = -_INF
    qa[0] = 0.0
    qb[0] = 0.0
    qc[0] = kk
    lab[0] = 0
    left[1] = y0 - k
    qa[1] = 1.0
    qb[1] = -2.0 * y0
    qc[1] = y0 * y0
    lab[1] = 0
    left[2] = y0 + k
    qa[2] = 0.0
    qb[2] = 0.0
    qc[2] = kk
    lab[2] = 0

    # minimize over pieces
    best = _INF
    bl = -1
    for i in range(m):
        l = left[i]
        r = left[i + 1] if i + 1 < m else _INF
        a = qa[i]
        if a == 0.0:
            v = qc[i]
        else:
            v0 = -qb[i] / (2.0 * a)
            if v0 < l:
                v0 = l
            elif v0 > r:
                v0 = r
            v = (a * v0 + qb[i]) * v0 + qc[i]
        if v < best or (v == best and lab[i] < bl):
            best = v
            bl = lab[i]
    F[1] = best
    shat[1] = bl

    for t in range(2, n + 1):
        c0 = F[t - 1] + beta
        newlab = t - 1
        # pointwise min with the constant c0 (new candidate split at t-1)
        m2 = 0
        overflow = False
        for i in range(m):
            if m2 + 3 >= cap:
                overflow = True
                break
            l = left[i]
            r = left[i + 1] if i + 1 < m else _INF
            a = qa[i]
            b = qb[i]
            c = qc[i]
            s = lab[i]
            keep_quad = True
            lo = l
            hi = r
            if a == 0.0:
                if c <= c0:
                    pass  # keep as-is
                else:
                    keep_quad = False
            else:
                disc = b * b - 4.0 * a * (c - c0)
                if disc <= 0.0:
                    # min of the quadratic is >= c0 (tangent when disc == 0),
                    # so the constant wins the whole piece
                    keep_quad = False
                else:
                    sq = np.sqrt(disc)
                    r1 = (-b - sq) / (2.0 * a)
                    r2 = (-b + sq) / (2.0 * a)
                    lo = l if l > r1 else r1
                    hi = r if r < r2 else r2
                    if hi <= l or lo >= r or hi <= lo:
                        keep_quad = False
                    lo = max(l, lo)
                    hi = min(r, hi)
            if not keep_quad:
                if m2 > 0 and na[m2 - 1] == 0.0 and nc[m2 - 1] == c0 and nlab[m2 - 1] == newlab:
                    pass
                else:
                    nleft[m2] = l
                    na[m2] = 0.0
                    nb[m2] = 0.0
                    nc[m2] = c0
                    nlab[m2] = newlab
                    m2 += 1
                continue
            if lo > l:
                if not (m2 > 0 and na[m2 - 1] == 0.0 and nc[m2 - 1] == c0 and nlab[m2 - 1] == newlab):
                    nleft[m2] = l
                    na[m2] = 0.0
                    nb[m2] = 0.0
                    nc[m2] = c0
                    nlab[m2] = newlab
                    m2 += 1
                nleft[m2] = lo
            else:
                nleft[m2] = l
            na[m2] = a
            nb[m2] = b
            nc[m2] = c
            nlab[m2] = s
            m2 += 1
            if a != 0.0 and hi < r:
                nleft[m2] = hi
                na[m2] = 0.0
                nb[m2] = 0.0
                nc[m2] = c0
                nlab[m2] = newlab
                m2 += 1

        if overflow:
            F[0] = -1.0
            return F, shat

        # add the capped loss of y_t, splitting at the window edges
        y = z[t - 1]
        wlo = y - k
        whi = y + k
        m = 0
        for i in range(m2):
            l = nleft[i]
            r = nleft[i + 1] if i + 1 < m2 else _INF
            a = na[i]
            b = nb[i]
            c = nc[i]
            s = nlab[i]
            if m + 3 >= cap:
                overflow = True
                break
            # sub-lefts: l, then wlo/whi if they fall strictly inside (l, r)
            if wlo <= l and l < whi:
                left[m] = l
                qa[m] = a + 1.0
                qb[m] = b - 2.0 * y
                qc[m] = c + y * y
                lab[m] = s
            else:
                left[m] = l
                qa[m] = a
                qb[m] = b
                qc[m] = c + kk
                lab[m] = s
            m += 1
            if l < wlo and wlo < r:
                left[m] = wlo
                qa[m] = a + 1.0
                qb[m] = b - 2.0 * y
                qc[m] = c + y * y
                lab[m] = s
                m += 1
            if l < whi and whi < r:
                left[m] = whi
                qa[m] = a
                qb[m] = b
                qc[m] = c + kk
                lab[m] = s
                m += 1
        if overflow:
            F[0] = -1.0  # signal: caller must fall back to the list solver
            return F, shat

        best = _INF
        bl = -1
        for i in range(m):
            l = left[i]
            r = left[i + 1] if i + 1 < m else _INF
            a = qa[i]
            if a == 0.0:
                v = qc[i]
            else:
                v0 = -qb[i] / (2.0 * a)
                if v0 < l:
                    v0 = l
                elif v0 > r:
                    v0 = r
                v = (a * v0 + qb[i]) * v0 + qc[i]
            if v < best or (v == best and lab[i] < bl):
                best = v
                bl = lab[i]
        F[t] = best
        shat[t] = bl

    F[0] = 0.0
    return F, shat


def solve(z: np.ndarray, k: float, beta: float):
    """Run the compiled solver; returns (boundaries, total_cost) or None if
    the kernel is unavailable or overflowed its piece budget."""
    if not HAVE_NUMBA:
        return None
    F, shat = _fpop_arrays(np.ascontiguousarray(z, dtype=np.float64), float(k), float(beta))
    if F[0] == -1.0:
        return None
    n = z.size
    bounds = []
    t = n
    while t > 0:
        s = int(shat[t])
        if s > 0:
            bounds.append(s)
        t = s
    bounds.reverse()
    return tuple(bounds), float(F[n])
