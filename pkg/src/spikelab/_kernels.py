"""Compiled tridiagonal eigenvalue kernels.

All routines work on a symmetric tridiagonal matrix given by its diagonal
``d`` (length n) and off-diagonal ``e`` (length n-1, ``e[i]`` couples rows
``i`` and ``i+1``).
"""
from math import copysign, hypot, sqrt

import numpy as np
from numba import njit

QL_MAX_SWEEPS = 60


@njit(cache=True, fastmath=True)
def householder_tridiag(a):
    """Reduce a real symmetric matrix to tridiagonal form in place.

    Only the lower triangle of ``a`` is read and updated.  Returns ``(d, e)``.
    """
    n = a.shape[0]
    d = np.empty(n)
    e = np.zeros(max(n - 1, 0))
    if n == 1:
        d[0] = a[0, 0]
        return d, e
    v = np.empty(n)
    p = np.empty(n)
    for k in range(n - 2):
        m = k + 1
        ss = 0.0
        for i in range(m, n):
            ss += a[i, k] * a[i, k]
        alpha = sqrt(ss)
        if a[m, k] > 0:
            alpha = -alpha
        d[k] = a[k, k]
        e[k] = alpha
        vn = 0.0
        for i in range(m, n):
            v[i] = a[i, k]
        v[m] -= alpha
        for i in range(m, n):
            vn += v[i] * v[i]
        if vn == 0.0:
            e[k] = a[m, k]
            continue
        tau = 2.0 / vn
        # p = tau * S v with S the trailing block, read from the lower triangle
        for i in range(m, n):
            p[i] = 0.0
        for i in range(m, n):
            vi = v[i]
            s = 0.0
            for j in range(m, i):
                aij = a[i, j]
                p[j] += aij * vi
                s += aij * v[j]
            p[i] += s + a[i, i] * vi
        dot = 0.0
        for i in range(m, n):
            p[i] *= tau
            dot += p[i] * v[i]
        c = 0.5 * tau * dot
        for i in range(m, n):
            p[i] -= c * v[i]
        for i in range(m, n):
            vi = v[i]
            pi = p[i]
            for j in range(m, i + 1):
                a[i, j] -= vi * p[j] + pi * v[j]
    d[n - 2] = a[n - 2, n - 2]
    e[n - 2] = a[n - 1, n - 2]
    d[n - 1] = a[n - 1, n - 1]
    return d, e


@njit(cache=True)
def ql_implicit(d, e):
    """Eigenvalues of a tridiagonal matrix by implicit-shift QL.

    ``d`` and ``e`` are copied.  Returns ``(eigenvalues, fail)`` where
    ``fail`` is -1 on success or the index whose iteration hit the cap.
    """
    n = d.shape[0]
    dd = d.copy()
    ee = np.zeros(n)
    ee[: n - 1] = e
    eps = np.finfo(np.float64).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                tst = abs(dd[m]) + abs(dd[m + 1])
                if abs(ee[m]) <= eps * tst:
                    break
                m += 1
            if m == l:
                break
            if it == QL_MAX_SWEEPS:
                return dd, l
            it += 1
            g = (dd[l + 1] - dd[l]) / (2.0 * ee[l])
            r = hypot(g, 1.0)
            g = dd[m] - dd[l] + ee[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            deflated = False
            i = m - 1
            while i >= l:
                f = s * ee[i]
                b = c * ee[i]
                r = hypot(f, g)
                ee[i + 1] = r
                if r == 0.0:
                    dd[i + 1] -= p
                    ee[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = dd[i + 1] - p
                r = (dd[i] - g) * s + 2.0 * c * b
                p = s * r
                dd[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            dd[l] -= p
            ee[l] = g
            ee[m] = 0.0
    return dd, -1


@njit(cache=True)
def sturm_count(d, e, x):
    """Number of eigenvalues strictly below ``x``."""
    n = d.shape[0]
    tiny = 1e-300
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    for i in range(1, n):
        if q == 0.0:
            q = tiny
        q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q < 0:
            count += 1
    return count


@njit(cache=True)
def gershgorin(d, e):
    n = d.shape[0]
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        lo = min(lo, d[i] - r)
        hi = max(hi, d[i] + r)
    return lo, hi


@njit(cache=True)
def bisect_eigs(d, e, ks, tol):
    """Eigenvalues of ascending ranks ``ks`` (0-based) by Sturm bisection."""
    lo0, hi0 = gershgorin(d, e)
    pad = 1e-14 * max(abs(lo0), abs(hi0)) + 1e-300
    lo0 -= pad
    hi0 += pad
    out = np.empty(ks.shape[0])
    for j in range(ks.shape[0]):
        k = ks[j]
        lo = lo0
        hi = hi0
        for _ in range(300):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if sturm_count(d, e, mid) > k:
                hi = mid
            else:
                lo = mid
        out[j] = 0.5 * (lo + hi)
    return out


@njit(cache=True)
def tridiag_inverse_iteration(d, e, lam, sweeps):
    """Approximate unit eigenvector of the tridiagonal matrix for ``lam``.

    Solves ``(T - lam I) x = b`` by Gaussian elimination with partial
    pivoting, ``sweeps`` times.
    """
    n = d.shape[0]
    x = np.ones(n) / sqrt(n)
    if n == 1:
        return x
    scale = 0.0
    for i in range(n):
        scale = max(scale, abs(d[i]))
    for i in range(n - 1):
        scale = max(scale, abs(e[i]))
    shift_eps = 1e-14 * max(scale, 1.0)
    # LU factors: u0 diag, u1 first super, u2 second super, lmul multipliers, piv swaps
    u0 = np.empty(n)
    u1 = np.zeros(n)
    u2 = np.zeros(n)
    lmul = np.zeros(n)
    piv = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        u0[i] = d[i] - lam
    for i in range(n - 1):
        u1[i] = e[i]
    sub = e.copy()
    for i in range(n - 1):
        if abs(u0[i]) >= abs(sub[i]):
            if u0[i] == 0.0:
                u0[i] = shift_eps
            mlt = sub[i] / u0[i]
            lmul[i] = mlt
            u0[i + 1] -= mlt * u1[i]
        else:
            piv[i] = True
            mlt = u0[i] / sub[i]
            lmul[i] = mlt
            a1 = u1[i]
            u0[i] = sub[i]
            u1[i] = u0[i + 1]
            u2[i] = u1[i + 1] if i + 1 < n - 1 else 0.0
            u0[i + 1] = a1 - mlt * u1[i]
            if i + 1 < n - 1:
                u1[i + 1] = -mlt * u2[i]
    if u0[n - 1] == 0.0:
        u0[n - 1] = shift_eps
    for _ in range(sweeps):
        b = x.copy()
        for i in range(n - 1):
            if piv[i]:
                tmp = b[i]
                b[i] = b[i + 1]
                b[i + 1] = tmp - lmul[i] * b[i]
            else:
                b[i + 1] -= lmul[i] * b[i]
        b[n - 1] /= u0[n - 1]
        b[n - 2] = (b[n - 2] - u1[n - 2] * b[n - 1]) / u0[n - 2]
        for i in range(n - 3, -1, -1):
            b[i] = (b[i] - u1[i] * b[i + 1] - u2[i] * b[i + 2]) / u0[i]
        nrm = 0.0
        for i in range(n):
            nrm += b[i] * b[i]
        nrm = sqrt(nrm)
        for i in range(n):
            x[i] = b[i] / nrm
    return x
