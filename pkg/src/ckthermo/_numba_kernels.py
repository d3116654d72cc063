"""numba kernels for the CSR transfer matrix.

Rows are cylinders in canonical order; ``indptr``/``indices``/``data`` follow
the usual CSR layout.  Every row has at least one entry.
"""
import numpy as np
from numba import njit

from ._accel import POLISH_PATIENCE, POLISH_STEPS


@njit(cache=True)
def csr_matvec(indptr, indices, data, x):
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=x.dtype)
    for i in range(n):
        acc = out[i]
        for p in range(indptr[i], indptr[i + 1]):
            acc += data[p] * x[indices[p]]
        out[i] = acc
    return out


@njit(cache=True)
def csr_rmatvec(indptr, indices, data, y):
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=y.dtype)
    for i in range(n):
        yi = y[i]
        for p in range(indptr[i], indptr[i + 1]):
            out[indices[p]] += data[p] * yi
    return out


@njit(cache=True)
def power_loop(indptr, indices, data, x, y, tol, max_iter):
    """Joint right/left power iteration.

    ``x`` is kept sup-normalized, ``y`` as a probability vector.  Once the
    tolerance test passes, iteration continues while the residuals keep
    shrinking (at most ``POLISH_STEPS`` extra sweeps) and the best pair seen
    is returned.  Returns ``(lam, x, y, iterations, res_right, res_left,
    converged)`` with residuals measured on the returned vectors.
    """
    n = x.shape[0]
    lam_prev = -1.0
    lam = 0.0
    res_r = np.inf
    res_l = np.inf
    converged = False
    best = (0.0, x, y, 0, np.inf, np.inf)
    stall = 0
    extra = 0
    for it in range(1, max_iter + 1):
        mx = csr_matvec(indptr, indices, data, x)
        my = csr_rmatvec(indptr, indices, data, y)
        lam_r = 0.0
        lam = 0.0
        for i in range(n):
            if mx[i] > lam_r:
                lam_r = mx[i]
            lam += my[i]
        res_r = 0.0
        res_l = 0.0
        for i in range(n):
            d = abs(mx[i] - lam * x[i])
            if d > res_r:
                res_r = d
            res_l += abs(my[i] - lam * y[i])
        scale = tol * max(1.0, lam)
        if not converged and res_r <= scale and res_l <= scale and abs(lam - lam_prev) <= tol * lam:
            converged = True
        if converged:
            if res_r + res_l < best[4] + best[5]:
                best = (lam, x, y, it, res_r, res_l)
                stall = 0
            else:
                stall += 1
            extra += 1
            if stall >= POLISH_PATIENCE or extra >= POLISH_STEPS:
                return best[0], best[1], best[2], best[3], best[4], best[5], True
        lam_prev = lam
        x = mx / lam_r
        y = my / lam
    if converged:
        return best[0], best[1], best[2], best[3], best[4], best[5], True
    return lam, x, y, max_iter, res_r, res_l, False


@njit(cache=True)
def iterate_log_norms(indptr, indices, data, k):
    """log of sup-norms of M^j 1 for j = 1..k, renormalizing every step."""
    n = indptr.shape[0] - 1
    v = np.ones(n)
    logs = np.empty(k)
    acc = 0.0
    for j in range(k):
        v = csr_matvec(indptr, indices, data, v)
        s = 0.0
        for i in range(n):
            if abs(v[i]) > s:
                s = abs(v[i])
        acc += np.log(s)
        logs[j] = acc
        v = v / s
    return logs
