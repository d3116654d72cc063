"""Pure-numpy twins of ``_numba_kernels`` (same signatures, same results)."""
import numpy as np

from ._accel import POLISH_PATIENCE, POLISH_STEPS


def csr_matvec(indptr, indices, data, x):
    return np.add.reduceat(data * x[indices], indptr[:-1])


def _bincount(indices, weights, n):
    if np.iscomplexobj(weights):
        return (np.bincount(indices, weights.real, minlength=n)
                + 1j * np.bincount(indices, weights.imag, minlength=n))
    return np.bincount(indices, weights, minlength=n)


def csr_rmatvec(indptr, indices, data, y):
    n = indptr.shape[0] - 1
    rows = np.repeat(y, np.diff(indptr))
    return _bincount(indices, data * rows, n)


def power_loop(indptr, indices, data, x, y, tol, max_iter):
    lam_prev = -1.0
    lam = 0.0
    res_r = res_l = np.inf
    converged = False
    best = None
    stall = extra = 0
    for it in range(1, max_iter + 1):
        mx = csr_matvec(indptr, indices, data, x)
        my = csr_rmatvec(indptr, indices, data, y)
        lam_r = mx.max()
        lam = my.sum()
        res_r = np.abs(mx - lam * x).max()
        res_l = np.abs(my - lam * y).sum()
        scale = tol * max(1.0, lam)
        if not converged and res_r <= scale and res_l <= scale and abs(lam - lam_prev) <= tol * lam:
            converged = True
        if converged:
            if best is None or res_r + res_l < best[4] + best[5]:
                best = (lam, x, y, it, res_r, res_l)
                stall = 0
            else:
                stall += 1
            extra += 1
            if stall >= POLISH_PATIENCE or extra >= POLISH_STEPS:
                return best + (True,)
        lam_prev = lam
        x = mx / lam_r
        y = my / lam
    if converged:
        return best + (True,)
    return lam, x, y, max_iter, res_r, res_l, False


def iterate_log_norms(indptr, indices, data, k):
    v = np.ones(indptr.shape[0] - 1)
    logs = np.empty(k)
    acc = 0.0
    for j in range(k):
        v = csr_matvec(indptr, indices, data, v)
        s = np.abs(v).max()
        acc += np.log(s)
        logs[j] = acc
        v = v / s
    return logs
