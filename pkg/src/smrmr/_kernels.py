"""Hot numeric kernels.

Each kernel has a numba ``@njit`` build and a pure-numpy fallback with the
same signature and bit-identical semantics (up to floating point summation
order).  The active path is chosen once at import time by
:mod:`smrmr._accel`; ``SMRMR_NO_NUMBA=1`` selects the numpy path.
"""

import math

import numpy as np

from ._accel import NUMBA_ENABLED, njit


# ---------------------------------------------------------------------------
# Projection-correlation association accumulation.
#
# For scalar samples the arccos of the normalized inner product of
# (v_i - v_r) and (v_l - v_r) is 0 or pi depending on the sign product, and 0
# whenever an argument vanishes (i = r, l = r, or coincident points).  The
# double-centered slice therefore only depends on the indicator vectors of
# positive/negative differences, which keeps the per-slice cost at O(m n^2)
# without materializing any n^3 tensor.
# ---------------------------------------------------------------------------

@njit(cache=True)
def _pc_association_numba(V):
    n, m = V.shape
    M = np.zeros((m, m))
    S = np.empty((m, n * n))
    pi = math.pi
    for r in range(n):
        for k in range(m):
            na = 0.0
            nb = 0.0
            for i in range(n):
                d = V[i, k] - V[r, k]
                if d > 0.0:
                    na += 1.0
                elif d < 0.0:
                    nb += 1.0
            base = 2.0 * pi * na * nb / (n * n)
            for i in range(n):
                di = V[i, k] - V[r, k]
                ai = 1.0 if di > 0.0 else 0.0
                bi = 1.0 if di < 0.0 else 0.0
                row_i = pi * (ai * nb + bi * na) / n
                off = i * n
                for l in range(n):
                    dl = V[l, k] - V[r, k]
                    al = 1.0 if dl > 0.0 else 0.0
                    bl = 1.0 if dl < 0.0 else 0.0
                    raw = pi * (ai * bl + bi * al)
                    row_l = pi * (al * nb + bl * na) / n
                    S[k, off + l] = raw - row_i - row_l + base
        M += S @ S.T
    return M


def _pc_association_numpy(V):
    n, m = V.shape
    M = np.zeros((m, m))
    S = np.empty((m, n * n))
    for r in range(n):
        D = V - V[r]
        A = (D > 0.0).astype(np.float64)
        B = (D < 0.0).astype(np.float64)
        na = A.sum(axis=0)
        nb = B.sum(axis=0)
        for k in range(m):
            raw = math.pi * (np.outer(A[:, k], B[:, k]) + np.outer(B[:, k], A[:, k]))
            row = math.pi * (A[:, k] * nb[k] + B[:, k] * na[k]) / n
            base = 2.0 * math.pi * na[k] * nb[k] / (n * n)
            S[k] = (raw - row[:, None] - row[None, :] + base).ravel()
        M += S @ S.T
    return M


# ---------------------------------------------------------------------------
# Cyclic coordinate descent for the non-negative weighted-L1 quadratic.
# theta is updated in place; returns (sweeps used, last max coordinate change).
# ---------------------------------------------------------------------------

@njit(cache=True)
def _cd_weighted_nn_numba(K, J, w, theta, max_iters, tol):
    p = theta.shape[0]
    delta = np.inf
    it = 0
    while it < max_iters:
        delta = 0.0
        for k in range(p):
            g = 0.0
            for l in range(p):
                g += K[k, l] * theta[l]
            g -= K[k, k] * theta[k]
            new = (J[k] - g - w[k]) / K[k, k]
            if new < 0.0:
                new = 0.0
            ch = abs(new - theta[k])
            if ch > delta:
                delta = ch
            theta[k] = new
        it += 1
        if delta < tol:
            break
    return it, delta


def _cd_weighted_nn_numpy(K, J, w, theta, max_iters, tol):
    p = theta.shape[0]
    delta = np.inf
    it = 0
    diag = np.diag(K)
    while it < max_iters:
        delta = 0.0
        for k in range(p):
            g = K[k] @ theta - diag[k] * theta[k]
            new = max(0.0, (J[k] - g - w[k]) / diag[k])
            ch = abs(new - theta[k])
            if ch > delta:
                delta = ch
            theta[k] = new
        it += 1
        if delta < tol:
            break
    return it, delta


if NUMBA_ENABLED:
    pc_association = _pc_association_numba
    cd_weighted_nn = _cd_weighted_nn_numba
else:
    pc_association = _pc_association_numpy
    cd_weighted_nn = _cd_weighted_nn_numpy
