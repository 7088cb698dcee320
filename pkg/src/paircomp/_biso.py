"""Dykstra kernel for projecting a square matrix onto the bivariate isotonic set.

The feasible set is the intersection of two convex sets:

  A: every row nondecreasing (product of per-row monotone cones), and
  B: skew constraint M + M^T = ee^T together with the [0, 1] box.

Projecting onto B alone has a closed form: the problem separates over the
entry pairs (i, j), (j, i), each of which is projected onto the segment
from (0, 1) to (1, 0).  That projection is exactly clip((x - x^T + 1) / 2).
Column monotonicity of the result follows from row monotonicity plus the
skew constraint, so two sets suffice.

A numba-compiled kernel is used when numba is importable; a numpy/scipy
fallback with identical iteration semantics is kept for environments
without a JIT.  Both return (matrix, converged, iterations).
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import isotonic_regression as _scipy_isotonic

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False


def _dykstra_biso_numpy(x0: np.ndarray, tol: float, max_iter: int):
    n = x0.shape[0]
    x = np.clip(0.5 * (x0 - x0.T + 1.0), 0.0, 1.0)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    y = np.empty_like(x)
    for it in range(1, max_iter + 1):
        z = x + p
        for i in range(n):
            y[i] = _scipy_isotonic(z[i]).x
        p = z - y
        z = y + q
        x_new = np.clip(0.5 * (z - z.T + 1.0), 0.0, 1.0)
        q = z - x_new
        delta = float(np.linalg.norm(x_new - x))
        viol = float(max(0.0, -np.min(np.diff(x_new, axis=1)))) if n > 1 else 0.0
        x = x_new
        if delta < tol and viol <= 0.5 * tol:
            return x, True, it
    return x, False, max_iter


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _dykstra_biso_jit(x0, tol, max_iter):  # pragma: no cover - jitted
        n = x0.shape[0]
        x = np.empty((n, n))
        for i in range(n):
            for j in range(n):
                v = 0.5 * (x0[i, j] - x0[j, i] + 1.0)
                x[i, j] = min(max(v, 0.0), 1.0)
        p = np.zeros((n, n))
        q = np.zeros((n, n))
        y = np.empty((n, n))
        means = np.empty(n)
        counts = np.empty(n, dtype=np.int64)
        for it in range(1, max_iter + 1):
            # y = PAV(x + p) row-wise; p is the Dykstra increment for the cone
            for i in range(n):
                top = -1
                for j in range(n):
                    top += 1
                    means[top] = x[i, j] + p[i, j]
                    counts[top] = 1
                    while top > 0 and means[top - 1] >= means[top]:
                        tot = counts[top - 1] + counts[top]
                        means[top - 1] = (
                            means[top - 1] * counts[top - 1] + means[top] * counts[top]
                        ) / tot
                        counts[top - 1] = tot
                        top -= 1
                pos = 0
                for b in range(top + 1):
                    mv = means[b]
                    for _ in range(counts[b]):
                        p[i, pos] = x[i, pos] + p[i, pos] - mv
                        y[i, pos] = mv
                        pos += 1
            # x_new = clip(skew(y + q)); q is the increment for the segment set
            delta2 = 0.0
            for i in range(n):
                for j in range(i, n):
                    a = y[i, j] + q[i, j]
                    b = y[j, i] + q[j, i]
                    v = 0.5 * (a - b + 1.0)
                    v = min(max(v, 0.0), 1.0)
                    w = 1.0 - v
                    q[i, j] = a - v
                    q[j, i] = b - w
                    d1 = v - x[i, j]
                    delta2 += d1 * d1
                    if j > i:
                        d2 = w - x[j, i]
                        delta2 += d2 * d2
                    x[i, j] = v
                    x[j, i] = w
            viol = 0.0
            for i in range(n):
                for j in range(n - 1):
                    d = x[i, j] - x[i, j + 1]
                    if d > viol:
                        viol = d
            if np.sqrt(delta2) < tol and viol <= 0.5 * tol:
                return x, True, it
        return x, False, max_iter

    def dykstra_biso(x0: np.ndarray, tol: float, max_iter: int):
        out, converged, iters = _dykstra_biso_jit(
            np.ascontiguousarray(x0, dtype=np.float64), tol, max_iter
        )
        return out, bool(converged), int(iters)

else:  # pragma: no cover - exercised only without numba

    def dykstra_biso(x0: np.ndarray, tol: float, max_iter: int):
        out, converged, iters = _dykstra_biso_numpy(
            np.ascontiguousarray(x0, dtype=np.float64), tol, max_iter
        )
        return out, bool(converged), int(iters)
