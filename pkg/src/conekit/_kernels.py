"""Batch monomial-evaluation kernels.

Evaluating many sparse monomials at many points is the one inner loop in
this package that is Python-bound rather than BLAS-bound (polynomial
evaluation, moment maps, spectrum sampling inside experiments all funnel
through it), so it gets a numba-jitted kernel with a pure-numpy
broadcast fallback.  The fallback is selected automatically when numba
is unavailable, or explicitly by setting ``CONEKIT_DISABLE_NUMBA=1`` in
the environment before import.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised on numba-free installs
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrapper(func):
            return func

        return wrapper


USE_NUMBA = HAVE_NUMBA and os.environ.get("CONEKIT_DISABLE_NUMBA", "0") != "1"


def monomial_matrix_numpy(points, exps):
    """V[i, j] = prod_k points[i, k] ** exps[j, k] via broadcasting."""
    points = np.asarray(points, dtype=np.float64)
    exps = np.asarray(exps, dtype=np.int64)
    return np.prod(points[:, None, :] ** exps[None, :, :], axis=2)


@njit(cache=True)
def _monomial_matrix_jit(points, exps):
    m = points.shape[0]
    t = exps.shape[0]
    n = points.shape[1]
    out = np.empty((m, t), dtype=np.float64)
    for i in range(m):
        for j in range(t):
            acc = 1.0
            for k in range(n):
                e = exps[j, k]
                if e == 1:
                    acc *= points[i, k]
                elif e > 1:
                    acc *= points[i, k] ** np.float64(e)
            out[i, j] = acc
    return out


def monomial_matrix_jit(points, exps):
    points = np.ascontiguousarray(points, dtype=np.float64)
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    return _monomial_matrix_jit(points, exps)


if USE_NUMBA:
    monomial_matrix = monomial_matrix_jit
else:
    monomial_matrix = monomial_matrix_numpy


def evaluate_many(points, exps, coefs):
    """Evaluate sum_j coefs[j] * x^exps[j] at each row of ``points``."""
    coefs = np.asarray(coefs, dtype=np.float64)
    return monomial_matrix(points, exps) @ coefs
