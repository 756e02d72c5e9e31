import itertools

import numpy as np
import pytest
from scipy.optimize import minimize


def cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _restricted_min(sub, b, start=None):
    """min sum |lam| over sub @ lam = b for one fixed support (None if infeasible)."""
    lam0, *_ = np.linalg.lstsq(sub, b, rcond=None)
    if np.linalg.norm(sub @ lam0 - b) > 1e-9 * max(1.0, np.linalg.norm(b)):
        return None
    _, s, vh = np.linalg.svd(sub)
    rank = int(np.sum(s > 1e-10 * s[0]))
    N = vh[rank:].conj().T
    if N.shape[1] == 0:
        return float(np.sum(np.abs(lam0)))
    k = N.shape[1]
    c0 = np.zeros(2 * k)
    if start is not None:
        c = N.conj().T @ (start - lam0)
        c0 = np.concatenate([c.real, c.imag])

    def fun(c, eps):
        lam = lam0 + N @ (c[:k] + 1j * c[k:])
        mod = np.sqrt(np.abs(lam) ** 2 + eps ** 2)
        g = N.conj().T @ (lam / mod)
        return float(mod.sum()), np.concatenate([g.real, g.imag])

    # continuation in the smoothing parameter keeps BFGS well conditioned
    c = c0
    for eps in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10):
        c = minimize(fun, c, args=(eps,), jac=True, method="BFGS", options={"gtol": 1e-12}).x
    return float(np.sum(np.abs(lam0 + N @ (c[:k] + 1j * c[k:]))))


def brute_min_sum_moduli(A, b):
    """Minimum of sum |lambda_j| subject to A lambda = b.

    Every basic support (independent columns) is solved exactly; the full
    support is then minimized as a smoothed convex problem started from the
    best basic solution.  The least value is the oracle.
    """
    n, N = A.shape
    rank = np.linalg.matrix_rank(A)
    best, best_lam = np.inf, None
    for S in itertools.combinations(range(N), rank):
        sub = A[:, S]
        if np.linalg.matrix_rank(sub) < rank:
            continue
        lam, *_ = np.linalg.lstsq(sub, b, rcond=None)
        if np.linalg.norm(sub @ lam - b) > 1e-9 * max(1.0, np.linalg.norm(b)):
            continue
        v = float(np.sum(np.abs(lam)))
        if v < best:
            best = v
            best_lam = np.zeros(N, dtype=complex)
            best_lam[list(S)] = lam
    if N > rank:
        v = _restricted_min(A, b, start=best_lam)
        if v is not None:
            best = min(best, v)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
