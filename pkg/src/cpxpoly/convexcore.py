"""Cone programs behind every norm and approximation computation.

Two problems are solved, both as second-order cone programs over paired real
coordinates with the Clarabel interior-point solver:

* ``solve_min_sum_moduli``:  min sum_j |lam_j|  s.t.  A lam + C c = b
  (C optional, c free).  The dual certificate is a functional f with
  |f(a_j)| <= 1, f(C) = 0 and re f(b) = value.
* ``solve_min_max_affine``:  min_c max_j |f_j(x - B c)|.  The multipliers
  alpha_j >= 0 sum to one and mu_j = alpha_j * phase_j assemble the functional
  sum_j mu_j f_j which annihilates span(B) and pairs with x to the value.
"""

from dataclasses import dataclass, field
from typing import Optional

import clarabel
import numpy as np
import scipy.sparse as sp

from .errors import Infeasible, MaxIterations

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200000


@dataclass
class SolveReport:
    value: float
    primal: np.ndarray
    dual: np.ndarray
    gap: float
    iterations: int
    converged: bool
    status: str = ""
    functional: Optional[np.ndarray] = None
    free: Optional[np.ndarray] = None
    info: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SumModuliProblem:
    A: np.ndarray
    b: np.ndarray
    C: Optional[np.ndarray] = None


@dataclass(frozen=True)
class MinMaxProblem:
    F: np.ndarray
    x: np.ndarray
    B: Optional[np.ndarray] = None


def _settings(tol: float, max_iter: int):
    s = clarabel.DefaultSettings()
    s.verbose = False
    inner = max(1e-12, min(1e-10, tol * 1e-2))
    s.tol_gap_abs = inner
    s.tol_gap_rel = inner
    s.tol_feas = inner
    s.tol_ktratio = 1e-8
    s.max_iter = int(min(max_iter, 10000))
    return s


def _run(P, q, A, b, cones, tol, max_iter):
    solver = clarabel.DefaultSolver(P, q, sp.csc_matrix(A), b, cones, _settings(tol, max_iter))
    return solver.solve()


def _status_name(sol) -> str:
    return str(sol.status).split(".")[-1]


def _sum_moduli_program(A, b, C, extra_rows=None):
    n, N = A.shape
    k = 0 if C is None else C.shape[1]
    nv = 2 * N + 2 * k + N
    Ar = np.block([[A.real, -A.imag], [A.imag, A.real]])
    blocks = [Ar]
    if k:
        blocks.append(np.block([[C.real, -C.imag], [C.imag, C.real]]))
    blocks.append(np.zeros((2 * n, N)))
    Aeq = np.hstack(blocks)
    beq = np.concatenate([b.real, b.imag])
    rows = [Aeq]
    rhs = [beq]
    cones = [clarabel.ZeroConeT(2 * n)]
    soc = np.zeros((3 * N, nv))
    for j in range(N):
        soc[3 * j, 2 * N + 2 * k + j] = -1.0
        soc[3 * j + 1, j] = -1.0
        soc[3 * j + 2, N + j] = -1.0
    rows.append(soc)
    rhs.append(np.zeros(3 * N))
    cones += [clarabel.SecondOrderConeT(3)] * N
    if extra_rows is not None:
        er, eb, ec = extra_rows
        rows.append(er)
        rhs.append(eb)
        cones += ec
    return np.vstack(rows), np.concatenate(rhs), cones, nv, k


def solve_min_sum_moduli(p: SumModuliProblem, tol: float = DEFAULT_TOL,
                         max_iter: int = DEFAULT_MAX_ITER, polish: bool = True) -> SolveReport:
    """Minimum sum of moduli representation of b by the columns of A."""
    A = np.asarray(p.A, dtype=complex)
    b = np.asarray(p.b, dtype=complex).reshape(-1)
    C = None if p.C is None or np.size(p.C) == 0 else np.asarray(p.C, dtype=complex)
    n, N = A.shape
    if tol <= 0:
        raise ValueError("tol must be positive")
    bnorm = float(np.linalg.norm(b))
    full = A if C is None else np.hstack([A, C])
    sol_ls = np.linalg.lstsq(full, b, rcond=None)[0]
    if np.linalg.norm(full @ sol_ls - b) > tol * (1 + bnorm):
        raise Infeasible("right-hand side is not in the range of the columns")
    k = 0 if C is None else C.shape[1]
    if bnorm == 0.0:
        return SolveReport(0.0, np.zeros(N, dtype=complex), np.zeros(n, dtype=complex), 0.0, 0,
                           True, "Solved", np.zeros(n, dtype=complex),
                           np.zeros(k, dtype=complex))
    Am, bm, cones, nv, k = _sum_moduli_program(A, b, C)
    q = np.concatenate([np.zeros(2 * N + 2 * k), np.ones(N)])
    sol = _run(sp.csc_matrix((nv, nv)), q, Am, bm, cones, tol, max_iter)
    status = _status_name(sol)
    v = np.asarray(sol.x)
    z = np.asarray(sol.z)
    lam = v[:N] + 1j * v[N:2 * N]
    c = v[2 * N:2 * N + k] + 1j * v[2 * N + k:2 * N + 2 * k]
    # dual of the equality block: Clarabel maximises -b'z, so f = -(z_re - i z_im)
    f = -z[:n] + 1j * z[n:2 * n]
    if polish and status == "Solved":
        lam, c = _polish_sum_moduli(A, b, C, lam, c, tol, max_iter)
    # restore exact feasibility so that value is an honest upper bound
    corr = np.linalg.pinv(full) @ (b - A @ lam - (C @ c if k else 0))
    lam = lam + corr[:N]
    if k:
        c = c + corr[N:]
    value = float(np.sum(np.abs(lam)))
    scale = max(1.0, float(np.max(np.abs(f @ A))) if N else 1.0)
    f = f / scale
    dual_obj = float(np.real(f @ b))
    gap = max(0.0, value - dual_obj)
    resid = float(np.linalg.norm(A @ lam + (C @ c if k else 0) - b))
    converged = status in ("Solved", "AlmostSolved") and gap <= tol * (1 + value) \
        and resid <= tol * (1 + bnorm)
    rep = SolveReport(value, lam, f, gap, int(sol.iterations), converged, status, f, c,
                      {"residual": resid, "dual_objective": dual_obj})
    if not converged:
        raise MaxIterations(f"min-sum-moduli solve ended with status {status}, gap {gap:.3e}",
                            rep)
    return rep


def solve_min_sum_moduli_batch(A, Bcols, tol: float = DEFAULT_TOL, chunk: int = 256,
                               max_iter: int = DEFAULT_MAX_ITER):
    """Values of min sum |lam| s.t. A lam = b for every column b of ``Bcols``.

    Columns are solved together as one separable cone program per chunk.  The
    returned values are sum |lam| after an exact least-squares feasibility
    correction, so each is an upper bound within solver accuracy of the optimum.
    """
    A = np.asarray(A, dtype=complex)
    Bc = np.asarray(Bcols, dtype=complex)
    n, N = A.shape
    m = Bc.shape[1]
    Ar = sp.csc_matrix(np.block([[A.real, -A.imag], [A.imag, A.real]]))
    block_eq = sp.hstack([Ar, sp.csc_matrix((2 * n, N))])
    sel = np.zeros((3 * N, 3 * N))
    for j in range(N):
        sel[3 * j, 2 * N + j] = -1.0
        sel[3 * j + 1, j] = -1.0
        sel[3 * j + 2, N + j] = -1.0
    block = sp.vstack([block_eq, sp.csc_matrix(sel)]).tocsc()
    pinv = np.linalg.pinv(A)
    values = np.empty(m)
    lams = np.empty((N, m), dtype=complex)
    for start in range(0, m, chunk):
        cols = Bc[:, start:start + chunk]
        k = cols.shape[1]
        Am = sp.kron(sp.identity(k, format="csc"), block, format="csc")
        bm = np.hstack([cols.real.T, cols.imag.T, np.zeros((k, 3 * N))]).reshape(-1)
        cones = [clarabel.ZeroConeT(2 * n)] + [clarabel.SecondOrderConeT(3)] * N
        q = np.tile(np.concatenate([np.zeros(2 * N), np.ones(N)]), k)
        sol = _run(sp.csc_matrix((3 * N * k, 3 * N * k)), q, Am, bm, cones * k, tol, max_iter)
        status = _status_name(sol)
        if status not in ("Solved", "AlmostSolved"):
            raise MaxIterations(f"batched min-sum-moduli solve ended with status {status}")
        v = np.asarray(sol.x).reshape(k, 3 * N)
        lam = (v[:, :N] + 1j * v[:, N:2 * N]).T
        lam = lam + pinv @ (cols - A @ lam)
        lams[:, start:start + k] = lam
        values[start:start + k] = np.sum(np.abs(lam), axis=0)
    return values, lams


def _polish_sum_moduli(A, b, C, lam, c, tol, max_iter):
    """Among (near-)optimal representations pick the one of least Euclidean norm."""
    n, N = A.shape
    k = 0 if C is None else C.shape[1]
    value = float(np.sum(np.abs(lam)))
    budget = value * (1 + 10 * tol * 1e-2) + 1e-14
    nv = 2 * N + 2 * k + N
    row = np.zeros((1, nv))
    row[0, 2 * N + 2 * k:] = 1.0
    Am, bm, cones, nv, k = _sum_moduli_program(
        A, b, C, (row, np.array([budget]), [clarabel.NonnegativeConeT(1)]))
    P = sp.diags(np.concatenate([np.ones(2 * N), 1e-12 * np.ones(2 * k + N)])).tocsc()
    sol = _run(P, np.zeros(nv), Am, bm, cones, tol, max_iter)
    if _status_name(sol) not in ("Solved", "AlmostSolved"):
        return lam, c
    v = np.asarray(sol.x)
    lam2 = v[:N] + 1j * v[N:2 * N]
    c2 = v[2 * N:2 * N + k] + 1j * v[2 * N + k:2 * N + 2 * k]
    # Keep the polished point only if it stays optimal once made exactly feasible.
    full = A if C is None else np.hstack([A, C])
    corr = np.linalg.pinv(full) @ (b - A @ lam2 - (C @ c2 if k else 0))
    lam2 = lam2 + corr[:N]
    c2 = c2 + corr[N:] if k else c2
    if np.sum(np.abs(lam2)) <= value * (1 + 2e-9) + 1e-12:
        return lam2, c2
    return lam, c


def _min_max_program(F, x, B, extra=None):
    M = F.shape[0]
    d = 0 if B is None else B.shape[1]
    nv = 2 * d + 1
    Fx = F @ x
    G = F @ B if d else np.zeros((M, 0), dtype=complex)
    Am = np.zeros((3 * M, nv))
    bm = np.zeros(3 * M)
    for j in range(M):
        Am[3 * j, 2 * d] = -1.0
        if d:
            Am[3 * j + 1, :d] = G[j].real
            Am[3 * j + 1, d:2 * d] = -G[j].imag
            Am[3 * j + 2, :d] = G[j].imag
            Am[3 * j + 2, d:2 * d] = G[j].real
        bm[3 * j + 1] = Fx[j].real
        bm[3 * j + 2] = Fx[j].imag
    cones = [clarabel.SecondOrderConeT(3)] * M
    if extra is not None:
        er, eb, ec = extra
        Am = np.vstack([Am, er])
        bm = np.concatenate([bm, eb])
        cones = cones + ec
    return Am, bm, cones, nv, d


def solve_min_max_affine(p: MinMaxProblem, tol: float = DEFAULT_TOL,
                         max_iter: int = DEFAULT_MAX_ITER, polish: bool = True) -> SolveReport:
    """Minimise max_j |f_j(x - B c)| over complex c."""
    F = np.atleast_2d(np.asarray(p.F, dtype=complex))
    x = np.asarray(p.x, dtype=complex).reshape(-1)
    B = None if p.B is None or np.size(p.B) == 0 else np.asarray(p.B, dtype=complex)
    if F.shape[0] == 0:
        raise ValueError("at least one functional is required")
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = F.shape[0]
    if B is None:
        mods = np.abs(F @ x)
        value = float(mods.max())
        active = mods >= value - tol
        alpha = active / active.sum()
        phase = np.ones(M, dtype=complex)
        nz = mods > 0
        phase[nz] = np.conj((F @ x)[nz]) / mods[nz]
        mu = alpha * phase
        return SolveReport(value, np.zeros(0, dtype=complex), alpha, 0.0, 0, True, "Solved",
                           mu @ F, None, {"mu": mu, "active": np.flatnonzero(active)})
    Am, bm, cones, nv, d = _min_max_program(F, x, B)
    q = np.zeros(nv)
    q[-1] = 1.0
    sol = _run(sp.csc_matrix((nv, nv)), q, Am, bm, cones, tol, max_iter)
    status = _status_name(sol)
    v = np.asarray(sol.x)
    z = np.asarray(sol.z).reshape(M, 3)
    c = v[:d] + 1j * v[d:2 * d]
    alpha = np.maximum(z[:, 0], 0.0)
    mu = -(z[:, 1] - 1j * z[:, 2])
    if polish and status == "Solved" and d:
        c = _polish_min_max(F, x, B, c, tol, max_iter)
    resid = F @ (x - B @ c)
    mods = np.abs(resid)
    value = float(mods.max())
    asum = float(alpha.sum())
    if asum > 0:
        alpha = alpha / asum
        mu = mu / asum
    functional = mu @ F
    dual_obj = float(np.real(functional @ x))
    gap = max(0.0, value - dual_obj)
    ann = float(np.max(np.abs(functional @ B))) if d else 0.0
    active = np.flatnonzero(mods >= value - max(tol, 1e-7) * max(1.0, value))
    converged = status in ("Solved", "AlmostSolved") and gap <= tol * (1 + value)
    rep = SolveReport(value, c, alpha, gap, int(sol.iterations), converged, status, functional,
                      None, {"mu": mu, "active": active, "annihilation": ann,
                             "dual_objective": dual_obj})
    if not converged:
        raise MaxIterations(f"min-max solve ended with status {status}, gap {gap:.3e}", rep)
    return rep


def _polish_min_max(F, x, B, c, tol, max_iter):
    M = F.shape[0]
    d = B.shape[1]
    value = float(np.abs(F @ (x - B @ c)).max())
    budget = value * (1 + tol * 1e-1) + 1e-14
    nv = 2 * d + 1
    row = np.zeros((1, nv))
    row[0, -1] = 1.0
    Am, bm, cones, nv, d = _min_max_program(
        F, x, B, (row, np.array([budget]), [clarabel.NonnegativeConeT(1)]))
    P = sp.diags(np.concatenate([np.ones(2 * d), [1e-12]])).tocsc()
    sol = _run(P, np.zeros(nv), Am, bm, cones, tol, max_iter)
    if _status_name(sol) not in ("Solved", "AlmostSolved"):
        return c
    v = np.asarray(sol.x)
    c2 = v[:d] + 1j * v[d:2 * d]
    if np.abs(F @ (x - B @ c2)).max() <= value + tol * (1 + value):
        return c2
    return c


def conic_solve(q, A, b, cones, P=None, tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER):
    """Thin wrapper: min 1/2 x'Px + q'x  s.t.  b - A x in cones.  Returns (x, z, status)."""
    q = np.asarray(q, dtype=float)
    nv = q.size
    P = sp.csc_matrix((nv, nv)) if P is None else sp.csc_matrix(P)
    sol = _run(P, q, np.asarray(A, dtype=float), np.asarray(b, dtype=float), cones, tol, max_iter)
    return np.asarray(sol.x), np.asarray(sol.z), _status_name(sol)
