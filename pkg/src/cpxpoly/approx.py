"""Best approximation in subspaces and (strong) uniqueness of the zero approximant.

All certifiers test the candidate y0 = 0; shift x beforehand to test another
candidate.  Statuses, from weakest to strongest:

    not-best < best-nonunique < unique < two-strong < one-strong

Constants come with a ``label``: "certified" when they follow from an exact
(programmatic or closed-form) computation, "sampled" when a minimisation over a
sphere was replaced by multistart search.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import clarabel
import mpmath
import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.optimize import linprog, minimize, minimize_scalar

from .algebra import (Subspace, as_vector, is_real_subspace, numerical_rank,
                      orthonormal_basis)
from .convexcore import (DEFAULT_TOL, MinMaxProblem, SumModuliProblem, _run,
                         _status_name, _sum_moduli_program, conic_solve,
                         solve_min_max_affine, solve_min_sum_moduli)
from .errors import (DomainError, PreconditionViolated, PrerequisiteFailed,
                     WrongNormKind)
from .norms import (AdjointNorm, LpNorm, NormHandle, PolytopeNorm, dual_norm_eval,
                    norm_eval, norm_many, norming_functional)

STATUSES = ("not-best", "best-nonunique", "unique", "one-strong", "two-strong")
ACTIVE_TOL = 1e-7
MARGIN_TOL = 1e-9
_BIG_BOX = 1e6


@dataclass(frozen=True)
class ApproxInstance:
    norm: NormHandle
    Y: Subspace
    x: np.ndarray

    def __post_init__(self):
        x = as_vector(self.x)
        object.__setattr__(self, "x", x)
        if x.size != self.norm.n or self.Y.n != self.norm.n:
            raise ValueError("dimensions of norm, subspace and point disagree")
        q = self.Y.orthonormal()
        r = x - q @ (q.conj().T @ x) if q.shape[1] else x
        if np.linalg.norm(r) < 1e-9 * max(1.0, float(np.linalg.norm(x))):
            raise DomainError("x lies in Y (distance < 1e-9)")


@dataclass
class BestApproxResult:
    y_star: np.ndarray
    coeffs: np.ndarray
    distance: float
    dual_cert: np.ndarray
    dual_norm: float
    value_residual: float
    annihilation_residual: float
    iterations: int = 0


@dataclass
class UniquenessReport:
    status: str
    constant: Optional[float] = None
    witness: Optional[np.ndarray] = None
    label: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        strong = self.status in ("one-strong", "two-strong")
        if strong != (self.constant is not None):
            raise ValueError("constant must be present exactly for strong statuses")
        if (self.status in ("not-best", "best-nonunique")) != (self.witness is not None):
            raise ValueError("witness must be present exactly for not-best / best-nonunique")


@dataclass
class AlphaProbeReport:
    alpha: float
    ts: np.ndarray
    ratios: np.ndarray
    verdict: str
    powered_norms: np.ndarray  # ||x - y_t||^alpha
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------- best approx

def _lp_best(h: LpNorm, x, B, tol):
    d = B.shape[1]

    def split(z):
        return z[:d] + 1j * z[d:]

    def fun(z):
        r = x - B @ split(z)
        val = norm_eval(h, r)
        if val == 0.0:
            return 0.0, np.zeros(2 * d)
        g = norming_functional(h, r) @ B
        return val, np.concatenate([-g.real, g.imag])

    c0 = np.linalg.lstsq(B, x, rcond=None)[0]
    z0 = np.concatenate([c0.real, c0.imag])
    res = minimize(fun, z0, jac=True, method="BFGS",
                   options={"gtol": min(1e-10, tol), "maxiter": 10000})
    return split(res.x), int(res.nit)


def best_approximation(inst: ApproxInstance, tol: float = DEFAULT_TOL) -> BestApproxResult:
    """Nearest point of Y to x together with a dual certificate f (f(x - y*) = dist, f|_Y = 0)."""
    h, x, B = inst.norm, inst.x, inst.Y.basis
    d = B.shape[1]
    iters = 0
    if d == 0:
        c = np.zeros(0, dtype=complex)
        f = norming_functional(h, x)
    elif isinstance(h, AdjointNorm):
        rep = solve_min_max_affine(MinMaxProblem(h.facets, x, B), tol)
        c, f, iters = rep.primal, rep.functional, rep.iterations
    elif isinstance(h, PolytopeNorm):
        rep = solve_min_sum_moduli(SumModuliProblem(h.U, x, B), tol)
        c, f, iters = rep.free, rep.dual, rep.iterations
    elif isinstance(h, LpNorm):
        c, iters = _lp_best(h, x, B, tol)
        f = norming_functional(h, x - B @ c)
    else:
        raise TypeError(f"unknown norm handle {h!r}")
    y = B @ c if d else np.zeros_like(x)
    dist = norm_eval(h, x - y, tol)
    dn = dual_norm_eval(h, f, tol)
    return BestApproxResult(
        y_star=y, coeffs=c, distance=dist, dual_cert=f, dual_norm=dn,
        value_residual=abs(complex(f @ (x - y)) - dist),
        annihilation_residual=float(np.max(np.abs(f @ B))) if d else 0.0,
        iterations=iters)


# ------------------------------------------------------------- LP helpers

def _realify_rows(w: np.ndarray) -> np.ndarray:
    """Rows R with R @ [re c; im c] = re(w @ c)."""
    return np.hstack([w.real, -w.imag])


def _complexify(z: np.ndarray) -> np.ndarray:
    m = z.size // 2
    return z[:m] + 1j * z[m:]


def _max_common_margin(R: np.ndarray):
    """max s  s.t.  R z >= s, |z_i| <= 1, s <= 1.  Returns (s, z)."""
    k, m = R.shape
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A = np.hstack([-R, np.ones((k, 1))])
    res = linprog(c, A_ub=A, b_ub=np.zeros(k), bounds=[(-1, 1)] * m + [(None, 1)],
                  method="highs")
    if res.status != 0:
        return 0.0, np.zeros(m)
    return float(res.x[-1]), res.x[:m]


def _forced_zero(R: np.ndarray):
    """Indices j with R_j z = 0 on the whole cone {R z >= 0}, plus a point maximising support."""
    k, m = R.shape
    c = np.concatenate([np.zeros(m), -np.ones(k)])
    A = np.hstack([-R, np.eye(k)])
    res = linprog(c, A_ub=A, b_ub=np.zeros(k),
                  bounds=[(-_BIG_BOX, _BIG_BOX)] * m + [(0, 1)] * k, method="highs")
    if res.status != 0:
        return list(range(k)), np.zeros(m)
    s = res.x[m:]
    return [j for j in range(k) if s[j] < 0.5], res.x[:m]


def _cone_nontrivial(N: np.ndarray, R: np.ndarray):
    """Nonzero point of {N zeta : R N zeta >= 0} or None.  N has orthonormal columns."""
    k = N.shape[1]
    if k == 0:
        return None
    if R.shape[0] == 0:
        return N[:, 0]
    RN = R @ N
    lin = scipy.linalg.null_space(RN, rcond=1e-10)
    if lin.shape[1]:
        return N @ lin[:, 0]
    res = linprog(-RN.sum(axis=0), A_ub=np.vstack([-RN, RN.sum(axis=0)[None, :]]),
                  b_ub=np.concatenate([np.zeros(RN.shape[0]), [1.0]]),
                  bounds=[(None, None)] * k, method="highs")
    if res.status == 0 and -res.fun > 1e-9:
        return N @ res.x
    return None


# --------------------------------------------------------- adjoint certifier

def _active(h: AdjointNorm, x):
    nx = norm_eval(h, x)
    v = h.facets @ (x / nx)
    return nx, v, np.flatnonzero(np.abs(v) >= 1 - ACTIVE_TOL)


def certify_adjoint(inst: ApproxInstance, tol: float = DEFAULT_TOL) -> UniquenessReport:
    """Decide best / unique / two-strong (dim Y = 1) for the candidate 0 under a facet norm."""
    h = inst.norm
    if not isinstance(h, AdjointNorm):
        raise WrongNormKind("certify_adjoint needs a facet-form norm")
    F = h.facets
    nx, v, J = _active(h, inst.x)
    Bo = orthonormal_basis(inst.Y.basis)
    d = Bo.shape[1]
    details = {"active": J.tolist(), "norm_x": nx}
    if d == 0:
        return UniquenessReport("unique", details=details)
    phase = np.conj(v[J])
    R = _realify_rows(phase[:, None] * (F[J] @ Bo))
    s, z = _max_common_margin(R)
    details["improvement_margin"] = s
    if s > MARGIN_TOL:
        return UniquenessReport("not-best", witness=Bo @ _complexify(z), details=details)
    # Uniqueness: shrink Z until it is {0} or every forced index vanishes on it.
    Z = Bo
    scale = max(1.0, float(np.abs(F).max()))
    rounds = 0
    while True:
        rounds += 1
        if Z.shape[1] == 0:
            break
        G = F[J] @ Z
        Rz = _realify_rows(phase[:, None] * G)
        E, zpt = _forced_zero(Rz)
        live = [j for j in E if np.linalg.norm(G[j]) > 1e-9 * scale]
        if not live:
            w = Z @ _complexify(zpt)
            if np.linalg.norm(w) < 1e-9:
                w = Z[:, 0]
            details["rounds"] = rounds
            return UniquenessReport("best-nonunique", witness=w, details=details)
        K = scipy.linalg.null_space(G[live], rcond=1e-10)
        Z = orthonormal_basis(Z @ K) if K.shape[1] else np.zeros((Z.shape[0], 0))
    details["rounds"] = rounds
    if d == 1:
        y = Bo[:, 0] / norm_eval(h, Bo[:, 0])
        mods = np.abs(F[J] @ y)
        nz = mods[mods > 1e-12]
        r = float(np.min(nz) ** 2)
        return UniquenessReport("two-strong", constant=r, label="certified", details=details)
    return UniquenessReport("unique", details=details)


# -------------------------------------------------------------- l1 certifier

def _l1_coordinates(inst: ApproxInstance):
    h = inst.norm
    if not isinstance(h, PolytopeNorm) or h._square_inv is None:
        raise WrongNormKind("certify_l1 needs a vertex-form norm with N = n vertices")
    Uinv = h._square_inv
    a = Uinv @ inst.x
    Bc = Uinv @ inst.Y.basis
    return h, a, orthonormal_basis(Bc)


def _l1_not_best(a, Yo, S):
    """max re(sum_S conj(s_j) b_j) - sum_{j notin S} |b_j| over b = Yo c, |c|_2 <= 1."""
    n, d = Yo.shape
    off = np.flatnonzero(~S)
    hvec = np.zeros(n, dtype=complex)
    hvec[S] = np.conj(a[S]) / np.abs(a[S])
    w = hvec @ Yo
    nv = 2 * d + off.size
    q = np.concatenate([-w.real, w.imag, np.ones(off.size)])
    rows, rhs, cones = [], [], []
    for i, j in enumerate(off):
        blk = np.zeros((3, nv))
        blk[0, 2 * d + i] = -1.0
        blk[1, :d], blk[1, d:2 * d] = -Yo[j].real, Yo[j].imag
        blk[2, :d], blk[2, d:2 * d] = -Yo[j].imag, -Yo[j].real
        rows.append(blk)
        rhs.append(np.zeros(3))
        cones.append(clarabel.SecondOrderConeT(3))
    ball = np.zeros((2 * d + 1, nv))
    ball[1:, :2 * d] = -np.eye(2 * d)
    rows.append(ball)
    rhs.append(np.concatenate([[1.0], np.zeros(2 * d)]))
    cones.append(clarabel.SecondOrderConeT(2 * d + 1))
    z, _, status = conic_solve(q, np.vstack(rows), np.concatenate(rhs), cones)
    return -float(q @ z), Yo @ _complexify(z[:2 * d])


def _g_l1(b, a, S):
    s = np.conj(a[S]) / np.abs(a[S])
    return float(np.sum(np.abs(b[~S])) - np.real(s @ b[S]))


def _sphere_min(fun, dim, rng, starts=64):
    """Multistart minimum of a degree-0 homogeneous function of real dim-vectors."""
    best, arg = np.inf, None
    for _ in range(starts):
        z0 = rng.standard_normal(dim)
        res = minimize(fun, z0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        if res.fun < best:
            best, arg = float(res.fun), res.x
    return best, arg


def certify_l1(inst: ApproxInstance, real_mode: bool = False, tol: float = DEFAULT_TOL,
               seed: int = 0) -> UniquenessReport:
    """Certifier for l1 up to a change of basis (vertex form with N = n)."""
    h, a, Yo = _l1_coordinates(inst)
    U = h.U
    n, d = Yo.shape
    rng = np.random.default_rng(seed)
    S = np.abs(a) > 1e-10 * np.abs(a).max()
    details = {"support": np.flatnonzero(S).tolist()}
    if real_mode:
        wit = is_real_subspace(Subspace.from_span(Yo))
        if np.abs(a.imag).max() > 1e-12 or not wit.is_real or not h.is_real():
            raise PreconditionViolated("real_mode needs real vertices, real x and real Y")
    gain, b = _l1_not_best(a, Yo, S)
    details["improvement"] = gain
    if gain > MARGIN_TOL:
        return _finish_l1(UniquenessReport("not-best", witness=U @ b, details=details), real_mode)
    cert = solve_min_sum_moduli(SumModuliProblem(np.eye(n), a, Yo), tol).dual
    fa = np.abs(cert)
    tight = np.flatnonzero((~S) & (fa >= 1 - 1e-6))
    dead = np.flatnonzero((~S) & (fa < 1 - 1e-6))
    # Real coordinates zeta of c (b = Yo c).  Equality set of g on Y is the cone K0.
    Yr = np.hstack([Yo.real, -Yo.imag])
    Yi = np.hstack([Yo.imag, Yo.real])
    eq = [Yr[dead], Yi[dead]]
    ft = cert[tight]
    # f_j b_j real  and  -re(f_j b_j) >= 0
    eq.append(ft.real[:, None] * Yi[tight] + ft.imag[:, None] * Yr[tight])
    rho = -(ft.real[:, None] * Yr[tight] - ft.imag[:, None] * Yi[tight])
    E = np.vstack([e for e in eq if e.size]) if any(e.size for e in eq) else np.zeros((0, 2 * d))
    N = scipy.linalg.null_space(E, rcond=1e-10) if E.shape[0] else np.eye(2 * d)
    k0 = _cone_nontrivial(N, rho)
    details["tight_off_support"] = tight.tolist()
    if k0 is None:
        if d == 1:
            y = Yo[:, 0]
            s = np.conj(a[S]) / np.abs(a[S])
            eps = (np.sum(np.abs(y[~S])) - abs(s @ y[S])) / np.sum(np.abs(y))
            label = "certified"
        else:
            fun = lambda z: _g_l1(Yo @ _complexify(z), a, S) / np.sum(np.abs(Yo @ _complexify(z)))
            eps, _ = _sphere_min(fun, 2 * d, rng)
            label = "sampled"
        rep = UniquenessReport("one-strong", constant=float(eps), label=label, details=details)
        return _finish_l1(rep, real_mode)
    # Second order: im(conj(a_j) b_j) on the support.
    Ar = a[S].real[:, None] * Yi[S] - a[S].imag[:, None] * Yr[S]  # im(conj a_j b_j)
    N2 = scipy.linalg.null_space(np.vstack([E, Ar]), rcond=1e-10)
    k2 = _cone_nontrivial(N2, rho)
    if k2 is not None:
        rep = UniquenessReport("best-nonunique", witness=U @ (Yo @ _complexify(k2)),
                               details=details)
        return _finish_l1(rep, real_mode)
    cval, label = _min_im_square(N, rho, Ar, Yo, rng)
    details["c"] = cval
    const = cval / (8.0 * float(np.abs(a).max()) ** 3)
    rep = UniquenessReport("two-strong", constant=const, label=label, details=details)
    return _finish_l1(rep, real_mode)


def _min_im_square(N, rho, Ar, Yo, rng):
    """min sum_S im(conj a_j b_j)^2 over K0 intersected with the l1 sphere."""
    AN = Ar @ N
    RN = rho @ N if rho.shape[0] else np.zeros((0, N.shape[1]))

    def ratio(zeta):
        b = Yo @ _complexify(N @ zeta)
        nb = np.sum(np.abs(b))
        return float(np.sum((AN @ zeta) ** 2) / nb ** 2) if nb > 0 else np.inf

    k = N.shape[1]
    if k == 1:
        return ratio(np.ones(1)), "certified"
    if k == 2 and RN.shape[0] == 0:
        # a one-real-parameter family of rays: dense angle scan plus local refinement
        phis = np.linspace(0, np.pi, 20001)
        vals = [ratio(np.array([np.cos(p), np.sin(p)])) for p in phis]
        i = int(np.argmin(vals))
        res = minimize_scalar(lambda p: ratio(np.array([np.cos(p), np.sin(p)])),
                              bounds=(phis[max(i - 1, 0)], phis[min(i + 1, len(phis) - 1)]),
                              method="bounded", options={"xatol": 1e-12})
        return float(min(res.fun, vals[i])), "certified"
    cons = [{"type": "ineq", "fun": lambda z: RN @ z}] if RN.shape[0] else []
    cons.append({"type": "eq", "fun": lambda z: np.array([z @ z - 1.0])})
    best = np.inf
    for _ in range(64):
        z0 = rng.standard_normal(k)
        z0 /= np.linalg.norm(z0)
        res = minimize(ratio, z0, method="SLSQP", constraints=cons,
                       options={"ftol": 1e-14, "maxiter": 500})
        if res.success and (not RN.shape[0] or np.min(RN @ res.x) >= -1e-9):
            best = min(best, float(res.fun))
    return best, "sampled"


def _finish_l1(rep: UniquenessReport, real_mode: bool) -> UniquenessReport:
    if real_mode:
        rep.details["real_upgrade_consistent"] = rep.status in ("not-best", "best-nonunique",
                                                                "one-strong")
    return rep


# ------------------------------------------------- general vertex-form check

def certify_vertex(inst: ApproxInstance, tol: float = DEFAULT_TOL, probes: int = 64,
                   seed: int = 0) -> UniquenessReport:
    """Best/uniqueness test for a general vertex norm.

    Uniqueness is tested on the optimal face by ``probes`` linear objectives over
    the set of optimal representations; it is evidence, not a proof.
    """
    h = inst.norm
    if not isinstance(h, PolytopeNorm):
        raise WrongNormKind("certify_vertex needs a vertex-form norm")
    x, B = inst.x, inst.Y.basis
    nx = norm_eval(h, x, tol)
    best = best_approximation(inst, tol)
    details = {"distance": best.distance, "norm_x": nx, "probes": probes,
               "limitation": "uniqueness sampled over optimal representations"}
    if best.distance < nx * (1 - 1e-8):
        return UniquenessReport("not-best", witness=best.y_star, details=details)
    U = h.U
    N = U.shape[1]
    d = B.shape[1]
    rng = np.random.default_rng(seed)
    row = np.zeros((1, 2 * N + 2 * d + N))
    row[0, 2 * N + 2 * d:] = 1.0
    Am, bm, cones, nv, _ = _sum_moduli_program(
        U, x, B, (row, np.array([nx * (1 + 1e-9) + 1e-12]), [clarabel.NonnegativeConeT(1)]))
    spread = 0.0
    witness = None
    for _ in range(probes):
        q = np.zeros(nv)
        q[2 * N:2 * N + 2 * d] = rng.standard_normal(2 * d)
        sol = _run(sp.csc_matrix((nv, nv)), q, Am, bm, cones, tol, 10000)
        if _status_name(sol) not in ("Solved", "AlmostSolved"):
            continue
        c = _complexify(np.asarray(sol.x)[2 * N:2 * N + 2 * d])
        y = B @ c
        if np.linalg.norm(y) > spread:
            spread, witness = float(np.linalg.norm(y)), y
    details["spread"] = spread
    if spread > 1e-5 * max(1.0, nx):
        return UniquenessReport("best-nonunique", witness=witness, details=details)
    return UniquenessReport("unique", details=details)


def certify(inst: ApproxInstance, tol: float = DEFAULT_TOL, seed: int = 0) -> UniquenessReport:
    h = inst.norm
    if isinstance(h, AdjointNorm):
        return certify_adjoint(inst, tol)
    if isinstance(h, PolytopeNorm) and h._square_inv is not None:
        return certify_l1(inst, tol=tol, seed=seed)
    if isinstance(h, PolytopeNorm):
        return certify_vertex(inst, tol, seed=seed)
    raise WrongNormKind("no certifier for l_p norms; use estimate_alpha_constant")


# ------------------------------------------------------- general 2-strong

def _one_strong_real_linf(W: np.ndarray) -> float:
    """min over w in the real span of W with |w|_inf = 1 of max_j(-w_j)."""
    m, k = W.shape
    best = np.inf
    for idx in range(m):
        if np.linalg.norm(W[idx]) < 1e-12:
            continue
        for sigma in (1.0, -1.0):
            # variables theta (k), s ; min s  s.t. -W theta - s <= 0 ; |W theta| <= 1 ; W_idx theta = sigma
            c = np.concatenate([np.zeros(k), [1.0]])
            A = np.vstack([np.hstack([-W, -np.ones((m, 1))]),
                           np.hstack([W, np.zeros((m, 1))]),
                           np.hstack([-W, np.zeros((m, 1))])])
            b = np.concatenate([np.zeros(m), np.ones(m), np.ones(m)])
            res = linprog(c, A_ub=A, b_ub=b, A_eq=np.concatenate([W[idx], [0.0]])[None, :],
                          b_eq=[sigma], bounds=[(None, None)] * (k + 1), method="highs")
            if res.status == 0:
                best = min(best, float(res.fun))
    return best


def general_2strong_check(inst: ApproxInstance, tol: float = DEFAULT_TOL) -> UniquenessReport:
    """Two-strong certificate when the active functionals map span(Y, x) onto a real subspace."""
    h = inst.norm
    if not isinstance(h, AdjointNorm):
        raise WrongNormKind("general_2strong_check needs a facet-form norm")
    pre = certify_adjoint(inst, tol)
    if pre.status not in ("unique", "two-strong"):
        raise PrerequisiteFailed(f"0 is not a unique best approximation (status {pre.status})")
    F = h.facets
    nx, v, J = _active(h, inst.x)
    mods = np.abs(v)
    inactive = np.setdiff1d(np.arange(F.shape[0]), J)
    M = float(mods[inactive].max()) if inactive.size else 0.0
    details = {"active": J.tolist(), "M": M}
    if M >= 1 - 1e-9:
        details.update(check="failed", reason="inactive modulus M not below the norm")
        return UniquenessReport("unique", details=details)
    Ft = (np.conj(v[J]) / mods[J])[:, None] * F[J]
    Bo = orthonormal_basis(inst.Y.basis)
    Zb = orthonormal_basis(np.column_stack([Bo, inst.x / nx]))
    TZ = orthonormal_basis(Ft @ Zb)
    TY = orthonormal_basis(Ft @ Bo)
    real_z = is_real_subspace(Subspace.from_span(TZ))
    real_y = is_real_subspace(Subspace.from_span(TY))
    details["image_real"] = real_z.is_real
    if not (real_z.is_real and real_y.is_real) or TZ.shape[1] != Zb.shape[1]:
        details.update(check="failed", reason="image of span(Y, x) is not a real subspace")
        return UniquenessReport("unique", details=details)
    r1 = _one_strong_real_linf(real_y.real_basis)
    if not np.isfinite(r1) or r1 <= 1e-12:
        details.update(check="failed", reason="real one-strong constant not positive")
        return UniquenessReport("unique", details=details)
    r1 = min(r1, (np.sqrt(5.0) - 1.0) / 2.0)
    r = min(r1 ** 2 / 2.0, (1.0 - r1) / 2.0)
    # c = min over y in Y of |y|_0 / |y| with |y|_0 = max_{j in E} |f_j(y)|
    c = np.inf
    FY = Ft @ Bo
    for k in range(F.shape[0]):
        row = F[k] @ Bo
        if np.linalg.norm(row) < 1e-12:
            continue
        z0 = np.conj(row) / np.vdot(row, row)
        K = scipy.linalg.null_space(row[None, :], rcond=1e-10)
        rep = solve_min_max_affine(MinMaxProblem(FY, z0, K if K.shape[1] else None), tol)
        c = min(c, rep.value)
    details.update(check="passed", r1=r1, r=r, c=c)
    return UniquenessReport("two-strong", constant=float(c * c * r), label="certified",
                            details=details)


# ---------------------------------------------------------- Smarzewski

def smarzewski_constant(inst: ApproxInstance, functionals: Sequence, weights: Sequence,
                        tol: float = DEFAULT_TOL) -> float:
    """r with |x - y|^2 >= |x|^2 + r |y|^2 from a weighted family of norming functionals."""
    h, x = inst.norm, inst.x
    Fs = np.array([as_vector(f) for f in functionals])
    a = np.asarray(weights, dtype=float)
    if a.size != Fs.shape[0] or np.any(a <= 0) or abs(a.sum() - 1) > 1e-9:
        raise PreconditionViolated("weights must be positive and sum to one")
    for f in Fs:
        if abs(dual_norm_eval(h, f, tol) - 1) > 1e-7:
            raise PreconditionViolated("every functional needs dual norm one")
    Bo = orthonormal_basis(inst.Y.basis)
    f = a @ Fs
    if Bo.shape[1] and np.max(np.abs(f @ Bo)) > 1e-7:
        raise PreconditionViolated("weighted functional does not annihilate Y")
    if abs(complex(f @ x) - norm_eval(h, x, tol)) > 1e-6:
        raise PreconditionViolated("weighted functional does not norm x")
    G = Fs @ Bo
    if numerical_rank(G) < Bo.shape[1]:
        raise PreconditionViolated("some nonzero y in Y is annihilated by every functional")
    H = (G.conj().T * a) @ G
    H = (H + H.conj().T) / 2
    if isinstance(h, AdjointNorm):
        Hb = h.facets @ Bo
        sol = np.linalg.solve(H, Hb.conj().T)
        return float(1.0 / np.max(np.real(np.sum(Hb * sol.T, axis=1))))
    lam = float(np.linalg.eigvalsh(H)[0])
    if isinstance(h, PolytopeNorm):
        Mx = np.linalg.pinv(h.U) @ Bo
        K = float(np.sum(np.linalg.norm(Mx, axis=1)))
    else:
        K = h.n ** max(0.0, 1.0 / h.p - 0.5)
    return lam / K ** 2


# ------------------------------------------------------------ sampling

def _require_best(inst: ApproxInstance, tol: float):
    nx = norm_eval(inst.norm, inst.x, tol)
    dist = best_approximation(inst, tol).distance
    if dist < nx * (1 - 1e-7):
        raise PrerequisiteFailed("0 is not a best approximation")
    return nx


def estimate_alpha_constant(inst: ApproxInstance, alpha: float, samples: int = 10 ** 4,
                            seed: int = 0, extra_points: Optional[Sequence] = None,
                            tol: float = DEFAULT_TOL):
    """Sampled min of (|x-y|^a - |x|^a)/|y|^a over y in Y.  Returns (r_hat, worst y)."""
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    h = inst.norm
    nx = _require_best(inst, tol)
    rng = np.random.default_rng(seed)
    B = inst.Y.basis
    d = B.shape[1]
    small = nx * 2.0 ** -np.arange(1, 21)
    ndir = max(1, samples // (len(small) + 8))
    C = rng.standard_normal((d, ndir)) + 1j * rng.standard_normal((d, ndir))
    D = B @ C
    D = D / norm_many(h, D, tol)[None, :]
    pts = []
    for k in range(ndir):
        ann = rng.uniform(nx / 2, 4 * nx, size=8)
        for s in np.concatenate([small, ann]):
            pts.append(s * D[:, k])
    if extra_points is not None:
        pts.extend(as_vector(p) for p in extra_points)
    Y = np.column_stack(pts)
    ny = norm_many(h, Y, tol)
    nd = norm_many(h, inst.x[:, None] - Y, tol)
    ratios = (nd ** alpha - nx ** alpha) / ny ** alpha
    i = int(np.argmin(ratios))
    return float(ratios[i]), Y[:, i]


def _mp_norm(h: NormHandle, v) -> mpmath.mpf:
    if isinstance(h, AdjointNorm):
        F = h.facets
        return max(abs(mpmath.fsum(mpmath.mpc(F[j, i]) * v[i] for i in range(h.n)))
                   for j in range(F.shape[0]))
    if isinstance(h, LpNorm):
        p = mpmath.mpf(h.p)
        return mpmath.fsum(abs(c) ** p for c in v) ** (1 / p)
    raise TypeError


def _verdict(ratios: np.ndarray) -> str:
    r = np.asarray(ratios, dtype=float)
    if r.size < 2 or not np.all(np.isfinite(r)):
        return "bounded-below"
    # judge the decay from the peak on, so a rising pre-asymptotic start is ignored
    tail = r[int(np.argmax(r)):]
    if tail.size < 2:
        return "bounded-below"
    steps = np.diff(tail) <= 1e-12 * np.maximum(np.abs(tail[:-1]), 1e-300)
    monotone = steps.mean() >= 0.9
    return "vanishing" if (tail[-1] < 0.01 * tail[0] and monotone) else "bounded-below"


def alpha_probe_points(inst: ApproxInstance, points: Sequence, alpha: float,
                       params: Optional[Sequence] = None, exact: bool = True) -> AlphaProbeReport:
    """Ratios (|x-y|^a - |x|^a)/|y|^a along an explicit sequence of points y of Y."""
    h = inst.norm
    pts = [as_vector(p) for p in points]
    params = np.arange(1, len(pts) + 1, dtype=float) if params is None else np.asarray(params)
    use_mp = exact and isinstance(h, (AdjointNorm, LpNorm))
    sq = isinstance(h, PolytopeNorm) and h._square_inv is not None
    ratios, pw = [], []
    with mpmath.workdps(60):
        a = mpmath.mpf(alpha)
        if use_mp or (exact and sq):
            xm = [mpmath.mpc(c) for c in (h._square_inv @ inst.x if sq else inst.x)]
            if sq:
                nrm = lambda v: mpmath.fsum(abs(c) for c in v)
            else:
                nrm = lambda v: _mp_norm(h, v)
            nx = nrm(xm)
            for y in pts:
                ym = [mpmath.mpc(c) for c in (h._square_inv @ y if sq else y)]
                nd = nrm([xi - yi for xi, yi in zip(xm, ym)])
                pw.append(float(nd ** a))
                ratios.append(float((nd ** a - nx ** a) / nrm(ym) ** a))
        else:
            nx = norm_eval(h, inst.x)
            for y in pts:
                nd = norm_eval(h, inst.x - y)
                pw.append(nd ** alpha)
                ratios.append((nd ** alpha - nx ** alpha) / norm_eval(h, y) ** alpha)
    ratios = np.array(ratios)
    return AlphaProbeReport(float(alpha), params, ratios, _verdict(ratios), np.array(pw))


def alpha_probe(inst: ApproxInstance, direction, alpha: float,
                t_list: Optional[Sequence[float]] = None, exact: bool = True) -> AlphaProbeReport:
    """Ratios along y = t * direction for decreasing t."""
    dvec = as_vector(direction)
    if np.linalg.norm(dvec) == 0:
        raise ValueError("direction must be nonzero")
    if not inst.Y.contains(dvec):
        raise ValueError("direction must lie in Y")
    ts = np.asarray(t_list if t_list is not None else 2.0 ** -np.arange(1, 21), dtype=float)
    if np.any(np.diff(ts) >= 0) or np.any(ts <= 0):
        raise ValueError("t_list must be positive and strictly decreasing")
    if exact:
        # scale in high precision so that t * direction is formed exactly
        h = inst.norm
        sq = isinstance(h, PolytopeNorm) and h._square_inv is not None
        if isinstance(h, (AdjointNorm, LpNorm)) or sq:
            return _alpha_probe_mp(inst, dvec, alpha, ts, sq)
    return alpha_probe_points(inst, [t * dvec for t in ts], alpha, ts, exact=False)


def _alpha_probe_mp(inst, dvec, alpha, ts, sq):
    h = inst.norm
    with mpmath.workdps(60):
        a = mpmath.mpf(alpha)
        xv = h._square_inv @ inst.x if sq else inst.x
        dv = h._square_inv @ dvec if sq else dvec
        xm = [mpmath.mpc(c) for c in xv]
        dm = [mpmath.mpc(c) for c in dv]
        nrm = (lambda v: mpmath.fsum(abs(c) for c in v)) if sq else (lambda v: _mp_norm(h, v))
        nx = nrm(xm)
        nd0 = nrm(dm)
        ratios, pw = [], []
        for t in ts:
            tm = mpmath.mpf(t)
            ndt = nrm([xi - tm * di for xi, di in zip(xm, dm)])
            pw.append(float(ndt ** a))
            ratios.append(float((ndt ** a - nx ** a) / (tm * nd0) ** a))
    ratios = np.array(ratios)
    return AlphaProbeReport(float(alpha), ts, ratios, _verdict(ratios), np.array(pw))
