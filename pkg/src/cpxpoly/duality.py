"""Equalizing scalars, two-vertex maximizing functionals and witness families.

A regular face of a balanced complex polytope is carried by a functional f with
|f(u_k)| = |f(u_l)| = 1 and |f(u_j)| < 1 for all other vertices.  Rotating the
value at u_l along the unit circle while keeping f(u_k) = 1 yields infinitely
many pairwise non-proportional extreme functionals of the dual ball, which is
what ``non_self_duality_witness`` returns as a finite certificate family.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .convexcore import SumModuliProblem, solve_min_sum_moduli
from .errors import DegeneratePoints, MaxIterations, RetryExhausted
from .norms import PolytopeNorm, dual_norm_eval

ACTIVE_TOL = 1e-7


@dataclass(frozen=True)
class RegularFace:
    f: np.ndarray
    k: int
    l: int
    margin: float


@dataclass(frozen=True)
class WitnessFamily:
    functionals: List[np.ndarray]
    pair: Tuple[int, int]
    ts: List[complex]
    delta: float


def _hull_edge(z: np.ndarray) -> Tuple[int, int]:
    """First edge (counter-clockwise) of the convex hull of the points z.

    Collinear inputs return the two extreme points of the segment.
    """
    pts = sorted(range(len(z)), key=lambda i: (z[i].real, z[i].imag))

    def cross(o, a, b):
        return ((z[a] - z[o]).conjugate() * (z[b] - z[o])).imag

    lower = []
    for i in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], i) <= 0:
            lower.pop()
        lower.append(i)
    upper = []
    for i in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], i) <= 0:
            upper.pop()
        upper.append(i)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2:
        return hull[0], hull[1]
    return hull[0], hull[1]


def find_equalizing_scalar(points, radius_cap: float = 1.0):
    """Return (t, k, l) with |t z_k + 1| = |t z_l + 1| > |t z_j + 1| for j != k, l.

    -1/t is placed on the perpendicular bisector of a hull edge (z_k, z_l), far
    out on the side where the remaining points lie.
    """
    z = np.asarray(points, dtype=complex).reshape(-1)
    m = z.size
    if m < 2:
        raise DegeneratePoints("at least two points are needed")
    if radius_cap <= 0:
        raise ValueError("radius_cap must be positive")
    diff = np.abs(z[:, None] - z[None, :]) + np.eye(m) * 1e300
    if diff.min() <= 1e-9:
        raise DegeneratePoints("points are not pairwise distinct")
    k, l = _hull_edge(z)
    mid = (z[k] + z[l]) / 2
    edge = z[l] - z[k]
    half = abs(edge) / 2
    normal = -1j * edge / abs(edge)  # right of the travel direction
    others = [j for j in range(m) if j not in (k, l)]
    # the remaining points lie on the side -normal or on the edge line
    side = [((z[j] - mid) * np.conj(normal)).real for j in others]
    if side and max(side) > 1e-12 * max(1.0, np.abs(z).max()):
        normal = -normal
        side = [-s for s in side]
    # |z_j - c|^2 = |z_j - mid|^2 + R^2 + 2 R <z_j - mid, normal>,  c = mid - R normal
    need = 0.0
    for j, s in zip(others, side):
        excess = abs(z[j] - mid) ** 2 - half ** 2
        if s < -1e-14:
            need = max(need, excess / (2 * -s))
    scale = max(1.0, float(np.abs(z).max()))
    R = max(2.0 * need + scale, 1.0 / radius_cap + abs(mid) + 1.0)
    c = mid - R * normal
    t = -1.0 / c
    if abs(t) > radius_cap:
        t = t * radius_cap / abs(t)
    return complex(t), int(k), int(l)


def _boundary_certificate(P: PolytopeNorm, tol: float):
    """Supporting functional at a boundary point with a >= 2-sparse representation."""
    U = P.U
    N = U.shape[1]
    for a in range(N):
        for b in range(a + 1, N):
            x = U[:, a] + U[:, b]
            try:
                rep = solve_min_sum_moduli(SumModuliProblem(U, x), tol)
            except MaxIterations as exc:
                # only an approximate supporting functional is needed here
                if exc.report is None or exc.report.status not in ("Solved", "AlmostSolved"):
                    raise
                rep = exc.report
            nrm = rep.value
            if nrm <= 1e-12:
                continue
            h = rep.dual / max(1.0, float(np.max(np.abs(P.vertices @ rep.dual))))
            mods = np.abs(P.vertices @ h)
            active = np.flatnonzero(mods >= 1 - ACTIVE_TOL)
            if active.size >= 2:
                return h, active
    raise RetryExhausted("no boundary point with a two-vertex supporting functional found")


def find_regular_face(P: PolytopeNorm, seed: int = 0, tol: float = 1e-9,
                      max_retries: int = 100) -> RegularFace:
    """Functional of dual norm one attaining modulus 1 at exactly two vertices."""
    V = P.vertices
    N, n = V.shape
    if n < 2:
        raise ValueError("dimension must be at least 2")
    rng = np.random.default_rng(seed)
    g = None
    for _ in range(max_retries):
        cand = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        mods = np.sort(np.abs(V @ cand))
        if N < 2 or np.min(np.diff(mods)) > 1e-6:
            g = cand
            break
    if g is None:
        raise RetryExhausted("could not separate vertex moduli with a random functional")
    if N == 2:
        k, l = 0, 1
        f = _fit_values(V, k, l, 1.0, 1.0)
        return RegularFace(f, k, l, 1.0)
    h, active = _boundary_certificate(P, tol)
    hv = V @ h
    inactive = np.setdiff1d(np.arange(N), active)
    # rotate active vertices so that h(u_j) = 1 there
    rot = np.conj(hv[active]) / np.abs(hv[active])
    z = (V[active] @ g) * rot
    R1 = float(np.max(np.abs(hv[inactive]))) if inactive.size else 0.0
    R2 = float(np.max(np.abs(V[inactive] @ g))) if inactive.size else 0.0
    if active.size == 2:
        ka, la = 0, 1
        t = 0.0
    else:
        R3 = float(np.max(np.abs(z)))
        cap = 0.5 * (1 - R1) / (R2 + R3) if (R2 + R3) > 0 else 1.0
        t, ka, la = find_equalizing_scalar(z, radius_cap=cap)
    k, l = int(active[ka]), int(active[la])
    f = t * g + h
    fv = V @ f
    f = _fit_values(V, k, l, fv[k] / abs(fv[k]) * np.abs(fv[[k, l]]).mean(),
                    fv[l] / abs(fv[l]) * np.abs(fv[[k, l]]).mean(), base=f)
    f = f / abs(V[k] @ f)
    mods = np.abs(V @ f)
    others = [j for j in range(N) if j not in (k, l)]
    margin = 1.0 - (float(np.max(mods[others])) if others else 0.0)
    if margin <= 0:
        raise RetryExhausted("constructed functional does not separate the face")
    return RegularFace(f, k, l, margin)


def _fit_values(V, k, l, vk, vl, base=None):
    """Least-change correction of ``base`` so that f(u_k) = vk and f(u_l) = vl."""
    n = V.shape[1]
    base = np.zeros(n, dtype=complex) if base is None else np.asarray(base, dtype=complex)
    A = V[[k, l]]
    r = np.array([vk, vl]) - A @ base
    return base + np.linalg.pinv(A) @ r


def non_self_duality_witness(P: PolytopeNorm, K: int, seed: int = 0,
                             tol: float = 1e-9) -> WitnessFamily:
    """K extreme functionals f^t with f^t(u_k) = 1, f^t(u_l) = t for distinct unit t.

    Vertex values at u_k, u_l are taken after rotating those two vertices so that
    the regular-face functional equals 1 on both.
    """
    if K < 3:
        raise ValueError("K must be at least 3")
    face = find_regular_face(P, seed=seed, tol=tol)
    V = P.vertices
    N = V.shape[0]
    k, l = face.k, face.l
    pk, pl = V[k] @ face.f, V[l] @ face.f  # unit modulus
    others = [j for j in range(N) if j not in (k, l)]
    delta = np.pi / 8
    for _ in range(60):
        thetas = []
        m = 1
        while len(thetas) < K:
            thetas.append(m * delta)
            if len(thetas) < K:
                thetas.append(-m * delta)
            m += 1
        ts = [complex(np.exp(1j * th)) for th in thetas]
        fams = [_fit_values(V, k, l, pk, pl * t, base=face.f) for t in ts]
        ok = True
        for fam in fams:
            mods = np.abs(V @ fam)
            if others and np.max(mods[others]) >= 1 - face.margin / 2:
                ok = False
                break
            if abs(dual_norm_eval(P, fam) - 1.0) > 1e-8:
                ok = False
                break
        if ok:
            return WitnessFamily(fams, (k, l), ts, float(delta))
        delta /= 2
    raise RetryExhausted("no admissible arc spacing found")


def family_is_pairwise_nonproportional(fam: WitnessFamily, rel_tol: float = 1e-9) -> bool:
    F = fam.functionals
    for i in range(len(F)):
        for j in range(i + 1, len(F)):
            s = np.linalg.svd(np.vstack([F[i], F[j]]), compute_uv=False)
            if s[1] <= rel_tol * s[0]:
                return False
    return True
