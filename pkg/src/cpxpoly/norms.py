"""Norm handles for vertex-form, facet-form and l_p norms on C^n.

Vertices and facets are stored as rows of an N x n array, each row rotated so
that its first nonzero entry is real positive, with duplicates dropped.
"""

from typing import Optional

import numpy as np

from .algebra import as_vector, numerical_rank, phase_canonical
from .convexcore import (DEFAULT_TOL, SumModuliProblem, solve_min_sum_moduli,
                         solve_min_sum_moduli_batch)
from .errors import ValidationError

ESSENTIAL_TOL = 1e-9
BATCH_MIN = 16  # column count above which vertex norms are solved as one program


def _canonical_rows(rows: np.ndarray) -> np.ndarray:
    out = []
    for r in rows:
        c = phase_canonical(r, tol=1e-14)
        if not np.any(np.abs(c) > 0):
            continue
        if any(np.max(np.abs(c - o)) <= 1e-12 * max(1.0, np.abs(c).max()) for o in out):
            continue
        out.append(c)
    return np.array(out, dtype=complex).reshape(len(out), rows.shape[1])


class NormHandle:
    kind = "abstract"

    def __init__(self, n: int):
        self.n = int(n)

    def _check(self, x) -> np.ndarray:
        x = as_vector(x)
        if x.size != self.n:
            raise ValueError(f"vector of length {x.size} given to a norm on C^{self.n}")
        return x


class PolytopeNorm(NormHandle):
    """Norm whose unit ball is the absolutely convex hull of the vertices."""

    kind = "vertices"

    def __init__(self, vertices, canonicalize: bool = True):
        v = np.atleast_2d(np.asarray(vertices, dtype=complex))
        if not np.all(np.isfinite(v)):
            raise ValidationError("non-finite vertex entries")
        super().__init__(v.shape[1])
        self.vertices = _canonical_rows(v) if canonicalize else v
        if numerical_rank(self.vertices) < self.n:
            raise ValidationError("vertices do not span")
        self._square_inv = None
        if self.vertices.shape[0] == self.n:
            self._square_inv = np.linalg.inv(self.vertices.T)

    @property
    def U(self) -> np.ndarray:
        """n x N matrix with the vertices as columns."""
        return self.vertices.T

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.vertices.imag) <= tol))

    def __repr__(self):
        return f"PolytopeNorm(n={self.n}, N={self.vertices.shape[0]})"


class AdjointNorm(NormHandle):
    """Norm given by the maximum modulus of finitely many functionals."""

    kind = "facets"

    def __init__(self, facets, canonicalize: bool = True):
        f = np.atleast_2d(np.asarray(facets, dtype=complex))
        if not np.all(np.isfinite(f)):
            raise ValidationError("non-finite facet entries")
        super().__init__(f.shape[1])
        self.facets = _canonical_rows(f) if canonicalize else f
        if numerical_rank(self.facets) < self.n:
            raise ValidationError("facets do not span")
        self._square_inv = None
        if self.facets.shape[0] == self.n:
            self._square_inv = np.linalg.inv(self.facets.T)

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.facets.imag) <= tol))

    def __repr__(self):
        return f"AdjointNorm(n={self.n}, M={self.facets.shape[0]})"


class LpNorm(NormHandle):
    kind = "lp"

    def __init__(self, p: float, n: int):
        p = float(p)
        if not (1.0 < p < np.inf):
            raise ValidationError("p must lie in (1, inf)")
        super().__init__(n)
        self.p = p
        self.q = p / (p - 1.0)

    def __repr__(self):
        return f"LpNorm(p={self.p}, n={self.n})"


def linf(n: int) -> AdjointNorm:
    return AdjointNorm(np.eye(n))


def l1(n: int) -> PolytopeNorm:
    return PolytopeNorm(np.eye(n))


def _lp(x: np.ndarray, p: float) -> float:
    a = np.abs(x)
    m = a.max() if a.size else 0.0
    if m == 0.0:
        return 0.0
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def norm_eval(h: NormHandle, x, tol: float = DEFAULT_TOL) -> float:
    x = h._check(x)
    if isinstance(h, AdjointNorm):
        return float(np.max(np.abs(h.facets @ x)))
    if isinstance(h, LpNorm):
        return _lp(x, h.p)
    if isinstance(h, PolytopeNorm):
        if h._square_inv is not None:
            return float(np.sum(np.abs(h._square_inv @ x)))
        return solve_min_sum_moduli(SumModuliProblem(h.U, x), tol).value
    raise TypeError(f"unknown norm handle {h!r}")


def dual_norm_eval(h: NormHandle, f, tol: float = DEFAULT_TOL) -> float:
    """Norm of the functional z -> sum_i f_i z_i."""
    f = h._check(f)
    if isinstance(h, PolytopeNorm):
        return float(np.max(np.abs(h.vertices @ f)))
    if isinstance(h, LpNorm):
        return _lp(f, h.q)
    if isinstance(h, AdjointNorm):
        if h._square_inv is not None:
            return float(np.sum(np.abs(h._square_inv @ f)))
        return solve_min_sum_moduli(SumModuliProblem(h.facets.T, f), tol).value
    raise TypeError(f"unknown norm handle {h!r}")


def norm_many(h: NormHandle, X: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Norms of the columns of X."""
    X = np.asarray(X, dtype=complex)
    if isinstance(h, AdjointNorm):
        return np.max(np.abs(h.facets @ X), axis=0)
    if isinstance(h, LpNorm):
        return np.array([_lp(X[:, i], h.p) for i in range(X.shape[1])])
    if isinstance(h, PolytopeNorm) and h._square_inv is not None:
        return np.sum(np.abs(h._square_inv @ X), axis=0)
    if isinstance(h, PolytopeNorm) and X.shape[1] > BATCH_MIN:
        return solve_min_sum_moduli_batch(h.U, X, tol)[0]
    return np.array([norm_eval(h, X[:, i], tol) for i in range(X.shape[1])])


def norming_functional(h: NormHandle, x, tol: float = DEFAULT_TOL) -> np.ndarray:
    """A functional f of dual norm one with f(x) = |x| (real positive)."""
    x = h._check(x)
    if isinstance(h, AdjointNorm):
        vals = h.facets @ x
        j = int(np.argmax(np.abs(vals)))
        return np.conj(vals[j]) / abs(vals[j]) * h.facets[j] if vals[j] != 0 else h.facets[j]
    if isinstance(h, LpNorm):
        nrm = _lp(x, h.p)
        a = np.abs(x)
        ph = np.where(a > 0, np.conj(x) / np.where(a > 0, a, 1), 0)
        return ph * (a / nrm) ** (h.p - 1)
    if isinstance(h, PolytopeNorm):
        if h._square_inv is not None:
            coef = h._square_inv @ x
            ph = np.where(np.abs(coef) > 0, np.conj(coef) / np.maximum(np.abs(coef), 1e-300), 1)
            # f(u_j) = ph_j  =>  f = ph @ U^{-1}
            return ph @ h._square_inv
        return solve_min_sum_moduli(SumModuliProblem(h.U, x), tol).dual
    raise TypeError(f"unknown norm handle {h!r}")


def essentialize(vertices, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Drop every vertex that lies in the absolutely convex hull of the others.

    Vertices are first phase-canonicalized and deduplicated; then, in ascending
    index order, u_k is removed when its norm with respect to the remaining
    vertices is at most 1 + 1e-9.  Passes repeat until nothing changes.
    """
    v = _canonical_rows(np.atleast_2d(np.asarray(vertices, dtype=complex)))
    n = v.shape[1]
    if numerical_rank(v) < n:
        raise ValidationError("vertices do not span")
    keep = list(range(v.shape[0]))
    changed = True
    while changed:
        changed = False
        for k in list(keep):
            others = [j for j in keep if j != k]
            if not others:
                continue
            U = v[others].T
            if numerical_rank(U) < numerical_rank(np.column_stack([U, v[k]])):
                continue
            try:
                val = solve_min_sum_moduli(SumModuliProblem(U, v[k]), tol).value
            except Exception:
                continue
            if val <= 1.0 + ESSENTIAL_TOL:
                keep.remove(k)
                changed = True
    return v[keep]


def make_norm(kind: str, data=None, p: Optional[float] = None, n: Optional[int] = None):
    if kind == "vertices":
        return PolytopeNorm(data)
    if kind == "facets":
        return AdjointNorm(data)
    if kind == "lp":
        return LpNorm(p, n)
    raise ValueError(f"unknown norm kind {kind!r}")
