"""Complex linear algebra helpers: subspaces, realness, phases, modulus bounds.

Functionals act on vectors through the bilinear pairing ``f(v) = sum_i f_i v_i``
(no conjugation).  A subspace is stored both as a span (columns of ``basis``)
and as a kernel (rows of ``kernel``), so that ``kernel @ basis == 0``.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import DependentBasis, DomainError

RANK_TOL = 1e-10
ANNIHILATION_TOL = 1e-10


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if arr.size == 0:
        raise ValueError("empty vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entries")
    return arr


def as_matrix(m, n_cols: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if n_cols is None or arr.size == n_cols else arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d array")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite entries")
    return arr


def numerical_rank(a: np.ndarray, rel_tol: float = RANK_TOL) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def orthonormal_basis(a: np.ndarray, rel_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of ``a``."""
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=a.dtype)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0), dtype=a.dtype)
    r = int(np.sum(s > rel_tol * s[0]))
    return u[:, :r]


def span_to_kernel(basis) -> np.ndarray:
    """Rows f with ``f @ b == 0`` for every column b of ``basis``.

    Returns an (n - d) x n array whose rows are linearly independent.
    """
    b = np.asarray(basis, dtype=complex)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    n, d = b.shape
    if d == 0:
        return np.eye(n, dtype=complex)
    if numerical_rank(b) < d:
        raise DependentBasis(f"basis of {d} vectors has numerical rank < {d}")
    # f @ b = 0  <=>  b.T f = 0
    ker = scipy.linalg.null_space(b.T, rcond=RANK_TOL)
    return ker.T.copy()


def kernel_to_span(kernel, n: int) -> np.ndarray:
    k = np.asarray(kernel, dtype=complex)
    if k.size == 0:
        return np.eye(n, dtype=complex)
    k = k.reshape(-1, n)
    if numerical_rank(k) < k.shape[0]:
        raise DependentBasis("kernel functionals are linearly dependent")
    return scipy.linalg.null_space(k, rcond=RANK_TOL)


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of C^n carried in span and kernel form."""

    basis: np.ndarray   # n x d, columns span the subspace
    kernel: np.ndarray  # (n - d) x n, rows annihilate the subspace

    @classmethod
    def from_span(cls, vectors, n: Optional[int] = None) -> "Subspace":
        """Build from spanning vectors given as a list of vectors (or n x d columns)."""
        if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
            b = vectors.astype(complex)
        else:
            vecs = [as_vector(v) for v in vectors]
            if not vecs:
                if n is None:
                    raise ValueError("dimension needed for the zero subspace")
                b = np.zeros((n, 0), dtype=complex)
            else:
                b = np.column_stack(vecs)
        if n is not None and b.shape[0] != n:
            raise ValueError(f"vectors have length {b.shape[0]}, expected {n}")
        if not np.all(np.isfinite(b)):
            raise ValueError("non-finite entries")
        kernel = span_to_kernel(b)
        return cls(b, kernel)

    @classmethod
    def from_kernel(cls, functionals, n: Optional[int] = None) -> "Subspace":
        if isinstance(functionals, np.ndarray) and functionals.ndim == 2:
            k = functionals.astype(complex)
        else:
            rows = [as_vector(f) for f in functionals]
            if not rows:
                if n is None:
                    raise ValueError("dimension needed")
                k = np.zeros((0, n), dtype=complex)
            else:
                k = np.vstack(rows)
        n = k.shape[1] if n is None else n
        basis = kernel_to_span(k, n)
        if k.shape[0] and numerical_rank(k) < k.shape[0]:
            raise DependentBasis("kernel functionals are linearly dependent")
        return cls(basis, k.reshape(-1, n))

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def orthonormal(self) -> np.ndarray:
        return orthonormal_basis(self.basis)

    def contains(self, v, rel_tol: float = 1e-9) -> bool:
        v = as_vector(v)
        scale = max(1.0, float(np.linalg.norm(v)))
        if self.kernel.shape[0] == 0:
            return True
        return float(np.max(np.abs(self.kernel @ v))) <= rel_tol * scale * max(
            1.0, float(np.max(np.linalg.norm(self.kernel, axis=1))))

    def annihilation_residual(self) -> float:
        if self.kernel.size == 0 or self.basis.size == 0:
            return 0.0
        return float(np.max(np.abs(self.kernel @ self.basis)))

    def validate(self) -> None:
        n = self.n
        if self.kernel.shape[1] != n:
            raise ValueError("kernel width does not match ambient dimension")
        if self.dim + self.kernel.shape[0] != n:
            raise ValueError("dim + kernel count must equal n")
        if numerical_rank(self.basis) < self.dim:
            raise DependentBasis("span basis is dependent")
        if self.annihilation_residual() > ANNIHILATION_TOL * max(1.0, np.abs(self.basis).max()):
            raise ValueError("kernel does not annihilate span")


@dataclass(frozen=True)
class RealSubspaceWitness:
    is_real: bool
    real_basis: Optional[np.ndarray] = None   # n x d real columns
    real_kernel: Optional[np.ndarray] = None  # (n - d) x n real rows


def _residual_outside(q: np.ndarray, v: np.ndarray) -> float:
    """Distance of columns of v from the span of orthonormal q, relative to |v|."""
    if v.size == 0:
        return 0.0
    r = v - q @ (q.conj().T @ v)
    norms = np.maximum(np.linalg.norm(v, axis=0), 1e-300)
    return float(np.max(np.linalg.norm(r, axis=0) / norms * (np.linalg.norm(v, axis=0) > 0)))


def is_real_subspace(sub: Subspace, tol: float = 1e-10) -> RealSubspaceWitness:
    """Decide whether ``sub`` has a basis of real vectors."""
    n, d = sub.n, sub.dim
    if d == 0:
        return RealSubspaceWitness(True, np.zeros((n, 0)), np.eye(n))
    q = sub.orthonormal()
    parts = np.hstack([sub.basis.real, sub.basis.imag])
    if _residual_outside(q, parts.astype(complex)) > tol:
        return RealSubspaceWitness(False)
    rb = orthonormal_basis(parts)
    if rb.shape[1] != d:
        return RealSubspaceWitness(False)
    rk = scipy.linalg.null_space(rb.T, rcond=RANK_TOL).T if d < n else np.zeros((0, n))
    return RealSubspaceWitness(True, rb, rk)


def phase_normalize(f):
    """Return (multipliers, moduli) with ``multipliers * f == |f|``; zeros get 1."""
    f = as_vector(f)
    g = np.abs(f)
    mult = np.ones_like(f)
    nz = g > 0
    mult[nz] = np.conj(f[nz]) / g[nz]
    return mult, g


def phase_canonical(v, tol: float = 0.0) -> np.ndarray:
    """Rotate v so that its first entry of modulus > tol is real positive."""
    v = as_vector(v)
    idx = np.flatnonzero(np.abs(v) > tol * max(1.0, float(np.abs(v).max())))
    if idx.size == 0:
        return v.copy()
    a = v[idx[0]]
    return v * (np.conj(a) / abs(a))


def modulus_lower_bounds(x: complex, y: complex, t: Optional[float] = None):
    """Lower bounds for |x - y| (linear) and |x - t y| (quadratic).

    linear    = |x| - re(conj(x) y)/|x|  <= |x - y|
    quadratic = |x| - t re(conj(x) y)/|x| + t^2 im(conj(x) y)^2 / (4|x|^3) <= |x - t y|
    The quadratic bound needs |t y| <= |x|/2; it is None when t is omitted.
    """
    x = complex(x)
    y = complex(y)
    ax = abs(x)
    if ax == 0.0:
        raise DomainError("x must be nonzero")
    p = x.conjugate() * y
    linear = ax - p.real / ax
    if t is None:
        return linear, None
    t = float(t)
    if abs(t * y) > ax / 2:
        raise DomainError("quadratic bound requires |t y| <= |x|/2")
    quadratic = ax - t * p.real / ax + t * t * p.imag ** 2 / (4 * ax ** 3)
    return linear, quadratic


def real_coords_matrix(m: np.ndarray) -> np.ndarray:
    """Real 2a x 2b matrix of the complex-linear map m acting on (re, im) stacks."""
    return np.block([[m.real, -m.imag], [m.imag, m.real]])
