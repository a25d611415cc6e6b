"""Tolerance-aware subspace arithmetic and symmetric-matrix vectorization.

Everything downstream (tangent spaces, normal-cone spans, Terracini
verdicts) reduces to dimension comparisons of numerically computed
subspaces, so this module owns the one rank-decision policy used
everywhere: singular values below ``tol * sigma_max`` are zero, with
``tol = 1e-8`` by default.

Subspaces are immutable: a column-orthonormal ``basis`` plus the ambient
dimension.  Equality is decided by principal angles (bases are
non-unique), and the metric reported everywhere is the largest
principal-angle *sine*, which is also the spectral norm of the
difference of orthogonal projectors.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import UsageError

DEFAULT_TOL = 1e-8


class Subspace:
    """A linear subspace of R^n held as a column-orthonormal basis."""

    __slots__ = ("ambient_dim", "basis", "tol")

    def __init__(self, ambient_dim: int, basis: np.ndarray, tol: float = DEFAULT_TOL):
        basis = np.asarray(basis, dtype=np.float64)
        if basis.ndim != 2 or basis.shape[0] != ambient_dim:
            raise UsageError(
                f"basis must be {ambient_dim} x r, got shape {basis.shape}"
            )
        self.ambient_dim = int(ambient_dim)
        self.basis = basis
        self.tol = float(tol)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, ambient_dim: int, tol: float = DEFAULT_TOL) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0)), tol)

    @classmethod
    def full(cls, ambient_dim: int, tol: float = DEFAULT_TOL) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim), tol)

    def project(self, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection of v onto the subspace."""
        v = np.asarray(v, dtype=np.float64)
        return self.basis @ (self.basis.T @ v)

    def contains(self, v: np.ndarray, tol: float | None = None) -> bool:
        """Membership of a vector, relative to its own norm."""
        v = np.asarray(v, dtype=np.float64)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return True
        t = self.tol if tol is None else tol
        return np.linalg.norm(v - self.project(v)) <= t * nv

    def contains_subspace(self, other: "Subspace", tol: float | None = None) -> bool:
        if other.dim == 0:
            return True
        t = self.tol if tol is None else tol
        resid = other.basis - self.project(other.basis)
        return np.linalg.norm(resid, 2) <= t

    def complement(self) -> "Subspace":
        """Orthogonal complement within the ambient space."""
        n, r = self.ambient_dim, self.dim
        if r == 0:
            return Subspace.full(n, self.tol)
        u, _, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(n, u[:, r:], self.tol)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def orthonormal_basis(vectors, tol: float = DEFAULT_TOL, ambient_dim: int | None = None) -> Subspace:
    """Numerical column space of a set of vectors.

    ``vectors`` is any iterable of equal-length 1-d arrays (or a 2-d
    array whose *rows* are the vectors).  Empty input needs an explicit
    ``ambient_dim``; singular values below ``tol * sigma_max`` are
    treated as zero.
    """
    vs = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not vs:
        if ambient_dim is None:
            raise UsageError("empty generator list with unspecified ambient dimension")
        return Subspace.zero(ambient_dim, tol)
    n = vs[0].shape[0]
    for v in vs:
        if v.shape != (n,):
            raise UsageError("generators do not share one ambient dimension")
    if ambient_dim is not None and ambient_dim != n:
        raise UsageError(f"ambient_dim={ambient_dim} but vectors live in R^{n}")
    m = np.column_stack(vs)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return Subspace.zero(n, tol)
    r = int(np.sum(s > tol * s[0]))
    return Subspace(n, u[:, :r], tol)


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise UsageError(
            f"ambient mismatch: {a.ambient_dim} vs {b.ambient_dim}"
        )


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    """Span of the union of the two subspaces."""
    _check_ambient(a, b)
    tol = max(a.tol, b.tol)
    if a.dim == 0:
        return Subspace(b.ambient_dim, b.basis, tol)
    if b.dim == 0:
        return Subspace(a.ambient_dim, a.basis, tol)
    m = np.hstack([a.basis, b.basis])
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > tol * s[0]))
    return Subspace(a.ambient_dim, u[:, :r], tol)


def subspace_intersection(a: Subspace, b: Subspace) -> Subspace:
    """a cap b, computed as the complement of the sum of complements.

    The identity dim(a cap b) + dim(a + b) = dim a + dim b holds within
    the shared rank tolerance; de Morgan through orthogonal complements
    avoids a separate intersection algorithm.
    """
    _check_ambient(a, b)
    return subspace_sum(a.complement(), b.complement()).complement()


def _residual_sines(a: Subspace, b: Subspace):
    """Singular values of (I - P_b) @ basis(a): principal-angle sines of
    a against b, with the corresponding directions in a."""
    resid = a.basis - b.project(a.basis)
    u, s, vt = np.linalg.svd(resid, full_matrices=False)
    return s, vt


def subspace_equal(a: Subspace, b: Subspace, tol: float | None = None):
    """Equality of subspaces, with a certificate on failure.

    Returns ``(True, None)`` when the subspaces agree to within the
    largest principal-angle sine <= tol, else ``(False, w)`` where w is
    a unit vector contained in one subspace whose projection residual
    against the other exceeds tol.
    """
    _check_ambient(a, b)
    t = max(a.tol, b.tol) if tol is None else tol
    big, small = (a, b) if a.dim >= b.dim else (b, a)
    if big.dim == 0:
        return True, None
    s, vt = _residual_sines(big, small)
    if a.dim == b.dim and (s.size == 0 or s[0] <= t):
        return True, None
    # worst direction of the larger subspace against the smaller
    w = big.basis @ vt[0]
    return False, w / np.linalg.norm(w)


def principal_angle_sines(a: Subspace, b: Subspace) -> np.ndarray:
    """Principal-angle sines between equal-dimension subspaces, sorted
    descending.  (For unequal dimensions compare via grassmann_distance.)"""
    _check_ambient(a, b)
    s, _ = _residual_sines(a, b)
    return np.clip(s, 0.0, 1.0)


def grassmann_distance(a: Subspace, b: Subspace) -> float:
    """Largest principal-angle sine; 1.0 when dimensions differ.

    Equals the spectral norm of the difference of orthogonal projectors,
    is symmetric, and is zero exactly when subspace_equal holds.
    """
    _check_ambient(a, b)
    if a.dim != b.dim:
        return 1.0
    if a.dim == 0:
        return 0.0
    s, _ = _residual_sines(a, b)
    return float(min(1.0, s[0])) if s.size else 0.0


# ---------------------------------------------------------------------------
# Symmetric-matrix vectorization.  Off-diagonals carry sqrt(2) so the
# Euclidean inner product of coordinate vectors is the trace inner
# product tr(XY) of the matrices, making PSD-cone self-duality literal.

SQRT2 = math.sqrt(2.0)


def svec_dim(d: int) -> int:
    return d * (d + 1) // 2


def svec_side(m: int) -> int:
    """Matrix side from coordinate length, erroring on non-triangular sizes."""
    d = int((math.isqrt(8 * m + 1) - 1) // 2)
    if svec_dim(d) != m:
        raise UsageError(f"{m} is not a triangular number d(d+1)/2")
    return d


def svec(x: np.ndarray) -> np.ndarray:
    """Upper triangle of a symmetric matrix, row-major, off-diag * sqrt2."""
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[0]
    iu = np.triu_indices(d)
    out = x[iu].copy()
    out[iu[0] != iu[1]] *= SQRT2
    return out


def smat(v: np.ndarray) -> np.ndarray:
    """Inverse of svec."""
    v = np.asarray(v, dtype=np.float64)
    d = svec_side(v.shape[0])
    iu = np.triu_indices(d)
    w = v.copy()
    w[iu[0] != iu[1]] /= SQRT2
    x = np.zeros((d, d))
    x[iu] = w
    return x + x.T - np.diag(np.diag(x))


class SymVec:
    """A symmetric d x d matrix in scaled upper-triangle coordinates."""

    __slots__ = ("d", "coords")

    def __init__(self, d: int, coords: np.ndarray):
        coords = np.asarray(coords, dtype=np.float64)
        if coords.shape != (svec_dim(d),):
            raise UsageError(
                f"SymVec side {d} needs {svec_dim(d)} coords, got {coords.shape}"
            )
        self.d = int(d)
        self.coords = coords

    @classmethod
    def from_matrix(cls, x: np.ndarray) -> "SymVec":
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise UsageError("SymVec.from_matrix needs a square matrix")
        if np.linalg.norm(x - x.T) > 1e-10 * max(1.0, np.linalg.norm(x)):
            raise UsageError("matrix is not symmetric")
        return cls(x.shape[0], svec(0.5 * (x + x.T)))

    def to_matrix(self) -> np.ndarray:
        return smat(self.coords)

    def __repr__(self) -> str:  # pragma: no cover
        return f"SymVec(d={self.d})"
