"""Cone models: membership, normal cones, minimal faces, extreme rays,
and greedy face-chain reduction.

Five cone families share one interface: finitely generated (polyhedral)
cones in V-representation, the positive semidefinite cone in svec
coordinates, linear images of either, hyperbolicity cones of a
homogeneous polynomial, and the cone of even-degree moment vectors.
Not every operation makes sense on every family; unsupported
combinations raise ``UnsupportedOperationError`` rather than guessing.
"""

from math import comb

import numpy as np
import scipy.optimize

from .errors import DomainError, NumericalFailure, UnsupportedOperationError, UsageError
from .linalg import DEFAULT_TOL, orthonormal_basis, smat, subspace_equal, svec, svec_dim
from .polynomials import SparsePoly, monomials_of_degree
from .solver import ConicProblem, LpProblem, solve_conic, solve_lp

_FACE_MARGIN = 1e-6


# ---------------------------------------------------------------------------
# faces and normal cones


class FaceDescriptor:
    """A face of a reference cone, in whichever encoding fits it."""


class PolyhedralFace(FaceDescriptor):
    """Face spanned by a subset of the generators (for an orthant the
    indices are simply the coordinate support)."""

    __slots__ = ("indices",)

    def __init__(self, indices):
        self.indices = tuple(sorted({int(i) for i in indices}))

    def __eq__(self, other):
        return isinstance(other, PolyhedralFace) and self.indices == other.indices

    def __hash__(self):
        return hash(self.indices)

    def __repr__(self):
        return f"PolyhedralFace(indices={self.indices})"


class PsdFace(FaceDescriptor):
    """The face {X psd : X Z = 0} of the d x d semidefinite cone."""

    __slots__ = ("d", "Z")

    def __init__(self, d: int, Z: np.ndarray):
        self.d = int(d)
        Z = np.asarray(Z, dtype=float).reshape(self.d, -1)
        if Z.shape[1] and np.linalg.norm(Z.T @ Z - np.eye(Z.shape[1])) > 1e-8:
            raise UsageError("kernel basis columns must be orthonormal")
        self.Z = Z

    @property
    def rank(self) -> int:
        """Rank of the matrices in the relative interior of the face."""
        return self.d - self.Z.shape[1]

    def __eq__(self, other):
        if not isinstance(other, PsdFace) or self.d != other.d:
            return False
        if self.Z.shape[1] != other.Z.shape[1]:
            return False
        if self.Z.shape[1] == 0:
            return True
        eq, _ = subspace_equal(
            orthonormal_basis(list(self.Z.T)), orthonormal_basis(list(other.Z.T))
        )
        return eq

    def __repr__(self):
        return f"PsdFace(d={self.d}, corank={self.Z.shape[1]})"


class FaceChainReport:
    """Outcome of the greedy chain reduction over a list of cone points."""

    __slots__ = ("indices", "chain_length", "height_bound")

    def __init__(self, indices, chain_length: int, height_bound: int):
        self.indices = tuple(indices)
        self.chain_length = int(chain_length)
        self.height_bound = int(height_bound)

    def __repr__(self):
        return (f"FaceChainReport(indices={self.indices}, "
                f"chain_length={self.chain_length}, "
                f"height_bound={self.height_bound})")


class NormalConeModel:
    """Description of the normal cone N_C(x) at a cone point."""


class PolyhedralNormalCone(NormalConeModel):
    """H-description {l : l'g_i <= 0 for all i, l'g_j = 0 for j in zero_set}."""

    __slots__ = ("generators", "zero_set")

    def __init__(self, generators: np.ndarray, zero_set):
        self.generators = np.asarray(generators, dtype=float)
        self.zero_set = tuple(sorted({int(j) for j in zero_set}))

    def contains(self, ell, tol: float = DEFAULT_TOL) -> bool:
        ell = np.asarray(ell, dtype=float)
        vals = self.generators @ ell
        scale = 1.0 + float(np.linalg.norm(ell))
        if np.any(vals > tol * scale):
            return False
        return all(abs(vals[j]) <= tol * scale for j in self.zero_set)

    def __repr__(self):
        return (f"PolyhedralNormalCone({self.generators.shape[0]} rows, "
                f"zero_set={self.zero_set})")


class PsdNormalCone(NormalConeModel):
    """The set {-Z M Z' : M psd} with Z an orthonormal kernel basis."""

    __slots__ = ("d", "Z")

    def __init__(self, d: int, Z: np.ndarray):
        self.d = int(d)
        self.Z = np.asarray(Z, dtype=float).reshape(self.d, -1)

    def contains(self, ell, tol: float = DEFAULT_TOL) -> bool:
        L = _as_sym_matrix(ell, self.d)
        scale = 1.0 + float(np.linalg.norm(L))
        if self.Z.shape[1] == 0:
            return float(np.linalg.norm(L)) <= tol * scale
        P = self.Z @ self.Z.T
        if np.linalg.norm(L - P @ L @ P) > tol * scale:
            return False
        M = -self.Z.T @ L @ self.Z
        return float(np.linalg.eigvalsh(M)[0]) >= -tol * scale

    def __repr__(self):
        return f"PsdNormalCone(d={self.d}, rank_cap={self.Z.shape[1]})"


class MappedNormalCone(NormalConeModel):
    """{lam : B' lam in base}, the normal cone of a linear image."""

    __slots__ = ("base", "B")

    def __init__(self, base: NormalConeModel, B: np.ndarray):
        self.base = base
        self.B = np.asarray(B, dtype=float)

    def contains(self, lam, tol: float = DEFAULT_TOL) -> bool:
        return self.base.contains(self.B.T @ np.asarray(lam, dtype=float), tol)

    def __repr__(self):
        return f"MappedNormalCone(base={self.base!r})"


# ---------------------------------------------------------------------------
# cone models


class ConeModel:
    """Base class for cone representations; immutable after construction."""

    kind = "abstract"

    @property
    def ambient_dim(self) -> int:
        raise NotImplementedError

    def membership(self, x, tol: float = DEFAULT_TOL) -> bool:
        raise NotImplementedError

    def normal_cone(self, x, tol: float = DEFAULT_TOL) -> NormalConeModel:
        raise UnsupportedOperationError(
            f"normal cones are not supported for {self.kind} cones")

    def minimal_face(self, x, tol: float = DEFAULT_TOL) -> FaceDescriptor:
        raise UnsupportedOperationError(
            f"minimal faces are not supported for {self.kind} cones")

    def is_extreme_ray(self, x, tol: float = DEFAULT_TOL) -> bool:
        raise UnsupportedOperationError(
            f"extreme-ray tests are not supported for {self.kind} cones")

    def to_json_dict(self) -> dict:
        raise NotImplementedError


class Polyhedral(ConeModel):
    """cone{g_1, ..., g_k}, a pointed finitely generated cone.

    Pointedness is verified at construction with a small LP: the cone is
    pointed exactly when no convex combination of the generators is zero.
    """

    kind = "polyhedral"

    def __init__(self, generators, check_pointed: bool = True):
        G = np.asarray(generators, dtype=float)
        if G.ndim != 2 or G.shape[0] == 0:
            raise UsageError("generators must form a nonempty 2-d array")
        norms = np.linalg.norm(G, axis=1)
        if np.any(norms == 0):
            raise UsageError("zero vectors cannot generate a ray")
        self.generators = G
        if check_pointed and not self._pointed():
            raise DomainError("generators span a non-pointed cone")

    def _pointed(self) -> bool:
        k = self.generators.shape[0]
        A = np.vstack([self.generators.T, np.ones((1, k))])
        b = np.zeros(A.shape[0])
        b[-1] = 1.0
        rep = solve_lp(LpProblem(np.zeros(k), A, b))
        if rep.status == "infeasible":
            return True
        if rep.status == "optimal":
            return False
        raise NumericalFailure(f"pointedness LP ended with {rep.status}")

    @property
    def ambient_dim(self) -> int:
        return self.generators.shape[1]

    def membership(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        dist = _orthant_image_distance(self.generators.T, x)
        return dist <= tol * (1.0 + float(np.max(np.abs(x))))

    def minimal_face(self, x, tol: float = DEFAULT_TOL) -> PolyhedralFace:
        x = np.asarray(x, dtype=float)
        return PolyhedralFace(self._max_support(x, tol))

    def _max_support(self, x, tol):
        """Indices j admitting a conic decomposition of x with lambda_j > 0."""
        G = self.generators
        k = G.shape[0]
        if float(np.linalg.norm(x)) <= tol:
            return ()
        rep = solve_lp(LpProblem(np.zeros(k), G.T, x))
        if rep.status == "infeasible":
            raise DomainError("point is not in the cone")
        if rep.status != "optimal":
            raise NumericalFailure(f"face LP ended with {rep.status}")
        lam, slk = rep.x, rep.s
        sl = _FACE_MARGIN * max(1.0, float(lam.max(initial=0.0)))
        ss = _FACE_MARGIN * max(1.0, float(slk.max(initial=0.0)))
        support = []
        for j in range(k):
            if lam[j] > sl and slk[j] <= ss:
                support.append(j)
            elif slk[j] > ss and lam[j] <= sl:
                continue
            elif self._index_lp(j, x) > _FACE_MARGIN:
                # ambiguous margins: decide by maximizing lambda_j directly
                support.append(j)
        return support

    def _index_lp(self, j, x):
        G = self.generators
        k = G.shape[0]
        # max lambda_j  s.t.  G' lambda = x, lambda >= 0, lambda_j <= 1
        A = np.zeros((self.ambient_dim + 1, k + 1))
        A[:-1, :k] = G.T
        A[-1, j] = 1.0
        A[-1, k] = 1.0
        b = np.concatenate([x, [1.0]])
        c = np.zeros(k + 1)
        c[j] = -1.0
        rep = solve_lp(LpProblem(c, A, b))
        if rep.status != "optimal":
            raise NumericalFailure(f"support LP ended with {rep.status}")
        return -rep.primal_obj

    def normal_cone(self, x, tol: float = DEFAULT_TOL) -> PolyhedralNormalCone:
        face = self.minimal_face(x, tol)
        return PolyhedralNormalCone(self.generators, face.indices)

    def is_extreme_ray(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        nx = float(np.linalg.norm(x))
        if nx == 0:
            raise UsageError("the zero vector spans no ray")
        if not self.membership(x, tol):
            raise DomainError("point is not in the cone")
        G = self.generators
        unit = x / nx
        dots = (G / np.linalg.norm(G, axis=1)[:, None]) @ unit
        others = [i for i in range(G.shape[0]) if dots[i] < 1.0 - 1e-10]
        if not others:
            return True
        rest = Polyhedral(G[others], check_pointed=False)
        return not rest.membership(x, tol)

    def face_contains(self, face: PolyhedralFace, x, tol: float = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if not face.indices:
            return float(np.linalg.norm(x)) <= tol
        sub = Polyhedral(self.generators[list(face.indices)], check_pointed=False)
        return sub.membership(x, tol)

    def to_json_dict(self) -> dict:
        return {"type": "polyhedral", "generators": self.generators.tolist()}

    def __repr__(self):
        return (f"Polyhedral({self.generators.shape[0]} generators "
                f"in R^{self.ambient_dim})")


class Psd(ConeModel):
    """The cone of d x d positive semidefinite matrices, svec coordinates."""

    kind = "psd"
    # eigenvalues below KERNEL_REL * lambda_max count as zero
    KERNEL_REL = 1e-8

    def __init__(self, d: int):
        if d < 1:
            raise UsageError("matrix side must be positive")
        self.d = int(d)

    @property
    def ambient_dim(self) -> int:
        return svec_dim(self.d)

    def membership(self, x, tol: float = DEFAULT_TOL) -> bool:
        X = _as_sym_matrix(x, self.d)
        return float(np.linalg.eigvalsh(X)[0]) >= -tol

    def minimal_face(self, x, tol: float = DEFAULT_TOL) -> PsdFace:
        Z = self._kernel_basis(x, tol)
        return PsdFace(self.d, Z)

    def _kernel_basis(self, x, tol):
        X = _as_sym_matrix(x, self.d)
        w, V = np.linalg.eigh(X)
        if w[0] < -tol:
            raise DomainError("matrix is not positive semidefinite")
        cut = self.KERNEL_REL * max(float(w[-1]), 0.0)
        return V[:, w <= cut]

    def normal_cone(self, x, tol: float = DEFAULT_TOL) -> PsdNormalCone:
        return PsdNormalCone(self.d, self._kernel_basis(x, tol))

    def is_extreme_ray(self, x, tol: float = DEFAULT_TOL) -> bool:
        X = _as_sym_matrix(x, self.d)
        w = np.linalg.eigvalsh(X)
        if w[0] < -tol:
            raise DomainError("matrix is not positive semidefinite")
        if w[-1] <= tol:
            raise UsageError("the zero matrix spans no ray")
        return int(np.sum(w > self.KERNEL_REL * w[-1])) == 1

    def face_contains(self, face: PsdFace, x, tol: float = DEFAULT_TOL) -> bool:
        X = _as_sym_matrix(x, self.d)
        if not self.membership(x, tol):
            return False
        if face.Z.shape[1] == 0:
            return True
        scale = 1.0 + float(np.linalg.norm(X))
        return float(np.linalg.norm(X @ face.Z)) <= tol * scale

    def to_json_dict(self) -> dict:
        return {"type": "psd", "d": self.d}

    def __repr__(self):
        return f"Psd(d={self.d})"


class LinearImage(ConeModel):
    """B(C) for a polyhedral or semidefinite base cone C and a matrix B."""

    kind = "linear_image"

    def __init__(self, base: ConeModel, B):
        if not isinstance(base, (Polyhedral, Psd)):
            raise UsageError("base must be a polyhedral or semidefinite cone")
        B = np.asarray(B, dtype=float)
        if B.ndim != 2 or B.shape[1] != base.ambient_dim:
            raise UsageError(
                f"map must have {base.ambient_dim} columns, got {B.shape}")
        self.base = base
        self.B = B

    @property
    def ambient_dim(self) -> int:
        return self.B.shape[0]

    def membership(self, x, tol: float = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if isinstance(self.base, Polyhedral):
            dist = _orthant_image_distance(self.B @ self.base.generators.T, x)
        else:
            dist = _psd_image_distance(self.B, self.base.d, x)
        return dist <= tol * (1.0 + float(np.max(np.abs(x), initial=0.0)))

    def preimage(self, x, tol: float = DEFAULT_TOL):
        """A relative-interior preimage of x (analytic center of the fiber)."""
        x = np.asarray(x, dtype=float)
        if isinstance(self.base, Polyhedral):
            G = self.base.generators
            rep = solve_lp(LpProblem(np.zeros(G.shape[0]), self.B @ G.T, x))
            if rep.status == "infeasible":
                raise DomainError("point is not in the image cone")
            if rep.status != "optimal":
                raise NumericalFailure(f"preimage LP ended with {rep.status}")
            return G.T @ rep.x
        d = self.base.d
        prob = ConicProblem(A=self.B, b=x, c=np.zeros(svec_dim(d)),
                            num_free=0, num_nonneg=0, psd_sides=[d])
        rep = solve_conic(prob)
        if rep.status == "infeasible":
            raise DomainError("point is not in the image cone")
        if rep.status != "optimal":
            raise NumericalFailure(f"preimage SDP ended with {rep.status}")
        return smat(rep.x)

    def normal_cone(self, x, tol: float = DEFAULT_TOL) -> MappedNormalCone:
        u = self.preimage(x, tol)
        return MappedNormalCone(self.base.normal_cone(u, tol), self.B)

    def to_json_dict(self) -> dict:
        return {"type": "linear_image", "base": self.base.to_json_dict(),
                "map": self.B.tolist()}

    def __repr__(self):
        return f"LinearImage({self.base!r} -> R^{self.ambient_dim})"


class Hyperbolicity(ConeModel):
    """Closed hyperbolicity cone of a homogeneous polynomial p in
    direction e: points x whose spectrum (roots of t -> p(te - x)) is
    entirely nonnegative.

    Membership uses the sign characterization: x is in the cone iff every
    coefficient of t -> p(x + te) is nonnegative.
    """

    kind = "hyperbolicity"

    def __init__(self, p: SparsePoly, e, check: bool = True,
                 spot_samples: int = 16):
        if not isinstance(p, SparsePoly):
            raise UsageError("p must be a SparsePoly")
        if p.is_zero() or not p.is_homogeneous():
            raise UsageError("p must be homogeneous and nonzero")
        e = np.asarray(e, dtype=float)
        if e.shape != (p.num_vars,):
            raise UsageError("direction has the wrong dimension")
        pe = float(p.eval(e))
        if pe <= 0:
            raise DomainError(f"p(e) = {pe:.3g} must be positive")
        self.p = p
        self.e = e
        if check:
            from .hyperbolic import check_hyperbolic

            ok, witness = check_hyperbolic(p, e, num_samples=spot_samples)
            if not ok:
                raise DomainError(
                    f"polynomial is not hyperbolic along e: a sampled "
                    f"restriction has relative imaginary residual {witness:.3e}")

    @property
    def ambient_dim(self) -> int:
        return self.p.num_vars

    @property
    def degree(self) -> int:
        return self.p.degree

    def membership(self, x, tol: float = DEFAULT_TOL) -> bool:
        from .hyperbolic import descartes_membership

        return descartes_membership(self.p, self.e, np.asarray(x, dtype=float),
                                    tol=tol)

    def is_extreme_ray(self, x, tol: float = DEFAULT_TOL) -> bool:
        raise UnsupportedOperationError(
            "no general extremality certificate exists for hyperbolicity "
            "cones; only specific families (orthants, psd, moment cones, "
            "multiplicity-1 boundary points) are characterized")

    def to_json_dict(self) -> dict:
        return {"type": "hyperbolicity", "p": self.p.to_json_dict(),
                "e": self.e.tolist()}

    def __repr__(self):
        return (f"Hyperbolicity(degree={self.degree}, "
                f"vars={self.p.num_vars})")


class Veronese(ConeModel):
    """The moment cone: conic hull of the degree-2d moment vectors
    phi(z) = (z^a)_{|a|=2d} in graded-lex order, z in R^n."""

    kind = "veronese"

    def __init__(self, n: int, two_d: int):
        if n < 1:
            raise UsageError("need at least one variable")
        if two_d < 2 or two_d % 2 != 0:
            raise UsageError("degree must be even and at least 2")
        self.n = int(n)
        self.two_d = int(two_d)
        self._monomials = monomials_of_degree(self.n, self.two_d)
        half = monomials_of_degree(self.n, self.two_d // 2)
        self._half = half
        self._index = {m: i for i, m in enumerate(self._monomials)}

    @property
    def ambient_dim(self) -> int:
        return comb(self.n + self.two_d - 1, self.two_d)

    def membership(self, x, tol: float = DEFAULT_TOL) -> bool:
        raise UnsupportedOperationError(
            "moment-cone membership is not decided here (hard for n >= 3); "
            "extreme rays are parameterized by is_extreme_ray instead")

    def catalecticant(self, x) -> np.ndarray:
        """Middle catalecticant matrix M[a,b] = x_{a+b} over degree-d
        monomial pairs."""
        x = np.asarray(x, dtype=float)
        if x.shape != (len(self._monomials),):
            raise UsageError(
                f"expected {len(self._monomials)} moment coordinates")
        half = self._half
        k = len(half)
        M = np.empty((k, k))
        for i in range(k):
            for j in range(i, k):
                s = tuple(a + b for a, b in zip(half[i], half[j]))
                M[i, j] = M[j, i] = x[self._index[s]]
        return M

    def is_extreme_ray(self, x, tol: float = DEFAULT_TOL) -> bool:
        M = self.catalecticant(x)
        w = np.linalg.eigvalsh(M)
        lead = float(w[-1])
        if lead <= tol:
            return False
        if float(w[0]) < -tol * max(1.0, lead):
            return False
        if len(w) > 1 and abs(float(w[-2])) > max(tol, 1e-8 * lead):
            return False
        return True

    def to_json_dict(self) -> dict:
        return {"type": "veronese", "n": self.n, "two_d": self.two_d}

    def __repr__(self):
        return f"Veronese(n={self.n}, two_d={self.two_d})"


# ---------------------------------------------------------------------------
# shared plumbing


def _as_sym_matrix(x, d: int) -> np.ndarray:
    """Accept either a (d,d) symmetric matrix or its svec vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        if x.shape != (d, d):
            raise UsageError(f"expected a {d}x{d} matrix, got {x.shape}")
        if np.linalg.norm(x - x.T) > 1e-8 * (1.0 + np.linalg.norm(x)):
            raise UsageError("matrix is not symmetric")
        return 0.5 * (x + x.T)
    if x.shape != (svec_dim(d),):
        raise UsageError(f"expected svec length {svec_dim(d)}, got {x.shape}")
    return smat(x)


def _orthant_image_distance(M: np.ndarray, x: np.ndarray) -> float:
    """Euclidean distance from x to {M lam : lam >= 0}.

    Lawson-Hanson NNLS terminates on an exact active set, so true members
    come back with residuals near machine precision -- an interior-point
    solve would plateau at its own convergence tolerance, which is the
    same order as the membership threshold."""
    _, resid = scipy.optimize.nnls(np.asarray(M, dtype=float),
                                   np.asarray(x, dtype=float))
    return float(resid)


def _psd_image_distance(B: np.ndarray, d: int, x: np.ndarray) -> float:
    """sup-norm distance from x to {B svec(U) : U psd} via an SDP."""
    n = B.shape[0]
    sd = svec_dim(d)
    # variables [t, p_1..p_n, q_1..q_n | svec(U)]
    nn = 1 + 2 * n
    A = np.zeros((2 * n, nn + sd))
    A[:n, 0] = -1.0
    A[:n, 1: 1 + n] = np.eye(n)
    A[:n, nn:] = B
    A[n:, 0] = 1.0
    A[n:, 1 + n: nn] = -np.eye(n)
    A[n:, nn:] = B
    b = np.concatenate([x, x])
    c = np.zeros(nn + sd)
    c[0] = 1.0
    prob = ConicProblem(A=A, b=b, c=c, num_free=0, num_nonneg=nn,
                        psd_sides=[d])
    rep = solve_conic(prob)
    if rep.status != "optimal":
        raise NumericalFailure(f"distance SDP ended with {rep.status}")
    return max(float(rep.primal_obj), 0.0)


# ---------------------------------------------------------------------------
# module-level operations (thin wrappers plus the chain reduction)


def membership(cone: ConeModel, x, tol: float = DEFAULT_TOL) -> bool:
    return cone.membership(x, tol)


def normal_cone(cone: ConeModel, x, tol: float = DEFAULT_TOL) -> NormalConeModel:
    return cone.normal_cone(x, tol)


def minimal_face(cone: ConeModel, x, tol: float = DEFAULT_TOL) -> FaceDescriptor:
    return cone.minimal_face(x, tol)


def is_extreme_ray(cone: ConeModel, x, tol: float = DEFAULT_TOL) -> bool:
    return cone.is_extreme_ray(x, tol)


def height_bound(cone: ConeModel) -> int:
    """Length bound for strictly increasing face chains (exact for
    polyhedral and semidefinite cones, dim+1 otherwise)."""
    if isinstance(cone, Polyhedral):
        return int(np.linalg.matrix_rank(cone.generators)) + 1
    if isinstance(cone, Psd):
        return cone.d + 1
    return cone.ambient_dim + 1


def chain_reduce(cone: ConeModel, points, tol: float = DEFAULT_TOL) -> FaceChainReport:
    """Greedy subset I of points with F_C(sum over I) = F_C(sum over all):
    scan in order, adding a point whenever it leaves the current face."""
    if not isinstance(cone, (Polyhedral, Psd)):
        raise UnsupportedOperationError(
            f"chain reduction needs minimal faces, unavailable for "
            f"{cone.kind} cones")
    pts = [np.asarray(p, dtype=float) for p in points]
    if not pts:
        raise UsageError("need at least one point")
    if isinstance(cone, Psd):
        pts = [svec(_as_sym_matrix(p, cone.d)) for p in pts]
    for p in pts:
        if not cone.membership(p, tol):
            raise DomainError("all points must lie in the cone")
    chosen = []
    total = np.zeros_like(pts[0])
    face = None
    for i, p in enumerate(pts):
        if face is None:
            inside = float(np.linalg.norm(p)) <= tol
        else:
            inside = cone.face_contains(face, p, tol)
        if not inside:
            chosen.append(i)
            total = total + p
            face = cone.minimal_face(total, tol)
    return FaceChainReport(chosen, len(chosen), height_bound(cone))


def random_polyhedral_cone(ambient: int, num_generators: int, seed) -> Polyhedral:
    """Pointed test cone: generators (1, g) with g standard Gaussian."""
    if ambient < 2:
        raise UsageError("ambient dimension must be at least 2")
    if num_generators < ambient:
        raise UsageError("need at least as many generators as dimensions")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((num_generators, ambient - 1))
    return Polyhedral(np.column_stack([np.ones(num_generators), g]))


def cone_from_json_dict(data: dict) -> ConeModel:
    """Inverse of ConeModel.to_json_dict."""
    kind = data.get("type")
    if kind == "polyhedral":
        return Polyhedral(np.asarray(data["generators"], dtype=float))
    if kind == "psd":
        return Psd(int(data["d"]))
    if kind == "linear_image":
        return LinearImage(cone_from_json_dict(data["base"]),
                           np.asarray(data["map"], dtype=float))
    if kind == "hyperbolicity":
        return Hyperbolicity(SparsePoly.from_json_dict(data["p"]),
                             np.asarray(data["e"], dtype=float))
    if kind == "veronese":
        return Veronese(int(data["n"]), int(data["two_d"]))
    raise UsageError(f"unknown cone type {kind!r}")
