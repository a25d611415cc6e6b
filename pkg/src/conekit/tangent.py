"""Convex tangent spaces per cone model and the primal/dual additivity
checkers with certificates.

The tangent space L_C(x) is the lineality space of the tangent cone of C
at x.  The primal checker compares L_C(sum x_i) against sum_i L_C(x_i)
on a collection of extreme-ray generators; the dual checker compares
span of an intersection of normal cones against the intersection of
their spans.  One inclusion holds for free in each mode, so failure
certificates always live on the larger side.
"""

from functools import reduce

import numpy as np
import scipy.linalg

from .cones import (ConeModel, Hyperbolicity, LinearImage, Polyhedral,
                    PolyhedralFace, Psd, PsdFace, Veronese, chain_reduce,
                    height_bound)
from .errors import (DomainError, NumericalFailure, UnsupportedOperationError,
                     UsageError)
from .linalg import (DEFAULT_TOL, Subspace, orthonormal_basis, smat,
                     subspace_equal, subspace_sum, svec, svec_dim)
from .solver import LpProblem, max_min_slack_psd, solve_lp


class TerraciniVerdict:
    """Outcome of one tangent-space additivity comparison."""

    __slots__ = ("passed", "dim_lhs", "dim_rhs", "certificate", "mode")

    def __init__(self, passed: bool, dim_lhs: int, dim_rhs: int,
                 certificate, mode: str):
        self.passed = bool(passed)
        self.dim_lhs = int(dim_lhs)
        self.dim_rhs = int(dim_rhs)
        self.certificate = certificate
        self.mode = mode

    @property
    def holds(self) -> bool:
        return self.passed

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "dim_lhs": self.dim_lhs,
            "dim_rhs": self.dim_rhs,
            "mode": self.mode,
            "certificate": (None if self.certificate is None
                            else np.asarray(self.certificate).tolist()),
        }

    def __repr__(self):
        flag = "pass" if self.passed else "FAIL"
        return (f"TerraciniVerdict({flag}, lhs={self.dim_lhs}, "
                f"rhs={self.dim_rhs}, mode={self.mode})")


# ---------------------------------------------------------------------------
# tangent spaces


def convex_tangent_space(cone: ConeModel, x, tol: float = DEFAULT_TOL) -> Subspace:
    """L_C(x): the lineality space of the tangent cone of C at x."""
    x = _to_ambient(cone, x)
    if isinstance(cone, Polyhedral):
        if not cone.membership(x, tol):
            raise DomainError("point is not in the cone")
        face = cone.minimal_face(x, tol)
        if not face.indices:
            return Subspace.zero(cone.ambient_dim)
        return orthonormal_basis(list(cone.generators[list(face.indices)]))
    if isinstance(cone, Psd):
        if not cone.membership(x, tol):
            raise DomainError("matrix is not positive semidefinite")
        Z = cone.minimal_face(x, tol).Z
        return _psd_kernel_block_space(cone.d, Z)
    if isinstance(cone, Hyperbolicity):
        from .hyperbolic import lineality_space, localize

        if not cone.membership(x, tol):
            raise DomainError("point is not in the hyperbolicity cone")
        loc, _mult = localize(cone.p, x)
        return lineality_space(loc, cone.e)
    if isinstance(cone, LinearImage):
        if not cone.membership(x, tol):
            raise DomainError("point is not in the image cone")
        return _linear_image_tangent(cone, x, tol)
    if isinstance(cone, Veronese):
        if cone.n == 2:
            return _veronese2_tangent(cone, x, tol)
        raise UnsupportedOperationError(
            "tangent spaces of moment cones are only computed for n=2 "
            "(dense Hankel representation); use the dual checker instead")
    raise UnsupportedOperationError(
        f"no tangent-space rule for cone kind {cone.kind!r}")


def _psd_kernel_block_space(d: int, Z: np.ndarray) -> Subspace:
    """{Q symmetric : Z'QZ = 0} in svec coordinates."""
    n = svec_dim(d)
    if Z.shape[1] == 0:
        return Subspace.full(n)
    rows = []
    for a in range(Z.shape[1]):
        for b in range(a, Z.shape[1]):
            E = 0.5 * (np.outer(Z[:, a], Z[:, b]) + np.outer(Z[:, b], Z[:, a]))
            rows.append(svec(E))
    null = scipy.linalg.null_space(np.vstack(rows))
    if null.shape[1] == 0:
        return Subspace.zero(n)
    return Subspace(n, null)


def _veronese2_tangent(cone: Veronese, x, tol: float) -> Subspace:
    """Tangent space of the binary moment cone via its Hankel spectrahedron
    (x in C_{2,2d} iff the moment Hankel matrix is psd)."""
    from .hyperbolic import lineality_space, localize
    from .polynomials import hankel_determinant_polynomial

    x = np.asarray(x, dtype=float)
    A = cone.catalecticant(x)
    wmin = float(np.linalg.eigvalsh(A)[0])
    if wmin < -tol * max(1.0, float(np.max(np.abs(A)))):
        raise DomainError("point is not in the moment cone")
    d_half = cone.two_d // 2
    p = hankel_determinant_polynomial(d_half + 1)
    e = _gaussian_moment_direction(cone.two_d)
    loc, _mult = localize(p, x)
    return lineality_space(loc, e)


def _gaussian_moment_direction(two_d: int) -> np.ndarray:
    """Moments of the standard Gaussian, E[z1^(2d-k) z2^k]; the associated
    Hankel matrix is positive definite, so this is an interior direction."""
    from math import prod

    def dfact(m):  # (m)!! with (-1)!! = 0!! = 1
        return prod(range(m, 0, -2)) if m > 0 else 1

    e = np.zeros(two_d + 1)
    for k in range(0, two_d + 1, 2):
        e[k] = dfact(two_d - k - 1) * dfact(k - 1)
    return e


def _linear_image_tangent(cone: LinearImage, x, tol: float) -> Subspace:
    """L = span(N(x))^perp with N(x) = {lam : B'lam in N_base(u)}."""
    base, B = cone.base, cone.B
    u = cone.preimage(x, tol)
    if isinstance(base, Polyhedral):
        G = base.generators
        face = base.minimal_face(u, tol)
        # B'lam in N_base(u)  <=>  (-G B'lam) lands in the orthant face
        # supported off the minimal-face generators
        carrier = -G @ B.T
        support = tuple(j for j in range(G.shape[0])
                        if j not in face.indices)
        span_n = span_of_normal_preimage(carrier.T, PolyhedralFace(support))
    else:  # Psd base (validated by LinearImage itself)
        Z = base.minimal_face(svec(u) if u.ndim == 2 else u, tol).Z
        # N_base = -Z S+ Z'; its span factor is Z, i.e. the face cone
        # whose kernel is the orthogonal complement of Z
        comp = scipy.linalg.null_space(Z.T) if Z.shape[1] < base.d \
            else np.zeros((base.d, 0))
        span_n = span_of_normal_preimage(B, PsdFace(base.d, comp))
    return span_n.complement()


# ---------------------------------------------------------------------------
# span of {lam : B'lam in a face cone}


def span_of_normal_preimage(B, base_face) -> Subspace:
    """span of P = {lam : B'lam in the face cone described by base_face},
    with the face read as a face of the nonnegative orthant
    (PolyhedralFace, indices = support) or of the psd cone (PsdFace).

    The span is {lam : B'lam in span F} for F the maximal face of the
    given one whose relative interior P reaches: one-sided constraints
    open into two-sided ones exactly on the face P's relative interior
    points expose.
    """
    B = np.asarray(B, dtype=float)
    if isinstance(base_face, PolyhedralFace):
        return _orthant_preimage_span(B, base_face.indices)
    if isinstance(base_face, PsdFace):
        U = scipy.linalg.null_space(base_face.Z.T) \
            if base_face.Z.shape[1] else np.eye(base_face.d)
        return _psd_preimage_span(B, U, base_face.d)
    raise UsageError("face must be a PolyhedralFace or PsdFace")


def _orthant_preimage_span(B: np.ndarray, support) -> Subspace:
    n, N = B.shape
    support = sorted(set(int(j) for j in support))
    off = [j for j in range(N) if j not in support]
    reached = []
    for i in support:
        if _face_index_feasible(B, support, off, i):
            reached.append(i)
    outside = [j for j in range(N) if j not in reached]
    if not outside:
        return Subspace.full(n)
    null = scipy.linalg.null_space(B[:, outside].T)
    if null.shape[1] == 0:
        return Subspace.zero(n)
    return Subspace(n, null)


def _face_index_feasible(B, support, off, i) -> bool:
    """Does some lam satisfy (B'lam)_off = 0, (B'lam)_support >= 0 and
    (B'lam)_i = 1?"""
    n = B.shape[0]
    ns = len(support)
    cols = n + ns
    rows = []
    rhs = []
    for j in off:
        r = np.zeros(cols)
        r[:n] = B[:, j]
        rows.append(r)
        rhs.append(0.0)
    for a, j in enumerate(support):
        r = np.zeros(cols)
        r[:n] = B[:, j]
        r[n + a] = -1.0
        rows.append(r)
        rhs.append(0.0)
    r = np.zeros(cols)
    r[:n] = B[:, i]
    rows.append(r)
    rhs.append(1.0)
    lb = np.concatenate([np.full(n, -np.inf), np.zeros(ns)])
    rep = solve_lp(LpProblem(np.zeros(cols), np.vstack(rows),
                             np.array(rhs), lb))
    if rep.status == "optimal":
        return True
    if rep.status == "infeasible":
        return False
    raise NumericalFailure(f"support probe ended with status {rep.status}")


def _psd_preimage_span(B: np.ndarray, U: np.ndarray, d: int,
                       delta: float = 1e-6) -> Subspace:
    """span{lam : mat(B'lam) in U S+ U'} by facial reduction: shrink U to
    the positive eigenspace of the max-min-slack block until the slack is
    strictly positive (interior-point solutions of the slack problem have
    maximal rank among optima, so the shrink is exact)."""
    n = B.shape[0]
    W = orthonormal_basis(list(B), ambient_dim=svec_dim(d))
    if W.dim == 0:
        return _psd_span_from_face(B, np.zeros((d, 0)), d)
    for _ in range(d + 1):
        if U.shape[1] == 0:
            break
        t, w, Y = max_min_slack_psd(W, U, d)
        if t > delta:
            break
        lam, V = np.linalg.eigh(Y)
        top = max(float(lam[-1]), 0.0)
        keep = lam > max(1e-6 * top, 1e-9)
        if not np.any(keep):
            U = np.zeros((d, 0))
            break
        if int(np.sum(keep)) == U.shape[1]:
            # degenerate but full-rank block: the face cannot shrink
            break
        U = np.linalg.qr(U @ V[:, keep])[0]
    return _psd_span_from_face(B, U, d)


def _psd_span_from_face(B: np.ndarray, U: np.ndarray, d: int) -> Subspace:
    n = B.shape[0]
    Z = scipy.linalg.null_space(U.T) if U.shape[1] < d else np.zeros((d, 0))
    if Z.shape[1] == 0:
        return Subspace.full(n)
    T = np.empty((d * Z.shape[1], n))
    for j in range(n):
        T[:, j] = (smat(B[j]) @ Z).ravel()
    null = scipy.linalg.null_space(T)
    if null.shape[1] == 0:
        return Subspace.zero(n)
    return Subspace(n, null)


# ---------------------------------------------------------------------------
# primal checker


def is_k_terracini_primal(cone: ConeModel, rays, k=None,
                          check_extreme: bool = True,
                          cache: dict | None = None,
                          tol: float = DEFAULT_TOL) -> TerraciniVerdict:
    """Compare L_C(sum rays) with sum of the per-ray tangent spaces.

    ``cache`` maps ray bytes to tangent subspaces so repeated collections
    over a fixed generator pool pay for each tangent space once.
    ``check_extreme=False`` skips the extremality precondition for cones
    without an extremality test (sampled boundary candidates).
    """
    pts = [_to_ambient(cone, r) for r in rays]
    if not pts:
        raise UsageError("need at least one ray")
    if k is not None and len(pts) != int(k):
        raise UsageError(f"expected {k} rays, got {len(pts)}")
    if check_extreme:
        for i, r in enumerate(pts):
            if not cone.is_extreme_ray(r, tol):
                raise UsageError(f"ray {i} is not an extreme-ray generator")
    parts = []
    for r in pts:
        key = r.tobytes()
        if cache is not None and key in cache:
            parts.append(cache[key])
            continue
        L = convex_tangent_space(cone, r, tol)
        if cache is not None:
            cache[key] = L
        parts.append(L)
    rhs = reduce(subspace_sum, parts)
    lhs = convex_tangent_space(cone, np.sum(pts, axis=0), tol)
    equal, _ = subspace_equal(lhs, rhs)
    cert = None if equal else _excess_direction(lhs, rhs)
    return TerraciniVerdict(equal, lhs.dim, rhs.dim, cert, "primal")


def _excess_direction(big: Subspace, small: Subspace):
    """A unit vector of ``big`` orthogonal to ``small`` (None if none
    sticks out numerically)."""
    resid = big.basis - np.column_stack([small.project(big.basis[:, j])
                                         for j in range(big.dim)]) \
        if big.dim else np.zeros((big.ambient_dim, 0))
    if resid.shape[1] == 0:
        return None
    norms = np.linalg.norm(resid, axis=0)
    j = int(np.argmax(norms))
    if norms[j] <= 1e-10:
        return None
    return resid[:, j] / norms[j]


# ---------------------------------------------------------------------------
# dual checker


def is_k_terracini_dual(cone, rays_in_base, tol: float = DEFAULT_TOL) -> TerraciniVerdict:
    """Dual-side comparison span(intersection of normal cones) vs
    intersection of their spans, at the face dual-associated to the rays.

    Supported inputs: a LinearImage over a Polyhedral (orthant-carrier)
    or Psd base, with rays given as base generator indices/vectors or
    rank-one factors; or a Veronese moment cone with rays given as the
    underlying points (SOS-certified mode for n >= 3).
    """
    if isinstance(cone, Veronese):
        return _veronese_dual(cone, rays_in_base, tol)
    if not isinstance(cone, LinearImage):
        raise UnsupportedOperationError(
            "dual checker needs a LinearImage or Veronese cone")
    B = cone.B
    if np.linalg.matrix_rank(B) < B.shape[0]:
        raise UsageError("the defining map must be surjective")
    if isinstance(cone.base, Polyhedral):
        return _dual_orthant_carrier(cone, rays_in_base, tol)
    return _dual_psd_base(cone, rays_in_base, tol)


def _dual_orthant_carrier(cone: LinearImage, rays, tol) -> TerraciniVerdict:
    base, B = cone.base, cone.B
    G = base.generators
    N = G.shape[0]
    idx = []
    for r in rays:
        if isinstance(r, (int, np.integer)):
            idx.append(int(r))
            continue
        r = np.asarray(r, dtype=float)
        hits = [j for j in range(N) if _parallel(G[j], r)]
        if not hits:
            raise UsageError("ray does not match any base generator")
        idx.append(hits[0])
    idx = sorted(set(idx))
    for j in idx:
        if not base.is_extreme_ray(G[j], tol):
            raise DomainError(f"base generator {j} is not extreme")
    M = B @ G.T  # orthant carrier map
    image = Polyhedral(M.T)
    for j in idx:
        if not image.is_extreme_ray(M[:, j], tol):
            raise DomainError(
                f"image of generator {j} is not extreme in the image cone")
    comp = tuple(j for j in range(N) if j not in idx)
    lhs = span_of_normal_preimage(M, PolyhedralFace(comp))
    rhs = _null_space_subspace(M[:, idx].T, B.shape[0])
    return _dual_verdict(lhs, rhs, "dual")


def _dual_psd_base(cone: LinearImage, rays, tol) -> TerraciniVerdict:
    base, B = cone.base, cone.B
    d = base.d
    V = np.column_stack([np.asarray(v, dtype=float).ravel() for v in rays])
    if V.shape[0] != d:
        raise UsageError("psd rays must be length-d rank-one factors")
    Zface = orthonormal_basis(list(V.T), ambient_dim=d).basis
    lhs = span_of_normal_preimage(B, PsdFace(d, Zface))
    # intersection of span N(v_i v_i') = {lam : mat(B'lam) v_i = 0}
    T = np.empty((d * V.shape[1], B.shape[0]))
    for j in range(B.shape[0]):
        T[:, j] = (smat(B[j]) @ V).ravel()
    rhs = _null_space_subspace(T, B.shape[0])
    return _dual_verdict(lhs, rhs, "dual")


def _veronese_dual(cone: Veronese, points, tol) -> TerraciniVerdict:
    """Forms-space comparison for the moment cone: RHS is the subspace of
    degree-2d forms whose gradient vanishes at every sample point; LHS is
    the span of SOS forms whose Gram kernels contain the point's monomial
    vectors.  For n >= 3 the LHS is only the SOS-certified part of
    span(intersection of normal cones), so a dimension gap is reported as
    inconclusive rather than as a refutation."""
    pts = [np.asarray(z, dtype=float).ravel() for z in points]
    for z in pts:
        if z.shape != (cone.n,):
            raise UsageError("each ray must be a point in R^n")
        if not cone.is_extreme_ray(_phi(cone, z), tol):
            raise DomainError("a sample point maps to a non-extreme moment")
    mono2d = cone._monomials
    half = cone._half
    D = len(half)
    amb = len(mono2d)

    rows = []
    for z in pts:
        for j in range(cone.n):
            row = np.zeros(amb)
            for a, alpha in enumerate(mono2d):
                if alpha[j] == 0:
                    continue
                shifted = list(alpha)
                shifted[j] -= 1
                row[a] = alpha[j] * _power(z, tuple(shifted))
            rows.append(row)
    rhs = _null_space_subspace(np.vstack(rows), amb)

    Mpts = np.column_stack([[_power(z, beta) for beta in half] for z in pts])
    Wm = scipy.linalg.null_space(Mpts.T)
    vecs = []
    index2d = cone._index
    for a in range(Wm.shape[1]):
        for b in range(a, Wm.shape[1]):
            Q = 0.5 * (np.outer(Wm[:, a], Wm[:, b])
                       + np.outer(Wm[:, b], Wm[:, a]))
            coeff = np.zeros(amb)
            for i in range(D):
                for j in range(D):
                    gamma = tuple(half[i][t] + half[j][t]
                                  for t in range(cone.n))
                    coeff[index2d[gamma]] += Q[i, j]
            vecs.append(coeff)
    lhs = orthonormal_basis(vecs, ambient_dim=amb)

    if cone.n == 2:
        return _dual_verdict(lhs, rhs, "dual")
    equal, _ = subspace_equal(lhs, rhs)
    mode = "dual-sos-certified" if equal else "dual-inconclusive"
    return TerraciniVerdict(equal, lhs.dim, rhs.dim, None, mode)


def _dual_verdict(lhs: Subspace, rhs: Subspace, mode: str) -> TerraciniVerdict:
    equal, _ = subspace_equal(lhs, rhs)
    cert = None if equal else _excess_direction(rhs, lhs)
    return TerraciniVerdict(equal, lhs.dim, rhs.dim, cert, mode)


def _null_space_subspace(A: np.ndarray, n: int) -> Subspace:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] == 0:
        return Subspace.full(n)
    null = scipy.linalg.null_space(A)
    if null.shape[1] == 0:
        return Subspace.zero(n)
    return Subspace(n, null)


def _parallel(a, b, tol: float = 1e-9) -> bool:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return False
    return float(np.linalg.norm(a / na - b / nb)) <= tol


def _phi(cone: Veronese, z: np.ndarray) -> np.ndarray:
    return np.array([_power(z, alpha) for alpha in cone._monomials])


def _power(z: np.ndarray, alpha) -> float:
    out = 1.0
    for zi, ai in zip(z, alpha):
        if ai:
            out *= zi ** ai
    return out


# ---------------------------------------------------------------------------
# sampled upgrade evidence


def terracini_upgrade_check(cone: ConeModel, k_max: int, samples: int = 50,
                            seed=0) -> dict:
    """Sampled evidence for higher-k additivity, join-closure of the
    tangent-space family, and the face-chain length bound."""
    if k_max < 1 or samples < 1:
        raise UsageError("need k_max >= 1 and samples >= 1")
    rng = np.random.default_rng(seed)
    sampler = _extreme_sampler(cone, rng)
    cache: dict = {}

    per_k = {}
    all_pass = True
    for k in range(1, k_max + 1):
        passes = 0
        failure = None
        for _ in range(samples):
            rays = [sampler() for _ in range(k)]
            verdict = is_k_terracini_primal(cone, rays, check_extreme=False,
                                            cache=cache)
            if verdict.passed:
                passes += 1
            elif failure is None:
                failure = verdict.to_json_dict()
        per_k[k] = {"trials": samples, "passes": passes, "failure": failure}
        if passes < samples:
            all_pass = False

    join_trials = max(10, samples // 2)
    join_hits = 0
    for _ in range(join_trials):
        x = _member_sample(cone, rng)
        y = _member_sample(cone, rng)
        lx = convex_tangent_space(cone, x)
        ly = convex_tangent_space(cone, y)
        lz = convex_tangent_space(cone, x + y)
        if subspace_equal(subspace_sum(lx, ly), lz)[0]:
            join_hits += 1

    chain_pts = [_member_sample(cone, rng) for _ in range(height_bound(cone) + 2)]
    chain = chain_reduce(cone, chain_pts)
    return {
        "per_k": per_k,
        "all_pass": all_pass,
        "join_closure": {"trials": join_trials, "agreements": join_hits},
        "chain": {
            "length": chain.chain_length,
            "height_bound": chain.height_bound,
            "within_bound": chain.chain_length <= chain.height_bound - 1,
        },
    }


def _extreme_sampler(cone: ConeModel, rng):
    if isinstance(cone, Psd):
        d = cone.d

        def draw():
            v = rng.standard_normal(d)
            v /= np.linalg.norm(v)
            return svec(np.outer(v, v))

        return draw
    if isinstance(cone, Polyhedral):
        G = cone.generators
        ext = [j for j in range(G.shape[0]) if cone.is_extreme_ray(G[j])]
        if not ext:
            raise DomainError("cone has no extreme generators")

        def draw():
            return G[ext[int(rng.integers(len(ext)))]].astype(float)

        return draw
    raise UnsupportedOperationError(
        "extreme-ray sampling is implemented for polyhedral and psd cones")


def _member_sample(cone: ConeModel, rng):
    if isinstance(cone, Psd):
        d = cone.d
        r = int(rng.integers(1, d + 1))
        Wf = rng.standard_normal((d, r))
        return svec(Wf @ Wf.T)
    G = cone.generators
    w = np.abs(rng.standard_normal(G.shape[0]))
    mask = rng.random(G.shape[0]) < 0.6
    if not np.any(mask):
        mask[int(rng.integers(G.shape[0]))] = True
    return G.T @ (w * mask)


def _to_ambient(cone: ConeModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if isinstance(cone, Psd) and x.ndim == 2:
        if x.shape != (cone.d, cone.d):
            raise UsageError(f"expected a {cone.d} x {cone.d} matrix")
        return svec(0.5 * (x + x.T))
    return x.ravel()
