"""Neighborliness scans and the moment-cone certificate toolbox.

A pointed cone is k-neighborly when every collection of up to k
normalized extreme rays spans a face: some linear functional vanishes
on the collection while staying >= 1 on the remaining extreme rays.
For polyhedral cones that is a finite list of small feasibility LPs.
For moment cones the exposing functionals are explicit products of
quadratics, and the growth and regularity constants attached to them
are estimated by sampling -- reported as observations, never as proofs.
"""

import itertools
from functools import lru_cache
from math import comb, factorial, inf

import numpy as np

from .cones import Polyhedral, Veronese
from .errors import DomainError, NumericalFailure, UsageError
from .linalg import DEFAULT_TOL
from .polynomials import SparsePoly, monomials_of_degree
from .solver import LpProblem, solve_lp

SUBSET_CAP = 1_000_000

# Seven binary-support quartic sample points in R^4 whose double-vanishing
# space of quartics is 10-dimensional while the Gram-witnessed part of it
# stops at 6; the classical gap instance for the dual checker.
BLEKHERMAN_S = np.array([
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 1.0, 0.0],
    [1.0, 0.0, 0.0, 1.0],
    [0.0, 1.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 1.0],
    [0.0, 0.0, 1.0, 1.0],
    [1.0, 1.0, 1.0, 1.0],
])

_DATASETS = {"blekherman-s": BLEKHERMAN_S}


def builtin_dataset(name: str) -> np.ndarray:
    """A named point set shipped with the package (rows are points)."""
    key = str(name).strip().lower()
    if key not in _DATASETS:
        raise UsageError(
            f"unknown dataset {name!r}; available: {sorted(_DATASETS)}")
    return _DATASETS[key].copy()


class NeighborlinessVerdict:
    """Outcome of a k-neighborliness scan over extreme-ray subsets."""

    __slots__ = ("k", "passed", "failing_subset", "witnesses")

    def __init__(self, k: int, passed: bool, failing_subset=None,
                 witnesses=None):
        self.k = int(k)
        self.passed = bool(passed)
        self.failing_subset = (None if failing_subset is None
                               else tuple(int(i) for i in failing_subset))
        self.witnesses = {} if witnesses is None else witnesses

    def to_json_dict(self, include_witnesses: bool = False) -> dict:
        out = {
            "k": self.k,
            "passed": self.passed,
            "failing_subset": (None if self.failing_subset is None
                               else list(self.failing_subset)),
            "num_witnesses": len(self.witnesses),
        }
        if include_witnesses:
            out["witnesses"] = {
                ",".join(str(i) for i in key): np.asarray(ell).tolist()
                for key, ell in sorted(self.witnesses.items())
            }
        return out

    def __repr__(self):
        flag = "pass" if self.passed else f"FAIL at {self.failing_subset}"
        return f"NeighborlinessVerdict(k={self.k}, {flag})"


class GrowthCertificate:
    """Sampled growth (mu, epsilon) and regularity (nu, delta) constants.

    Only the slots relevant to the producing estimate are meaningful;
    the others are left at 0.  ``min_ratio_observed`` keeps the raw
    sampled extremum even when a sentinel overrides the headline value.
    """

    __slots__ = ("mu", "epsilon", "nu", "delta", "num_samples",
                 "min_ratio_observed", "analytic_bound")

    def __init__(self, mu=0.0, epsilon=0.0, nu=0.0, delta=0.0,
                 num_samples=0, min_ratio_observed=0.0, analytic_bound=None):
        self.mu = float(mu)
        self.epsilon = float(epsilon)
        self.nu = float(nu)
        self.delta = float(delta)
        self.num_samples = int(num_samples)
        self.min_ratio_observed = float(min_ratio_observed)
        self.analytic_bound = (None if analytic_bound is None
                               else float(analytic_bound))

    def to_json_dict(self) -> dict:
        return {
            "mu": self.mu,
            "epsilon": self.epsilon,
            "nu": self.nu,
            "delta": self.delta,
            "num_samples": self.num_samples,
            "min_ratio_observed": self.min_ratio_observed,
            "analytic_bound": self.analytic_bound,
        }

    def __repr__(self):
        return (f"GrowthCertificate(mu={self.mu:.4g}, eps={self.epsilon:.3g}, "
                f"nu={self.nu:.4g}, delta={self.delta:.3g}, "
                f"samples={self.num_samples})")


# ---------------------------------------------------------------------------
# polyhedral k-neighborliness


def _normalized_extreme(cone: Polyhedral, tol: float):
    """Unit representatives of the distinct extreme rays, with the index
    each one carries in the cone's generator list."""
    G = cone.generators
    reps, idx = [], []
    for i in range(G.shape[0]):
        g = G[i]
        nrm = float(np.linalg.norm(g))
        if nrm <= tol:
            continue
        u = g / nrm
        if any(abs(float(u @ r)) > 1.0 - 1e-12 for r in reps):
            continue
        if cone.is_extreme_ray(g, tol):
            reps.append(u)
            idx.append(i)
    return np.array(reps), idx


def _expose_lp(X: np.ndarray, inside) -> np.ndarray | None:
    """A functional vanishing on X[inside] and >= 1 on the other rows,
    or None when no such functional exists."""
    m = X.shape[1]
    inside = set(inside)
    outside = [j for j in range(X.shape[0]) if j not in inside]
    cols = m + len(outside)
    rows, rhs = [], []
    for i in sorted(inside):
        r = np.zeros(cols)
        r[:m] = X[i]
        rows.append(r)
        rhs.append(0.0)
    for a, j in enumerate(outside):
        r = np.zeros(cols)
        r[:m] = X[j]
        r[m + a] = -1.0
        rows.append(r)
        rhs.append(1.0)
    lb = np.concatenate([np.full(m, -np.inf), np.zeros(len(outside))])
    rep = solve_lp(LpProblem(np.zeros(cols), np.vstack(rows),
                             np.array(rhs), lb))
    if rep.status == "optimal":
        return rep.x[:m].copy()
    if rep.status == "infeasible":
        return None
    raise NumericalFailure(f"exposure LP ended with status {rep.status}")


def _scan_chunk(X, subsets):
    witnesses, failing = [], None
    for sub in subsets:
        ell = _expose_lp(X, sub)
        if ell is None:
            failing = sub
            break
        witnesses.append((sub, ell))
    return witnesses, failing


def is_k_neighborly_polyhedral(cone: Polyhedral, k: int, *,
                               max_subsets: int = SUBSET_CAP,
                               sample: int | None = None, seed: int = 0,
                               jobs: int = 1,
                               tol: float = DEFAULT_TOL) -> NeighborlinessVerdict:
    """Scan all extreme-ray subsets of size <= k for exposing functionals.

    Subsets are tried in lexicographic order (sizes ascending) and the
    scan stops at the first subset no functional exposes, so the failing
    subset reported is the lex-least one.  When the subset count exceeds
    ``max_subsets`` the scan refuses to run unless ``sample`` gives a
    number of random subsets to spot-check instead; a sampled pass is
    only evidence, not a verdict over every subset.  Witness keys and
    the failing subset refer to indices into ``cone.generators``.
    """
    if not isinstance(cone, Polyhedral):
        raise UsageError("neighborliness scan expects a polyhedral cone")
    if k < 1:
        raise UsageError("k must be at least 1")
    X, orig = _normalized_extreme(cone, tol)
    n_ext = X.shape[0]
    if n_ext == 0:
        raise DomainError("cone has no extreme rays")
    k_eff = min(k, n_ext)
    total = sum(comb(n_ext, j) for j in range(1, k_eff + 1))

    if total > max_subsets and sample is None:
        raise UsageError(
            f"{total} subsets exceed the cap {max_subsets}; pass sample=N "
            "to spot-check N random subsets instead")

    if total > max_subsets:
        rng = np.random.default_rng(seed)
        counts = np.array([comb(n_ext, j) for j in range(1, k_eff + 1)],
                          dtype=float)
        probs = counts / counts.sum()
        subsets = []
        for _ in range(int(sample)):
            j = 1 + int(rng.choice(k_eff, p=probs))
            subsets.append(tuple(sorted(
                int(t) for t in rng.choice(n_ext, size=j, replace=False))))
    else:
        subsets = [sub for j in range(1, k_eff + 1)
                   for sub in itertools.combinations(range(n_ext), j)]

    witnesses = {}
    failing = None
    if jobs == 1 or len(subsets) <= 32:
        pairs, failing = _scan_chunk(X, subsets)
        for sub, ell in pairs:
            witnesses[tuple(orig[i] for i in sub)] = ell
    else:
        from joblib import Parallel, delayed

        nj = int(jobs)
        chunks = [subsets[c::nj] for c in range(nj)]
        results = Parallel(n_jobs=nj, prefer="threads")(
            delayed(_scan_chunk)(X, chunk) for chunk in chunks if chunk)
        fails = []
        for pairs, fail in results:
            for sub, ell in pairs:
                witnesses[tuple(orig[i] for i in sub)] = ell
            if fail is not None:
                fails.append(fail)
        if fails:
            failing = min(fails, key=lambda s: (len(s), s))
    if failing is not None:
        return NeighborlinessVerdict(
            k, False, tuple(orig[i] for i in failing), witnesses)
    return NeighborlinessVerdict(k, True, None, witnesses)


# ---------------------------------------------------------------------------
# Veronese embedding, Bombieri inner product, exposing certificates


@lru_cache(maxsize=None)
def _phi_data(n: int, two_d: int):
    """(exponent matrix, multinomial weights) for the degree-2d basis."""
    monos = monomials_of_degree(n, two_d)
    E = np.array(monos, dtype=np.int64)
    w = np.array([factorial(two_d) / np.prod([factorial(a) for a in alpha])
                  for alpha in monos])
    return E, w


def veronese_phi(n: int, two_d: int, z) -> np.ndarray:
    """Moment vector (z^alpha) over |alpha| = 2d in graded-lex order."""
    if two_d < 2 or two_d % 2 != 0:
        raise UsageError("degree must be even and at least 2")
    z = np.asarray(z, dtype=float).ravel()
    if z.shape != (n,):
        raise UsageError(f"expected a point in R^{n}, got shape {z.shape}")
    E, _ = _phi_data(n, two_d)
    return np.prod(np.power(z[None, :], E), axis=1)


def bombieri_inner(u, v, n: int, two_d: int) -> float:
    """Weighted inner product under which <phi(y), phi(z)> = <y,z>^(2d)."""
    E, w = _phi_data(n, two_d)
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.shape != (E.shape[0],) or v.shape != (E.shape[0],):
        raise UsageError(
            f"expected coefficient vectors of length {E.shape[0]}")
    return float(np.sum(w * u * v))


def _bombieri_dist(u, v, n, two_d) -> float:
    d = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    return float(np.sqrt(max(bombieri_inner(d, d, n, two_d), 0.0)))


def kw_certificate_veronese(points, d: int, *, check: bool = True,
                            seed: int = 0) -> np.ndarray:
    """Coefficients of the exposing form prod_i(|z|^2 - <z, z_i>^2)
    times |z|^(2(d-|I|)), in the degree-2d monomial order.

    Each factor is nonnegative by Cauchy-Schwarz and vanishes exactly on
    the line through its point, so the functional exposes the face the
    points span; the norm-power padding keeps the degree at 2d when
    fewer than d points are given.  With ``check`` the expansion is
    re-verified by sampling against the factored form.
    """
    pts = [np.asarray(z, dtype=float).ravel() for z in points]
    if not pts:
        raise UsageError("need at least one point")
    if len(pts) > d:
        raise UsageError(f"at most d={d} points are allowed, got {len(pts)}")
    n = pts[0].shape[0]
    for z in pts:
        if z.shape != (n,):
            raise UsageError("points must share one dimension")
        if abs(float(np.linalg.norm(z)) - 1.0) > 1e-8:
            raise UsageError("points must be unit norm")
    two_d = 2 * d
    norm2 = SparsePoly(n, {tuple(2 if j == t else 0 for t in range(n)): 1.0
                           for j in range(n)})
    prod = SparsePoly.constant(n, 1.0)
    for z in pts:
        lin = SparsePoly(n, {tuple(1 if j == t else 0 for t in range(n)):
                             float(z[j]) for j in range(n) if z[j] != 0.0})
        prod = prod * (norm2 - lin * lin)
    prod = prod * norm2 ** (d - len(pts))

    E, _ = _phi_data(n, two_d)
    index = {tuple(int(a) for a in E[i]): i for i in range(E.shape[0])}
    coeffs = np.zeros(E.shape[0])
    for expo, c in prod.terms.items():
        coeffs[index[expo]] = float(c)

    if check:
        rng = np.random.default_rng(seed)
        for z in pts:
            if abs(float(coeffs @ veronese_phi(n, two_d, z))) > 1e-10:
                raise NumericalFailure(
                    "certificate does not vanish at its own point")
        for _ in range(100):
            z = rng.standard_normal(n)
            z /= np.linalg.norm(z)
            direct = float(np.prod([1.0 - float(z @ zi) ** 2 for zi in pts]))
            via = float(coeffs @ veronese_phi(n, two_d, z))
            if abs(via - direct) > 1e-10 * max(1.0, abs(direct)):
                raise NumericalFailure("certificate expansion mismatch")
            if via <= 0.0 and direct > 1e-12:
                raise NumericalFailure(
                    "certificate is not positive off its points")
    return coeffs


# ---------------------------------------------------------------------------
# sampled growth and regularity constants


def estimate_growth_constant(points, d: int | None = None,
                             n: int | None = None,
                             num_samples: int = 200, epsilon: float = 0.5,
                             seed: int = 0) -> GrowthCertificate:
    """Sampled lower-envelope slope of the exposing functional near its
    zero set: min of ell(phi(z)) / dist_B(phi(z), phi(I))^2 over unit z
    landing within epsilon (Bombieri distance) of some phi(z_i).

    Passing a polyhedral cone instead of a point list short-circuits to
    the vacuous answer: extreme rays are isolated, so for epsilon below
    half the minimum pairwise distance nothing lands in the punctured
    neighborhood and any slope works (mu = inf sentinel).
    """
    if isinstance(points, Polyhedral):
        X, _ = _normalized_extreme(points, DEFAULT_TOL)
        eps = inf
        for i in range(X.shape[0]):
            for j in range(i + 1, X.shape[0]):
                eps = min(eps, 0.5 * float(np.linalg.norm(X[i] - X[j])))
        return GrowthCertificate(mu=inf, epsilon=0.0 if np.isinf(eps) else eps,
                                 num_samples=0, min_ratio_observed=inf)

    if d is None:
        raise UsageError("d is required for moment-cone estimation")
    if epsilon <= 0:
        raise UsageError("epsilon must be positive")
    pts = [np.asarray(z, dtype=float).ravel() for z in points]
    pts = [z / np.linalg.norm(z) for z in pts]
    if n is None:
        n = pts[0].shape[0]
    two_d = 2 * d
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            if _bombieri_dist(veronese_phi(n, two_d, pts[a]),
                              veronese_phi(n, two_d, pts[b]),
                              n, two_d) <= 1e-9:
                raise UsageError("points must be distinct as moment rays")
    ell = kw_certificate_veronese(pts, d, check=False)
    phis = [veronese_phi(n, two_d, z) for z in pts]
    rng = np.random.default_rng(seed)
    ratios = []
    attempts = 0
    spread = epsilon / np.sqrt(2.0 * two_d)
    while len(ratios) < num_samples and attempts < 10 * num_samples:
        attempts += 1
        i = int(rng.integers(len(pts)))
        g = rng.standard_normal(n)
        z = pts[i] + rng.uniform(0.0, 2.0 * spread) * g / np.linalg.norm(g)
        z /= np.linalg.norm(z)
        ph = veronese_phi(n, two_d, z)
        dist = min(_bombieri_dist(ph, p, n, two_d) for p in phis)
        if dist > epsilon or dist < 1e-9:
            continue
        ratios.append(float(ell @ ph) / dist ** 2)
    if not ratios:
        raise NumericalFailure(
            f"no samples landed in the epsilon-neighborhood after "
            f"{attempts} attempts")
    bound = (1.0 / two_d) * (epsilon ** 2 / two_d) ** (d - 1)
    mu = min(ratios)
    return GrowthCertificate(mu=mu, epsilon=epsilon,
                             num_samples=len(ratios),
                             min_ratio_observed=mu, analytic_bound=bound)


def _point_from_moment(cone: Veronese, x0: np.ndarray) -> np.ndarray:
    """Recover the unit point whose moment ray x0 spans (sign ambiguity
    is harmless at even degree)."""
    n, two_d = cone.n, cone.two_d
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape == (n,):
        nrm = float(np.linalg.norm(x0))
        if nrm <= 1e-12:
            raise UsageError("zero point")
        return x0 / nrm
    if x0.shape != (cone.ambient_dim,):
        raise UsageError(
            f"expected a point in R^{n} or a moment vector of length "
            f"{cone.ambient_dim}")
    index = cone._index
    pure = np.array([x0[index[tuple(two_d if t == j else 0
                                    for t in range(n))]]
                     for j in range(n)])
    scale = float(np.max(np.abs(x0)))
    if scale <= 1e-12:
        raise UsageError("zero moment vector")
    if np.any(pure < -1e-8 * scale):
        raise DomainError("pure-power moments must be nonnegative")
    absz = np.clip(pure, 0.0, None) ** (1.0 / two_d)
    j0 = int(np.argmax(absz))
    signs = np.zeros(n)
    for k in range(n):
        if k == j0:
            signs[k] = 1.0
            continue
        alpha = tuple((two_d - 1) if t == j0 else (1 if t == k else 0)
                      for t in range(n))
        signs[k] = np.sign(x0[index[alpha]])
    z = signs * absz
    nrm = float(np.linalg.norm(z))
    if nrm <= 1e-12:
        raise DomainError("moment vector has no real preimage")
    z /= nrm
    u = veronese_phi(n, two_d, z)
    if np.linalg.norm(x0 / np.linalg.norm(x0)
                      - u / np.linalg.norm(u)) > 1e-6:
        raise DomainError(
            "vector is not the moment vector of a real point")
    return z


def estimate_regularity(cone, x0, ell, num_samples: int = 1000,
                        delta: float = 0.5, seed: int = 0) -> GrowthCertificate:
    """Sampled upper-envelope slope nu of ell over extreme rays near x0:
    max of ell(x) / dist_B(x, x0)^2 for Bombieri-normalized moment rays
    within delta of x0.  Polyhedral cones short-circuit to nu = 0: their
    extreme rays are isolated, so a small enough delta leaves nothing to
    bound.  ``ell`` must vanish at x0 and be nonnegative nearby.
    """
    if isinstance(cone, Polyhedral):
        return GrowthCertificate(nu=0.0, delta=delta, num_samples=0)
    if not isinstance(cone, Veronese):
        raise UsageError("regularity sampling covers polyhedral and "
                         "moment cones")
    if delta <= 0:
        raise UsageError("delta must be positive")
    n, two_d = cone.n, cone.two_d
    z0 = _point_from_moment(cone, x0)
    ell = np.asarray(ell, dtype=float).ravel()
    if ell.shape != (cone.ambient_dim,):
        raise UsageError(
            f"functional must have length {cone.ambient_dim}")
    ph0 = veronese_phi(n, two_d, z0)
    v0 = float(ell @ ph0)
    if abs(v0) > 1e-10 * max(1.0, float(np.max(np.abs(ell)))):
        raise UsageError("functional does not vanish at x0")
    rng = np.random.default_rng(seed)
    ratios = []
    attempts = 0
    spread = delta / np.sqrt(2.0 * two_d)
    ell_scale = max(1.0, float(np.max(np.abs(ell))))
    while len(ratios) < num_samples and attempts < 10 * num_samples:
        attempts += 1
        g = rng.standard_normal(n)
        z = z0 + rng.uniform(0.0, 2.0 * spread) * g / np.linalg.norm(g)
        z /= np.linalg.norm(z)
        ph = veronese_phi(n, two_d, z)
        dist = _bombieri_dist(ph, ph0, n, two_d)
        if dist > delta or dist < 1e-9:
            continue
        val = float(ell @ ph)
        if val < -1e-10 * ell_scale:
            raise UsageError(
                "functional is negative on a sampled extreme ray")
        ratios.append(max(val, 0.0) / dist ** 2)
    if not ratios:
        raise NumericalFailure(
            f"no samples landed in the delta-neighborhood after "
            f"{attempts} attempts")
    return GrowthCertificate(nu=max(ratios), delta=delta,
                             num_samples=len(ratios),
                             min_ratio_observed=min(ratios))


# ---------------------------------------------------------------------------
# double-vanishing dimension


def double_vanishing_dimension(points, n: int, two_d: int) -> int:
    """Dimension of degree-2d forms with q(z_i) = 0 and grad q(z_i) = 0
    for every sample point (values follow from gradients by homogeneity,
    so only gradient rows enter the rank computation)."""
    E, _ = _phi_data(n, two_d)
    amb = E.shape[0]
    pts = [np.asarray(z, dtype=float).ravel() for z in points]
    if not pts:
        return amb
    rows = []
    for z in pts:
        if z.shape != (n,):
            raise UsageError(f"expected points in R^{n}")
        if float(np.linalg.norm(z)) <= 1e-12:
            raise UsageError("points must be nonzero")
        for j in range(n):
            mask = E[:, j] > 0
            Em = E.copy()
            Em[mask, j] -= 1
            vals = np.prod(np.power(z[None, :], Em), axis=1)
            rows.append(np.where(mask, E[:, j] * vals, 0.0))
    A = np.vstack(rows)
    return amb - int(np.linalg.matrix_rank(A))
