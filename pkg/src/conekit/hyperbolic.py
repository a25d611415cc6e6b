"""Hyperbolic polynomials: eigenvalues, localization, lineality spaces,
derivative relaxations, and the verification experiments built on them.

A homogeneous p is hyperbolic along e (with p(e) > 0) when every
restriction t -> p(te - x) has only real roots; those roots are the
eigenvalues of x.  Everything here ultimately reduces to computing with
such univariate restrictions, exactly where possible and with pinned
tolerances where not.
"""

import numpy as np

from .errors import DomainError, NumericalFailure, UsageError
from .linalg import DEFAULT_TOL, Subspace, grassmann_distance, orthonormal_basis
from .polynomials import SparsePoly

# relative tolerance for discarding imaginary parts of computed roots
TAU_COMPLEX_REL = 1e-6
# relative tolerance below which an eigenvalue counts as zero
TAU_EIG_REL = 1e-7


class HyperbolicSpectrum:
    """Eigenvalues of a point, with the derived rank/multiplicity split."""

    __slots__ = ("eigenvalues", "rank", "mult", "imag_residual")

    def __init__(self, eigenvalues: np.ndarray, rank: int, mult: int,
                 imag_residual: float):
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.rank = int(rank)
        self.mult = int(mult)
        self.imag_residual = float(imag_residual)

    def __repr__(self):
        vals = ", ".join(f"{v:.6g}" for v in self.eigenvalues)
        return f"HyperbolicSpectrum([{vals}], rank={self.rank}, mult={self.mult})"


class EigenCurveSample:
    """Finite-difference derivatives of the zero-eigenvalue branches
    along a direction."""

    __slots__ = ("direction", "step", "derivatives")

    def __init__(self, direction: np.ndarray, step: float,
                 derivatives: np.ndarray):
        self.direction = np.asarray(direction, dtype=float)
        self.step = float(step)
        self.derivatives = np.asarray(derivatives, dtype=float)

    def __repr__(self):
        return (f"EigenCurveSample(step={self.step:.3g}, "
                f"derivatives={np.round(self.derivatives, 8).tolist()})")


# ---------------------------------------------------------------------------
# derivatives and univariate restriction


def directional_derivative(p: SparsePoly, v) -> SparsePoly:
    """The polynomial sum_i v_i dp/dx_i (exact when v is exact)."""
    if p.degree < 1:
        raise DomainError("cannot differentiate a constant")
    out = SparsePoly.zero(p.num_vars)
    for i, vi in enumerate(v):
        if isinstance(vi, float) and vi.is_integer():
            vi = int(vi)
        elif isinstance(vi, (np.floating, np.integer)):
            vi = int(vi) if float(vi).is_integer() else float(vi)
        if vi == 0:
            continue
        out = out + p.partial(i) * vi
    return out


def restrict_univariate(p: SparsePoly, x, direction) -> np.ndarray:
    """Coefficients c[0..deg] of t -> p(x + t*direction).

    Evaluation at Chebyshev-spaced nodes followed by a Vandermonde solve;
    the node radius balances the magnitudes of x and the direction, and a
    refit check at fresh nodes guards the answer.
    """
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if x.shape != (p.num_vars,) or direction.shape != (p.num_vars,):
        raise UsageError("point and direction must match the variable count")
    m = max(p.degree, 0)
    coefs = np.zeros(m + 1)
    if not np.any(direction):
        coefs[0] = float(p.eval(x))
        return coefs
    radius = (1.0 + float(np.abs(x).max())) / (1.0 + float(np.abs(direction).max()))
    nodes = radius * np.cos((2 * np.arange(m + 1) + 1) * np.pi / (2 * (m + 1)))
    pts = x[None, :] + nodes[:, None] * direction[None, :]
    vals = p.eval_many(pts)
    V = np.vander(nodes / radius, m + 1, increasing=True)
    c_scaled = np.linalg.solve(V, vals)
    coefs = c_scaled / radius ** np.arange(m + 1)
    # refit guard at fresh (midpoint) nodes
    fresh = radius * np.cos((np.arange(m + 1) + 0.5) * np.pi / (m + 1.5))
    fit = np.polynomial.polynomial.polyval(fresh, coefs)
    truth = p.eval_many(x[None, :] + fresh[:, None] * direction[None, :])
    scale = max(1.0, float(np.max(np.abs(truth))))
    err = float(np.max(np.abs(fit - truth)))
    if err > 1e-10 * scale:
        raise NumericalFailure(
            f"univariate restriction refit residual {err:.2e} exceeds "
            f"1e-10 x scale {scale:.2e}")
    return coefs


def descartes_membership(p: SparsePoly, e, x, tol: float = DEFAULT_TOL) -> bool:
    """x lies in the closed hyperbolicity cone iff every coefficient of
    t -> p(x + te) is nonnegative (the sign-pattern characterization)."""
    coefs = restrict_univariate(p, np.asarray(x, dtype=float), e)
    scale = max(1.0, float(np.max(np.abs(coefs))))
    return bool(np.all(coefs >= -tol * scale))


# ---------------------------------------------------------------------------
# eigenvalues


def hyperbolic_eigenvalues(p: SparsePoly, e, x) -> HyperbolicSpectrum:
    """Roots of t -> p(te - x), sorted descending.

    Exact zero eigenvalues are deflated from the coefficient tail before
    root finding, and repeated roots are recovered as cluster means: a
    k-fold root splits under roundoff into a cluster of radius ~eps^(1/k),
    far wider than the imaginary-residual budget, while its mean stays
    accurate to machine precision.  The non-hyperbolicity test is applied
    to the cluster means.
    """
    e = np.asarray(e, dtype=float)
    x = np.asarray(x, dtype=float)
    pe = float(p.eval(e))
    if pe <= 0:
        raise DomainError(f"p(e) = {pe:.3g} must be positive")
    coefs = restrict_univariate(p, -x, e)
    if coefs.size == 1:
        return HyperbolicSpectrum(np.zeros(0), 0, 0, 0.0)
    c_scale = float(np.max(np.abs(coefs)))
    mult0 = 0
    while mult0 < coefs.size - 1 and abs(coefs[mult0]) <= 1e-11 * c_scale:
        mult0 += 1
    roots = np.polynomial.polynomial.polyroots(coefs[mult0:])
    lam, imag_res = _cluster_real_parts(roots)
    if lam is None:
        raise DomainError(
            f"not hyperbolic at this point: imaginary residual {imag_res:.3e} "
            f"exceeds the {TAU_COMPLEX_REL:.0e} relative budget")
    lam = np.sort(np.concatenate([lam, np.zeros(mult0)]))[::-1]
    tau_eig = TAU_EIG_REL * (1.0 + float(np.max(np.abs(lam), initial=0.0)))
    rank = int(np.sum(np.abs(lam) > tau_eig))
    return HyperbolicSpectrum(lam, rank, len(lam) - rank, imag_res)


def _cluster_real_parts(roots: np.ndarray):
    """Merge root clusters and return (eigenvalues, imag_residual), with
    eigenvalues None when a cluster mean is genuinely non-real.

    The merge radius for a size-k cluster tracks the eps^(1/k) splitting
    law; for pairs it stays below the imaginary-residual budget, so no
    conjugate pair the budget would reject can hide inside a cluster of
    two.
    """
    if roots.size == 0:
        return np.zeros(0), 0.0
    scale = 1.0 + float(np.max(np.abs(roots)))

    def radius(k):
        return scale * (1e3 * np.finfo(float).eps) ** (1.0 / min(k, 6))

    order = np.argsort(roots.real)
    clusters = [[r] for r in roots[order]]
    # level-k linkage: at hypothesized multiplicity k, chain adjacent
    # clusters whose means sit within radius(k) of each other, but accept
    # a chain only when it gathers at least k roots.  A lone conjugate
    # pair never reaches the size needed for the generous radii, so it
    # stays split and trips the residual test below.
    m_total = len(clusters)
    for k in range(2, m_total + 1):
        while True:
            means = [np.mean(c) for c in clusters]
            sizes = [len(c) for c in clusters]
            merged_any = False
            i = 0
            while i < len(clusters):
                j = i
                while (j + 1 < len(clusters)
                       and abs(means[j + 1] - means[j]) <= radius(k)):
                    j += 1
                if j > i and sum(sizes[i:j + 1]) >= k:
                    block = [r for c in clusters[i:j + 1] for r in c]
                    clusters[i:j + 1] = [block]
                    merged_any = True
                    break
                i = j + 1
            if not merged_any:
                break
    means = np.array([np.mean(c) for c in clusters])
    imag_res = float(np.max(np.abs(means.imag)))
    if imag_res > TAU_COMPLEX_REL * scale:
        return None, imag_res
    out = np.concatenate([np.full(len(c), m.real)
                          for c, m in zip(clusters, means)])
    return out, imag_res


def check_hyperbolic(p: SparsePoly, e, num_samples: int = 100, seed=0):
    """Spot-check hyperbolicity along e on Gaussian sample directions.

    Returns (ok, worst_imag_residual); a failed sample makes ok False and
    reports the residual that broke the realness test.
    """
    e = np.asarray(e, dtype=float)
    if float(p.eval(e)) <= 0:
        raise DomainError("p(e) must be positive")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(num_samples):
        x = rng.standard_normal(p.num_vars)
        coefs = restrict_univariate(p, -x, e)
        if coefs.size == 1:
            continue
        roots = np.polynomial.polynomial.polyroots(coefs)
        lam, imag_res = _cluster_real_parts(roots)
        scale = 1.0 + float(np.max(np.abs(roots))) if roots.size else 1.0
        worst = max(worst, imag_res / scale)
        if lam is None:
            return False, worst
    return True, worst


# ---------------------------------------------------------------------------
# localization and lineality


def localize(p: SparsePoly, x):
    """(loc_x p, mult): the lowest-degree homogeneous part of
    y -> p(x + y), computed by exact shift expansion.

    Coefficients below 1e-10 x (largest shifted coefficient) are treated
    as cancellation noise and dropped before the degree cut.
    """
    shifted = p.shift(x)
    if shifted.is_zero():
        raise DomainError("polynomial vanishes identically after shift")
    thr = 1e-10 * shifted.max_abs_coef()
    cleaned = shifted.prune(thr)
    mult = min(sum(e) for e in cleaned.terms)
    return cleaned.homogeneous_part(mult), mult


def lineality_space(q: SparsePoly, e, check: bool = True) -> Subspace:
    """The lineality space {x : all eigenvalues of x vanish} of the
    hyperbolicity cone of q along e.

    Uses the Newton-identity reduction: with q(x+te) = sum_k a_k(x) t^{m-k},
    the form sum lambda_i(x)^2 = -2 a_2(x)/a_0 is positive semidefinite on
    K_1 = ker(a_1), and the lineality space is the kernel of its Gram
    matrix restricted to K_1.
    """
    e = np.asarray(e, dtype=float)
    n = q.num_vars
    m = q.degree
    if m <= 0:
        return Subspace.full(n)
    if not q.is_homogeneous():
        raise UsageError("lineality space needs a homogeneous polynomial")
    a0 = float(q.eval(e))
    if a0 <= 0:
        raise DomainError("q(e) must be positive")
    if m == 1:
        grad = np.array([float(q.terms.get(_unit(n, i), 0)) for i in range(n)])
        result = orthonormal_basis([grad]).complement()
        return _verified(q, e, result, check)

    # a_1(x) = D_e^{m-1} q(x)/(m-1)!  (linear), a_2 = D_e^{m-2} q(x)/(m-2)!
    dq = q
    for _ in range(m - 2):
        dq = directional_derivative(dq, e)
    a2_poly = dq * _inv_factorial_scale(m - 2)
    a1_poly = directional_derivative(dq, e) * _inv_factorial_scale(m - 1)

    grad1 = np.array([float(a1_poly.terms.get(_unit(n, i), 0)) for i in range(n)])
    if np.linalg.norm(grad1) <= 1e-12 * max(1.0, a1_poly.max_abs_coef()):
        K1 = Subspace.full(n)
    else:
        K1 = orthonormal_basis([grad1]).complement()
    if K1.dim == 0:
        return _verified(q, e, Subspace.zero(n), check)

    G2 = _gram_of_quadratic(a2_poly, n)
    B1 = K1.basis  # columns span K_1
    M = B1.T @ (-2.0 / a0 * G2) @ B1
    M = 0.5 * (M + M.T)
    w, V = np.linalg.eigh(M)
    wmax = max(float(w[-1]), 0.0)
    null = V[:, np.abs(w) <= 1e-8 * max(wmax, 1e-300)]
    if null.shape[1] == 0:
        result = Subspace.zero(n)
    else:
        result = orthonormal_basis(list((B1 @ null).T))
    return _verified(q, e, result, check)


def _unit(n, i):
    e = [0] * n
    e[i] = 1
    return tuple(e)


def _inv_factorial_scale(k: int):
    from fractions import Fraction
    from math import factorial

    return Fraction(1, factorial(k))


def _gram_of_quadratic(p2: SparsePoly, n: int) -> np.ndarray:
    G = np.zeros((n, n))
    for exps, coef in p2.terms.items():
        idx = [i for i, e in enumerate(exps) for _ in range(e)]
        if len(idx) != 2:
            raise UsageError("not a quadratic form")
        i, j = idx
        c = float(coef)
        if i == j:
            G[i, i] += c
        else:
            G[i, j] += c / 2
            G[j, i] += c / 2
    return G


def _verified(q, e, result: Subspace, check: bool) -> Subspace:
    if not check:
        return result
    rng = np.random.default_rng(20311)
    if result.dim > 0:
        for _ in range(10):
            z = result.basis @ rng.standard_normal(result.dim)
            spec = hyperbolic_eigenvalues(q, e, z)
            scale = 1.0 + float(np.max(np.abs(spec.eigenvalues), initial=0.0))
            if np.any(np.abs(spec.eigenvalues) > TAU_EIG_REL * scale * 10):
                raise NumericalFailure(
                    "claimed lineality direction has a nonzero eigenvalue")
    comp = result.complement()
    if comp.dim > 0:
        for _ in range(10):
            z = comp.basis @ rng.standard_normal(comp.dim)
            spec = hyperbolic_eigenvalues(q, e, z)
            scale = 1.0 + float(np.max(np.abs(spec.eigenvalues), initial=0.0))
            if np.all(np.abs(spec.eigenvalues) <= TAU_EIG_REL * scale):
                raise NumericalFailure(
                    "complement direction is lineal; tolerances too tight")
    return result


# ---------------------------------------------------------------------------
# derivative relaxations


def derivative_relaxation(p: SparsePoly, e, e_tilde=None) -> SparsePoly:
    """D_etilde p, the one-step derivative relaxation; e_tilde must lie in
    the open hyperbolicity cone (all eigenvalues strictly positive).

    Interiority is tested root-free: membership plus p(e_tilde) > 0, which
    for a hyperbolicity cone is exactly strict interiority.
    """
    e = np.asarray(e, dtype=float)
    et = e if e_tilde is None else np.asarray(e_tilde, dtype=float)
    coefs = restrict_univariate(p, et, e)
    c_scale = max(1.0, float(np.max(np.abs(coefs))))
    interior = (np.all(coefs >= -DEFAULT_TOL * c_scale)
                and coefs[0] > TAU_EIG_REL * c_scale)
    if not interior:
        raise DomainError("relaxation direction is not strictly interior")
    return directional_derivative(p, et)


def verify_mult3(p: SparsePoly, e, e_tilde, x) -> bool:
    """Check the multiplicity-transfer biconditional at x: membership with
    mult m >= 3 in the base cone corresponds exactly to membership with
    mult m-1 in the one-step relaxation."""
    e = np.asarray(e, dtype=float)
    x = np.asarray(x, dtype=float)
    p1 = derivative_relaxation(p, e, e_tilde)
    in_base = descartes_membership(p, e, x)
    in_relax = descartes_membership(p1, e, x)
    m_base = hyperbolic_eigenvalues(p, e, x).mult if in_base else None
    m_relax = hyperbolic_eigenvalues(p1, e, x).mult if in_relax else None
    if not ((in_base and m_base >= 3) or (in_relax and m_relax >= 2)):
        raise DomainError(
            "point must have multiplicity >= 3 in the base cone or >= 2 "
            "in the relaxation")
    if in_base and m_base >= 3:
        return bool(in_relax and m_relax == m_base - 1)
    return bool(in_base and m_base == m_relax + 1)


def verify_tangent_derivative(p: SparsePoly, e, e_tilde, x,
                              num_dirs: int = 50, seed=0) -> dict:
    """Compare D_etilde(loc_x p) with loc_x(D_etilde p): symbolically up to
    positive scale, by sampled membership agreement, and (when mult >= 3)
    by equality of the lineality spaces of the two localized cones."""
    e = np.asarray(e, dtype=float)
    x = np.asarray(x, dtype=float)
    if not descartes_membership(p, e, x):
        raise DomainError("x is not in the base hyperbolicity cone")
    loc_p, mult = localize(p, x)
    if mult < 1:
        raise DomainError("x is interior; localization is a constant")
    left = directional_derivative(loc_p, np.asarray(e_tilde, dtype=float))
    p1 = directional_derivative(p, np.asarray(e_tilde, dtype=float))
    right, _ = localize(p1, x)

    same, scale = _poly_equal_up_to_scale(left, right)
    report = {
        "mult": mult,
        "symbolic_equal": bool(same and scale > 0),
        "scale": scale,
        "membership_agreement": None,
        "lineality_equal": None,
    }
    if left.degree >= 1 and right.degree >= 1:
        rng = np.random.default_rng(seed)
        agree = 0
        for _ in range(num_dirs):
            y = rng.standard_normal(p.num_vars)
            if descartes_membership(left, e, y) == descartes_membership(right, e, y):
                agree += 1
        report["membership_agreement"] = agree / num_dirs
    if mult >= 3:
        lin_left = lineality_space(left, e)
        lin_right = lineality_space(right, e)
        report["lineality_equal"] = bool(
            grassmann_distance(lin_left, lin_right) <= 1e-6)
    return report


def _poly_equal_up_to_scale(a: SparsePoly, b: SparsePoly):
    """(equal, scale) with b ~ scale * a over shared support."""
    if a.is_zero() or b.is_zero():
        return (a.is_zero() and b.is_zero()), 0.0
    if set(a.terms) != set(b.terms):
        return False, 0.0
    key = max(a.terms, key=lambda t: abs(float(a.terms[t])))
    scale = float(b.terms[key]) / float(a.terms[key])
    tol = 1e-9 * max(1.0, b.max_abs_coef())
    for t, ca in a.terms.items():
        if abs(float(b.terms[t]) - scale * float(ca)) > tol:
            return False, scale
    return True, scale


# ---------------------------------------------------------------------------
# eigenvalue curves


def eigencurve_derivatives(p: SparsePoly, e, x, y, h: float | None = None) -> EigenCurveSample:
    """Central-difference derivatives at s=0 of the zero-eigenvalue
    branches of s -> eigenvalues(x + s y)."""
    e = np.asarray(e, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    base = hyperbolic_eigenvalues(p, e, x)
    mult = base.mult
    if mult == 0:
        return EigenCurveSample(y, 0.0, np.zeros(0))
    lam_scale = 1.0 + float(np.max(np.abs(base.eigenvalues)))
    if h is None:
        # keep the product of the perturbed zero branches above the
        # tail-deflation threshold: h^mult >> 1e-11
        h = max(1e-5, 10.0 * (1e-11) ** (1.0 / mult)) * lam_scale
    plus = hyperbolic_eigenvalues(p, e, x + h * y).eigenvalues
    minus = hyperbolic_eigenvalues(p, e, x - h * y).eigenvalues
    zp = _near_zero_cluster(plus, mult, h, lam_scale)
    zm = _near_zero_cluster(minus, mult, h, lam_scale)
    # branch j behaves like t'_j s: ascending at +h pairs with descending at -h
    der = np.sort((np.sort(zp) - np.sort(zm)[::-1]) / (2 * h))
    return EigenCurveSample(y, h, der)


def _near_zero_cluster(lam: np.ndarray, mult: int, h: float, scale: float):
    order = np.argsort(np.abs(lam))
    cluster = lam[order[:mult]]
    rest = lam[order[mult:]]
    edge = float(np.max(np.abs(cluster)))
    if rest.size and float(np.min(np.abs(rest))) < 10 * max(edge, h):
        raise NumericalFailure(
            "zero-eigenvalue cluster is not separated from the rest of the "
            "spectrum at this step; shrink h")
    return cluster


# ---------------------------------------------------------------------------
# Terracini experiment over derivative relaxations


def deriv_terracini_experiment(p: SparsePoly, e, dirs, k: int,
                               trials: int = 20, seed=0) -> dict:
    """Sample <=k-element collections of extreme-ray candidates of the
    iterated derivative relaxation and test the tangent-space additivity
    property on each collection."""
    from .cones import Hyperbolicity
    from .tangent import is_k_terracini_primal

    e = np.asarray(e, dtype=float)
    if k < 1 or trials < 1:
        raise UsageError("need k >= 1 and trials >= 1")
    base_lin = lineality_space(p, e)
    if base_lin.dim != 0:
        raise DomainError("base cone must be pointed (trivial lineality)")
    q = p
    for d in dirs:
        q = derivative_relaxation(q, e, np.asarray(d, dtype=float))
    cone = Hyperbolicity(q, e, check=False)

    rng = np.random.default_rng(seed)
    pool = _extreme_candidates(p, q, e, rng)
    passes = 0
    failures = []
    for t in range(trials):
        size = int(rng.integers(1, k + 1))
        idx = rng.choice(len(pool), size=min(size, len(pool)), replace=False)
        pts = [pool[i] for i in idx]
        verdict = is_k_terracini_primal(cone, pts, k=len(pts),
                                        check_extreme=False)
        if verdict.holds:
            passes += 1
        else:
            failures.append(verdict.certificate)
    return {
        "relaxation_order": len(list(dirs)),
        "k": k,
        "trials": trials,
        "passes": passes,
        "failures": failures,
    }


def _extreme_candidates(p, q, e, rng, want: int = 12):
    """Extreme-ray candidate generators for the relaxed cone: coordinate
    rays of the base product structure when they lie on the boundary, and
    multiplicity-1 boundary points reached from random interior points."""
    n = p.num_vars
    pool = []
    for i in range(n):
        v = np.zeros(n)
        v[i] = 1.0
        if descartes_membership(q, e, v):
            spec = hyperbolic_eigenvalues(q, e, v)
            if spec.mult >= 1:
                pool.append(v)
    e_scale = float(np.linalg.norm(e)) / np.sqrt(n)
    tries = 0
    while len(pool) < want and tries < 20 * want:
        tries += 1
        z = e + 0.25 * e_scale * rng.standard_normal(n)
        spec = hyperbolic_eigenvalues(q, e, z)
        if spec.mult > 0 or float(spec.eigenvalues[-1]) <= 0:
            continue  # not strictly interior; resample
        try:
            b = boundary_point_along_e(q, e, z)
        except NumericalFailure:
            continue
        if hyperbolic_eigenvalues(q, e, b).mult == 1:
            pool.append(b)
    if not pool:
        raise NumericalFailure("no extreme-ray candidates found")
    return pool


def boundary_point_along_e(q: SparsePoly, e, z, max_steps: int = 100):
    """Slide z along -e to the cone boundary: the eigenvalue shift makes
    z - lambda_min(z) e the exact first boundary hit, refined by bisection
    until |lambda_min| <= 1e-10 x scale."""
    e = np.asarray(e, dtype=float)
    z = np.asarray(z, dtype=float)
    spec = hyperbolic_eigenvalues(q, e, z)
    lam_min = float(spec.eigenvalues[-1])
    scale = 1.0 + float(np.max(np.abs(spec.eigenvalues)))
    lo, hi = 0.0, lam_min + 0.25 * scale
    t = lam_min
    for _ in range(max_steps):
        cand = z - t * e
        lm = float(hyperbolic_eigenvalues(q, e, cand).eigenvalues[-1])
        if abs(lm) <= 1e-10 * scale:
            return cand
        if lm > 0:
            lo = t
        else:
            hi = t
        # bisection with the shift-derived point as the first probe
        t = 0.5 * (lo + hi) if abs(lm) > 1e-6 * scale else t + lm
    raise NumericalFailure("boundary bisection did not converge")
