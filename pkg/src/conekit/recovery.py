"""Exact-recovery experiments over nonnegative and semidefinite programs.

Two planted-solution programs are studied: minimize 1'x subject to
Ax = A x*, x >= 0, and minimize tr X subject to A(X) = A(X*), X psd.
A trial succeeds when the solver returns the planted point and a
perturbed-objective re-solve confirms the optimum is unique.  The dual
side of the story is the unique-preimage criterion for the augmented
map B = [A; 1'] (resp. (A, tr)): some functional in the row space of B
must lie in the relative interior of the normal cone at the planted
point, and B must be injective on the span of its minimal face.  The
two study drivers sample random Gaussian ensembles and report how often
the two sides agree.
"""

from __future__ import annotations

import csv
import io
import itertools
import math

import numpy as np
from joblib import Parallel, delayed

from .cones import LinearImage, Polyhedral, Psd
from .errors import DomainError, NumericalFailure, UsageError
from .linalg import (
    DEFAULT_TOL,
    SymVec,
    orthonormal_basis,
    smat,
    svec,
    svec_dim,
    svec_side,
)
from .solver import LpProblem, SdpProblem, relative_interior_point, solve_lp, solve_sdp
from .tangent import is_k_terracini_dual

# recovered means the solution landed within this relative distance of
# the planted point; the uniqueness probe tilts the objective by
# PROBE_EPS and calls the optimum unique when the solution moved by
# less than PROBE_RTOL (relative).  The gap between the two scales (and
# the solver's ~1e-8 accuracy) is what makes the verdicts robust.
RECOVERY_RTOL = 1e-6
PROBE_EPS = 1e-6
PROBE_RTOL = 1e-4

# exhaustive face enumeration is capped; past the cap a study samples.
FACE_CAP = 2000
DEFAULT_FACE_SAMPLES = 50

_SEED_BOUND = 2**62


class RecoveryTrial:
    """One planted-recovery run and its verdicts.

    ``recovered`` is the distance test against the planted point;
    ``unique_optimum`` is the perturbed-objective probe.  The map has
    the exact recovery property at the planted point only when both
    hold, which :attr:`exact_recovery` packages.  ``valid`` goes False
    when a solver failure prevented a verdict (``failure`` says why).
    ``unique_preimage`` and ``terracini_face_check`` are filled in by
    the study drivers when they run the dual-side checks.
    """

    __slots__ = ("kind", "map", "planted", "k", "report", "solution",
                 "recovered", "unique_optimum", "unique_preimage",
                 "terracini_face_check", "valid", "failure")

    def __init__(self, kind, map_, planted, k, report, solution,
                 recovered, unique_optimum, valid, failure=None):
        self.kind = kind
        self.map = map_
        self.planted = planted
        self.k = int(k)
        self.report = report
        self.solution = solution
        self.recovered = bool(recovered)
        self.unique_optimum = bool(unique_optimum)
        self.valid = bool(valid)
        self.failure = failure
        self.unique_preimage = None
        self.terracini_face_check = None

    @property
    def exact_recovery(self) -> bool:
        return self.valid and self.recovered and self.unique_optimum

    def to_json_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "k": self.k,
            "status": None if self.report is None else self.report.status,
            "valid": self.valid,
            "recovered": self.recovered,
            "unique_optimum": self.unique_optimum,
            "exact_recovery": self.exact_recovery,
        }
        if self.unique_preimage is not None:
            out["unique_preimage"] = bool(self.unique_preimage)
        if self.terracini_face_check is not None:
            out["terracini_face_check"] = self.terracini_face_check.to_json_dict()
        if self.failure is not None:
            out["failure"] = str(self.failure)
        return out

    def __repr__(self):  # pragma: no cover
        tag = "ok" if self.valid else "invalid"
        return (f"RecoveryTrial({self.kind}, k={self.k}, "
                f"recovered={self.recovered}, {tag})")


def gaussian_map_psd(d: int, n: int, seed) -> list[SymVec]:
    """n random symmetric measurement matrices with N(0, 1/n) entries.

    Each matrix is drawn entrywise and symmetrized as (A + A')/2, so
    diagonal entries keep variance 1/n while off-diagonal ones end up
    with 1/(2n).  Deterministic per seed.
    """
    if n < 1:
        raise UsageError("need at least one measurement matrix")
    if d < 1:
        raise UsageError("matrix side must be positive")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        raw = rng.normal(0.0, 1.0 / np.sqrt(n), size=(d, d))
        out.append(SymVec.from_matrix(0.5 * (raw + raw.T)))
    return out


def _sym_rows(mats, d: int | None = None) -> np.ndarray:
    """Stack measurement matrices (SymVec / matrix / svec) into svec rows."""
    rows = []
    for a in mats:
        if isinstance(a, SymVec):
            rows.append(a.coords)
            continue
        arr = np.asarray(a, dtype=np.float64)
        if arr.ndim == 2:
            rows.append(svec(0.5 * (arr + arr.T)))
        elif arr.ndim == 1:
            rows.append(arr)
        else:
            raise UsageError("measurement matrices must be SymVec, square, or svec")
    if not rows:
        if d is None:
            raise UsageError("empty measurement list with unknown side")
        return np.zeros((0, svec_dim(d)))
    out = np.vstack(rows)
    if d is not None and out.shape[1] != svec_dim(d):
        raise UsageError(f"measurement rows have length {out.shape[1]}, "
                         f"expected {svec_dim(d)}")
    return out


def _planted_matrix(X) -> np.ndarray:
    if isinstance(X, SymVec):
        return X.to_matrix()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        return smat(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise UsageError("planted matrix must be square symmetric")
    if np.linalg.norm(X - X.T) > 1e-10 * max(1.0, np.linalg.norm(X)):
        raise UsageError("planted matrix is not symmetric")
    return 0.5 * (X + X.T)


def exact_recovery_trial_lp(A, x_star, *, seed=0, tol: float = DEFAULT_TOL) -> RecoveryTrial:
    """Solve min 1'x s.t. Ax = A x*, x >= 0 and compare with the plant.

    The uniqueness probe re-solves with the objective tilted to
    1 + PROBE_EPS * g for a seeded Gaussian g; a unique vertex optimum
    is unmoved by a small tilt, a flat optimal face is not.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    x_star = np.asarray(x_star, dtype=np.float64).ravel()
    n, d = A.shape
    if x_star.shape[0] != d:
        raise UsageError(f"planted point has length {x_star.shape[0]}, map has {d} columns")
    scale = float(np.linalg.norm(x_star))
    if float(np.min(x_star, initial=0.0)) < -1e-12 * max(1.0, scale):
        raise UsageError("planted point must be nonnegative")
    x_star = np.maximum(x_star, 0.0)
    k = int(np.count_nonzero(x_star > 1e-12 * max(1.0, scale)))
    b = A @ x_star

    rep = solve_lp(LpProblem(np.ones(d), A, b), tol)
    if rep.status != "optimal":
        return RecoveryTrial("lp", A, x_star, k, rep, None, False, False,
                             valid=False, failure=f"recovery LP ended with {rep.status}")
    sol = rep.x
    thr = RECOVERY_RTOL * (scale if scale > 0 else 1.0)
    recovered = float(np.linalg.norm(sol - x_star)) <= thr

    g = np.random.default_rng(seed).standard_normal(d)
    rep2 = solve_lp(LpProblem(1.0 + PROBE_EPS * g, A, b), tol)
    if rep2.status != "optimal":
        return RecoveryTrial("lp", A, x_star, k, rep, sol, recovered, False,
                             valid=False, failure=f"probe LP ended with {rep2.status}")
    moved = float(np.linalg.norm(rep2.x - sol))
    unique = moved <= PROBE_RTOL * (1.0 + float(np.linalg.norm(sol)))
    return RecoveryTrial("lp", A, x_star, k, rep, sol, recovered, unique, valid=True)


def exact_recovery_trial_sdp(A_list, X_star, *, seed=0, tol: float = DEFAULT_TOL) -> RecoveryTrial:
    """Solve min tr X s.t. tr(A_i X) = tr(A_i X*), X psd, and compare."""
    X = _planted_matrix(X_star)
    d = X.shape[0]
    rows = _sym_rows(A_list, d)
    evals = np.linalg.eigvalsh(X)
    lam_max = float(max(evals[-1], 0.0)) if evals.size else 0.0
    if float(evals[0]) < -1e-8 * max(1.0, lam_max):
        raise UsageError("planted matrix must be positive semidefinite")
    k = int(np.sum(evals > Psd.KERNEL_REL * max(lam_max, 1e-30)))
    x_vec = svec(X)
    b = rows @ x_vec
    scale = float(np.linalg.norm(x_vec))

    prob = SdpProblem(np.eye(d), list(zip(rows, b)), d=d)
    rep = solve_sdp(prob, tol)
    if rep.status != "optimal":
        return RecoveryTrial("sdp", A_list, X, k, rep, None, False, False,
                             valid=False, failure=f"recovery SDP ended with {rep.status}")
    sol = rep.x
    thr = RECOVERY_RTOL * (scale if scale > 0 else 1.0)
    recovered = float(np.linalg.norm(sol - x_vec)) <= thr

    raw = np.random.default_rng(seed).standard_normal((d, d))
    tilt = np.eye(d) + PROBE_EPS * 0.5 * (raw + raw.T)
    rep2 = solve_sdp(SdpProblem(tilt, list(zip(rows, b)), d=d), tol)
    if rep2.status != "optimal":
        return RecoveryTrial("sdp", A_list, X, k, rep, smat(sol), recovered, False,
                             valid=False, failure=f"probe SDP ended with {rep2.status}")
    moved = float(np.linalg.norm(rep2.x - sol))
    unique = moved <= PROBE_RTOL * (1.0 + float(np.linalg.norm(sol)))
    return RecoveryTrial("sdp", A_list, X, k, rep, smat(sol), recovered, unique, valid=True)


def unique_preimage_check(B, planted, tol: float = DEFAULT_TOL) -> bool:
    """Whether the planted point is the only preimage of its image.

    ``B`` is a matrix acting on the nonnegative orthant, or a sequence
    of symmetric matrices acting on the psd cone by X -> (tr(B_i X))_i.
    The criterion is dual: some functional in the row space of the map
    must lie in the relative interior of the normal cone at the planted
    point.  That certificate is orthogonal to the span of the minimal
    face, so injectivity of the map on that span is checked separately
    -- without it a map that collapses the face itself would slip
    through.
    """
    if isinstance(B, np.ndarray) and B.ndim == 2 and not isinstance(planted, SymVec) \
            and np.asarray(planted).ndim == 1:
        return _unique_preimage_orthant(B, np.asarray(planted, dtype=np.float64), tol)
    return _unique_preimage_psd(B, planted, tol)


def _unique_preimage_orthant(B: np.ndarray, x: np.ndarray, tol: float) -> bool:
    d = B.shape[1]
    if x.shape[0] != d:
        raise UsageError(f"planted point has length {x.shape[0]}, map has {d} columns")
    scale = float(np.max(np.abs(x), initial=0.0))
    if float(np.min(x, initial=0.0)) < -tol * (1.0 + scale):
        raise UsageError("planted point must lie in the nonnegative orthant")
    supp = np.where(x > tol * (1.0 + scale))[0]
    if supp.size and np.linalg.matrix_rank(B[:, supp]) < supp.size:
        return False
    W = orthonormal_basis(B, ambient_dim=d)
    comp = tuple(j for j in range(d) if j not in set(supp.tolist()))
    return relative_interior_point(W, ("orthant", d, comp)) is not None


def _unique_preimage_psd(B, planted, tol: float) -> bool:
    X = _planted_matrix(planted)
    d = X.shape[0]
    rows = _sym_rows(B, d)
    evals, evecs = np.linalg.eigh(X)
    lam_max = float(max(evals[-1], 0.0)) if evals.size else 0.0
    if float(evals[0]) < -tol * (1.0 + lam_max):
        raise UsageError("planted matrix must be positive semidefinite")
    pos = evals > Psd.KERNEL_REL * max(lam_max, 1e-30)
    U = evecs[:, pos]
    Z = evecs[:, ~pos]
    r = U.shape[1]
    if r:
        face = []
        for i in range(r):
            for j in range(i, r):
                E = 0.5 * (np.outer(U[:, i], U[:, j]) + np.outer(U[:, j], U[:, i]))
                face.append(svec(E))
        R = rows @ np.column_stack(face)
        if np.linalg.matrix_rank(R) < len(face):
            return False
    W = orthonormal_basis(rows, ambient_dim=svec_dim(d))
    return relative_interior_point(W, ("psd", d, Z)) is not None


def null_interior_check(A, tol: float = DEFAULT_TOL) -> bool:
    """Does the null space of the map meet the interior of the cone?

    Orthant variant (2-d array A): feasibility of Av = 0, v >= 1,
    solved as an LP in w = v - 1 >= 0.  Psd variant (sequence of
    symmetric matrices): feasibility of A(V) = 0, V >= I, as an SDP in
    S = V - I.  Scaling makes "interior" equivalent to ">= identity".
    """
    if isinstance(A, np.ndarray) and A.ndim == 2:
        n, d = A.shape
        if n == 0:
            return True
        rep = solve_lp(LpProblem(np.ones(d), A, -A @ np.ones(d)), tol)
        if rep.status == "optimal":
            return True
        if rep.status == "infeasible":
            return False
        raise NumericalFailure(f"null-interior LP ended with {rep.status}")
    rows = _sym_rows(A)
    if rows.shape[0] == 0:
        return True
    d = svec_side(rows.shape[1])
    b = -rows @ svec(np.eye(d))
    rep = solve_sdp(SdpProblem(np.eye(d), list(zip(rows, b)), d=d), tol)
    if rep.status == "optimal":
        return True
    if rep.status == "infeasible":
        return False
    raise NumericalFailure(f"null-interior SDP ended with {rep.status}")


# ---------------------------------------------------------------------------
# study drivers


def _subset_iter(d: int, k: int):
    for size in range(1, k + 1):
        yield from itertools.combinations(range(d), size)


def _face_subsets(d: int, k: int, rng, face_samples):
    """Supports of size <= k to check, exhaustive when affordable."""
    total = sum(math.comb(d, s) for s in range(1, k + 1))
    if face_samples is None and total <= FACE_CAP:
        return list(_subset_iter(d, k)), True
    num = face_samples if face_samples is not None else DEFAULT_FACE_SAMPLES
    seen = set()
    subsets = []
    attempts = 0
    while len(subsets) < min(num, total) and attempts < 50 * num:
        attempts += 1
        size = int(rng.integers(1, k + 1))
        sub = tuple(sorted(rng.choice(d, size=size, replace=False).tolist()))
        if sub not in seen:
            seen.add(sub)
            subsets.append(sub)
    return subsets, False


def _dt_map_record(index, map_seed, d, n, k, plants, face_samples, tol):
    rng = np.random.default_rng(map_seed)
    A = rng.standard_normal((n, d))
    B = np.vstack([A, np.ones(d)])
    surjective = int(np.linalg.matrix_rank(B)) == n + 1
    null_interior = null_interior_check(A, tol)
    rec = {"map": index, "surjective": surjective, "null_interior": null_interior,
           "gated_in": bool(surjective and null_interior)}
    if not rec["gated_in"]:
        return rec

    plant_records = []
    for _ in range(plants):
        supp = np.sort(rng.choice(d, size=k, replace=False))
        x = np.zeros(d)
        x[supp] = rng.exponential(1.0, size=k)
        trial = exact_recovery_trial_lp(A, x, seed=int(rng.integers(_SEED_BOUND)), tol=tol)
        entry = {"support": supp.tolist(), "valid": trial.valid,
                 "recovered": trial.recovered, "unique_optimum": trial.unique_optimum,
                 "exact_recovery": trial.exact_recovery}
        if trial.valid:
            up = unique_preimage_check(B, x, tol)
            trial.unique_preimage = up
            entry["unique_preimage"] = up
            entry["agree"] = trial.exact_recovery == up
        plant_records.append(entry)

    image = LinearImage(Polyhedral(np.eye(d)), B)
    subsets, exhaustive = _face_subsets(d, k, rng, face_samples)
    face_records = []
    for sub in subsets:
        try:
            verdict = is_k_terracini_dual(image, list(sub), tol)
            ok = verdict.passed
        except DomainError:
            # a generator collapsed to a non-extreme image ray; the
            # face-level property fails there by definition
            ok = False
        face_records.append({"support": list(sub), "passed": ok})

    valid = [e for e in plant_records if e["valid"]]
    agreed = [e for e in valid if e["agree"]]
    faces_ok = sum(1 for f in face_records if f["passed"])
    rec.update({
        "plants": plant_records,
        "num_valid_plants": len(valid),
        "exact_recovery_rate": (sum(e["exact_recovery"] for e in valid) / len(valid)) if valid else None,
        "plant_agreements": len(agreed),
        "faces": face_records,
        "faces_exhaustive": exhaustive,
        "faces_passed": faces_ok,
        "faces_total": len(face_records),
        "map_recovery_all": bool(valid) and all(e["exact_recovery"] for e in valid),
        "map_faces_all": faces_ok == len(face_records),
    })
    rec["map_agree"] = rec["map_recovery_all"] == rec["map_faces_all"]
    return rec


def dt_equivalence_study(d, n, k, trials, seed=0, *, plants=20,
                         face_samples=None, jobs=1, tol: float = DEFAULT_TOL) -> dict:
    """Exact recovery vs. unique preimage over random Gaussian LP maps.

    Per map (gated on surjectivity of B = [A; 1'] and on null(A)
    meeting the open orthant): Monte-Carlo recovery of k-sparse plants,
    the per-plant unique-preimage verdict, and dual face checks on
    codimension <= k orthant faces of the image description.  The
    summary counts plant-level (exact recovery vs unique preimage) and
    map-level (all plants vs all faces) agreement.
    """
    if k < 1 or k >= d:
        raise UsageError("sparsity must satisfy 1 <= k < d")
    if trials < 1 or plants < 1:
        raise UsageError("need at least one map and one plant")
    root = np.random.default_rng(seed)
    map_seeds = [int(s) for s in root.integers(_SEED_BOUND, size=trials)]
    worker = delayed(_dt_map_record)
    records = Parallel(n_jobs=jobs, prefer="threads")(
        worker(i, map_seeds[i], d, n, k, plants, face_samples, tol)
        for i in range(trials))

    gated = [r for r in records if r["gated_in"]]
    plant_entries = [e for r in gated for e in r["plants"] if e["valid"]]
    both = sum(1 for e in plant_entries if e["exact_recovery"] and e["unique_preimage"])
    er_only = sum(1 for e in plant_entries if e["exact_recovery"] and not e["unique_preimage"])
    up_only = sum(1 for e in plant_entries if not e["exact_recovery"] and e["unique_preimage"])
    neither = len(plant_entries) - both - er_only - up_only
    summary = {
        "num_maps": trials,
        "num_gated_in": len(gated),
        "num_excluded": trials - len(gated),
        "num_valid_plants": len(plant_entries),
        "agreement_matrix": [[both, er_only], [up_only, neither]],
        "plant_agreement_rate": ((both + neither) / len(plant_entries)) if plant_entries else None,
        "map_agreement_rate": (sum(r["map_agree"] for r in gated) / len(gated)) if gated else None,
        "exact_recovery_rate": ((both + er_only) / len(plant_entries)) if plant_entries else None,
    }
    return {
        "kind": "dt-equivalence",
        "config": {"d": d, "n": n, "k": k, "trials": trials, "plants": plants,
                   "seed": seed},
        "maps": records,
        "summary": summary,
    }


def _most_tc_map_record(index, map_seed, d, n, k, plants, tol):
    rng = np.random.default_rng(map_seed)
    mats = gaussian_map_psd(d, n, int(rng.integers(_SEED_BOUND)))
    rows = np.vstack([m.coords for m in mats])
    B = np.vstack([rows, svec(np.eye(d))])
    rank_B = int(np.linalg.matrix_rank(B))
    # surjective B is what the dual face checker needs; when B is instead
    # injective the image cone is an isomorphic copy of the psd cone and
    # every face check passes without computation
    surjective = rank_B == n + 1
    injective = rank_B == svec_dim(d)
    null_interior = null_interior_check(mats, tol)
    rec = {"map": index, "surjective": surjective, "injective": injective,
           "null_interior": null_interior}
    face_mode = "dual" if surjective else ("isomorphic" if injective else None)
    rec["face_mode"] = face_mode

    image = LinearImage(Psd(d), B) if surjective else None
    full_mats = [m.to_matrix() for m in mats] + [np.eye(d)]
    plant_records = []
    for rank in range(1, k + 1):
        for _ in range(plants):
            G = rng.standard_normal((d, rank))
            X = G @ G.T
            trial = exact_recovery_trial_sdp(mats, X, seed=int(rng.integers(_SEED_BOUND)), tol=tol)
            entry = {"rank": rank, "valid": trial.valid,
                     "recovered": trial.recovered,
                     "unique_optimum": trial.unique_optimum,
                     "exact_recovery": trial.exact_recovery}
            if trial.valid:
                up = unique_preimage_check(full_mats, X, tol)
                trial.unique_preimage = up
                entry["unique_preimage"] = up
                entry["agree"] = trial.exact_recovery == up
                if face_mode == "dual":
                    try:
                        verdict = is_k_terracini_dual(image, [G[:, j] for j in range(rank)], tol)
                        trial.terracini_face_check = verdict
                        entry["face_check"] = verdict.passed
                    except DomainError:
                        entry["face_check"] = False
                elif face_mode == "isomorphic":
                    entry["face_check"] = True
                if face_mode is not None:
                    entry["joint"] = entry["exact_recovery"] and entry["face_check"]
            plant_records.append(entry)
    rec["plants"] = plant_records
    return rec


def most_tc_study(d, n, k, trials, seed=0, *, plants=20, jobs=1,
                  perturbations=2, tol: float = DEFAULT_TOL) -> dict:
    """Joint SDP-recovery and dual-face statistics over Gaussian maps.

    Per map: exact-recovery rate for planted ranks 1..k, the
    unique-preimage verdict, and the dual Terracini check at the face
    spanned by each plant's rank-one factors.  Rates are reported as
    observed -- no constants are asserted.  The open-set robustness
    question is probed by re-checking faces for a few perturbed copies
    A + rho * noise of the first gated map; that block is labelled
    evidence, not verification.
    """
    if k < 1 or k > d:
        raise UsageError("rank bound must satisfy 1 <= k <= d")
    if trials < 1 or plants < 1:
        raise UsageError("need at least one map and one plant")
    sd = svec_dim(d)
    needed = sd - svec_dim(d - k)
    root = np.random.default_rng(seed)
    map_seeds = [int(s) for s in root.integers(_SEED_BOUND, size=trials)]
    worker = delayed(_most_tc_map_record)
    records = Parallel(n_jobs=jobs, prefer="threads")(
        worker(i, map_seeds[i], d, n, k, plants, tol) for i in range(trials))

    entries = [e for r in records for e in r["plants"] if e["valid"]]
    faced = [e for e in entries if "face_check" in e]
    by_rank = {}
    for rank in range(1, k + 1):
        sub = [e for e in entries if e["rank"] == rank]
        fsub = [e for e in faced if e["rank"] == rank]
        if not sub:
            continue
        by_rank[str(rank)] = {
            "trials": len(sub),
            "exact_recovery_rate": sum(e["exact_recovery"] for e in sub) / len(sub),
            "face_check_rate": (sum(e["face_check"] for e in fsub) / len(fsub)) if fsub else None,
            "joint_rate": (sum(e["joint"] for e in fsub) / len(fsub)) if fsub else None,
        }
    agreements = [e for e in entries if "agree" in e]
    hyp_maps = [r for r in records if r["null_interior"]]
    hyp_agree = [e for r in hyp_maps for e in r["plants"] if e["valid"] and "agree" in e]
    summary = {
        "num_maps": trials,
        "num_null_interior": len(hyp_maps),
        "dimension_hypothesis_ok": bool(n > needed),
        "dimension_threshold": int(needed),
        "num_valid_trials": len(entries),
        "by_rank": by_rank,
        "joint_rate": (sum(e["joint"] for e in faced) / len(faced)) if faced else None,
        "er_up_agreement_rate": (sum(e["agree"] for e in agreements) / len(agreements)) if agreements else None,
        "er_up_agreement_rate_gated": (sum(e["agree"] for e in hyp_agree) / len(hyp_agree)) if hyp_agree else None,
    }

    evidence = None
    checkable = [r for r in records if r["face_mode"] == "dual"]
    if perturbations and checkable:
        evidence = _perturbed_face_evidence(d, n, k, map_seeds[checkable[0]["map"]],
                                            perturbations, tol)
    return {
        "kind": "most-tc",
        "config": {"d": d, "n": n, "k": k, "trials": trials, "plants": plants,
                   "seed": seed},
        "maps": records,
        "summary": summary,
        "perturbed_map_evidence": evidence,
    }


def _perturbed_face_evidence(d, n, k, map_seed, copies, tol, rho=1e-3):
    """Face checks for a few perturbed copies of one map -- evidence only.

    Whether a whole neighbourhood of maps stays Terracini convex is not
    decidable by sampling; this block merely reports that nearby maps
    behaved the same way.
    """
    rng = np.random.default_rng(map_seed)
    mats = gaussian_map_psd(d, n, int(rng.integers(_SEED_BOUND)))
    rows = np.vstack([m.coords for m in mats])
    checked = 0
    passed = 0
    for _ in range(copies):
        noise = np.vstack([svec(0.5 * (h + h.T)) for h in
                           rng.standard_normal((n, d, d)) * rho])
        Bp = np.vstack([rows + noise, svec(np.eye(d))])
        if np.linalg.matrix_rank(Bp) != n + 1:
            continue
        image = LinearImage(Psd(d), Bp)
        for _ in range(3):
            G = rng.standard_normal((d, k))
            checked += 1
            try:
                if is_k_terracini_dual(image, [G[:, j] for j in range(k)], tol).passed:
                    passed += 1
            except DomainError:
                pass
    return {"rho": rho, "copies": copies, "faces_checked": checked,
            "faces_passed": passed, "evidence_only": True,
            "note": "sampled perturbations; the open-set property is not "
                    "decidable by finitely many checks"}


# ---------------------------------------------------------------------------
# config-driven entry points


def run_experiment(config: dict) -> dict:
    """Run one study from a config dict.

    Expected keys: kind ("lp" or "sdp"), d, n, k, trials, seed; optional
    plants and jobs.  LP configs run the Donoho-Tanner-style equivalence
    study, SDP configs the joint recovery/face study.
    """
    if not isinstance(config, dict):
        raise UsageError("experiment config must be a dict")
    required = {"kind", "d", "n", "k", "trials", "seed"}
    missing = required - set(config)
    if missing:
        raise UsageError(f"config is missing keys: {sorted(missing)}")
    extra = set(config) - required - {"plants", "jobs", "face_samples"}
    if extra:
        raise UsageError(f"config has unknown keys: {sorted(extra)}")
    kind = config["kind"]
    args = dict(d=int(config["d"]), n=int(config["n"]), k=int(config["k"]),
                trials=int(config["trials"]), seed=int(config["seed"]),
                plants=int(config.get("plants", 20)),
                jobs=int(config.get("jobs", 1)))
    if kind == "lp":
        return dt_equivalence_study(face_samples=config.get("face_samples"), **args)
    if kind == "sdp":
        return most_tc_study(**args)
    raise UsageError(f"unknown experiment kind {kind!r}")


def summary_csv(report: dict) -> str:
    """Flatten a study report into a per-map CSV summary."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.get("kind") == "dt-equivalence":
        writer.writerow(["map", "gated_in", "exact_recovery_rate",
                         "faces_passed", "faces_total", "map_agree"])
        for r in report["maps"]:
            if r["gated_in"]:
                writer.writerow([r["map"], 1, r["exact_recovery_rate"],
                                 r["faces_passed"], r["faces_total"], int(r["map_agree"])])
            else:
                writer.writerow([r["map"], 0, "", "", "", ""])
    elif report.get("kind") == "most-tc":
        writer.writerow(["map", "face_mode", "rank", "exact_recovery_rate",
                         "face_check_rate", "joint_rate"])
        for r in report["maps"]:
            mode = r["face_mode"] or "none"
            ranks = sorted({e["rank"] for e in r["plants"]})
            for rank in ranks:
                sub = [e for e in r["plants"] if e["rank"] == rank and e["valid"]]
                fsub = [e for e in sub if "face_check" in e]
                if not sub:
                    writer.writerow([r["map"], mode, rank, "", "", ""])
                    continue
                writer.writerow([
                    r["map"], mode, rank,
                    sum(e["exact_recovery"] for e in sub) / len(sub),
                    (sum(e["face_check"] for e in fsub) / len(fsub)) if fsub else "",
                    (sum(e["joint"] for e in fsub) / len(fsub)) if fsub else "",
                ])
    else:
        raise UsageError("report kind is not a known study")
    return buf.getvalue()
