"""Convex tangent spaces and the Terracini checkers (primal and dual)."""

import numpy as np
import pytest

from conekit.cones import (
    Hyperbolicity,
    LinearImage,
    Polyhedral,
    PolyhedralFace,
    Psd,
    PsdFace,
    Veronese,
    random_polyhedral_cone,
)
from conekit.errors import DomainError, UsageError
from conekit.linalg import grassmann_distance, orthonormal_basis, svec
from conekit.polynomials import (
    determinant_polynomial,
    product_poly,
    sym_matrix_to_ut,
    ut_to_sym_matrix,
)
from conekit.tangent import (
    convex_tangent_space,
    is_k_terracini_dual,
    is_k_terracini_primal,
    span_of_normal_preimage,
    terracini_upgrade_check,
)

ORTHANT3 = Polyhedral(np.eye(3))
SQUARE = Polyhedral(np.array([[1.0, 1.0, 1.0], [1.0, -1.0, 1.0],
                              [-1.0, 1.0, 1.0], [-1.0, -1.0, 1.0]]))


class TestConvexTangentSpace:
    def test_psd_rank_one(self):
        L = convex_tangent_space(Psd(2), np.diag([1.0, 0.0]))
        assert L.dim == 2
        assert not L.contains(svec(np.outer([0.0, 1.0], [0.0, 1.0])))

    def test_orthant_face(self):
        L = convex_tangent_space(ORTHANT3, np.array([1.0, 0.0, 1.0]))
        assert L.dim == 2
        assert L.contains(np.array([1.0, 0.0, 0.0]))
        assert L.contains(np.array([0.0, 0.0, 1.0]))
        assert not L.contains(np.array([0.0, 1.0, 0.0]))

    def test_psd_rank_two(self):
        # tangent at diag(1,1,0) keeps the 2x2 block and its mixed row
        assert convex_tangent_space(Psd(3), np.diag([1.0, 1.0, 0.0])).dim == 5

    def test_interior_points_give_everything(self):
        assert convex_tangent_space(Psd(3), np.eye(3)).dim == 6
        assert convex_tangent_space(ORTHANT3, np.array([1.0, 2.0, 3.0])).dim == 3

    def test_origin_gives_zero_space(self):
        assert convex_tangent_space(ORTHANT3, np.zeros(3)).dim == 0

    def test_hyperbolicity_cone_boundary(self):
        hyp = Hyperbolicity(product_poly(3), np.ones(3), check=False)
        L = convex_tangent_space(hyp, np.array([1.0, 1.0, 0.0]))
        assert L.dim == 2
        assert not L.contains(np.array([0.0, 0.0, 1.0]))

    def test_orthant_complement_matches_normal_span(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            x = np.abs(rng.standard_normal(3)) * (rng.random(3) > 0.3)
            L = convex_tangent_space(ORTHANT3, x)
            assert L.complement().dim == 3 - int(np.sum(x > 0))


def test_psd_tangent_agrees_with_determinant_localization():
    """The kernel-block description of the psd tangent space must match the
    hyperbolicity-cone construction applied to det, rank by rank."""
    rng = np.random.default_rng(0)
    for d in (2, 3, 4):
        psd = Psd(d)
        hyp = Hyperbolicity(determinant_polynomial(d),
                            np.asarray(sym_matrix_to_ut(np.eye(d)), float),
                            check=False)
        for r in range(1, d + 1):
            W = rng.standard_normal((d, r))
            X = W @ W.T
            Lk = convex_tangent_space(psd, X)
            Lh = convex_tangent_space(hyp, np.asarray(sym_matrix_to_ut(X), float))
            cols = [svec(np.asarray(ut_to_sym_matrix(Lh.basis[:, j], d), float))
                    for j in range(Lh.dim)]
            Lh_svec = orthonormal_basis(cols, ambient_dim=Lk.ambient_dim)
            assert grassmann_distance(Lk, Lh_svec) <= 1e-7


class TestPrimalChecker:
    def test_psd_rank_one_pair(self):
        v = is_k_terracini_primal(Psd(2), [np.outer([1.0, 0.0], [1.0, 0.0]),
                                           np.outer([0.0, 1.0], [0.0, 1.0])])
        assert v.passed and v.dim_lhs == 3 and v.dim_rhs == 3

    def test_square_cone_fails_with_certificate(self):
        v = is_k_terracini_primal(SQUARE, [np.array([1.0, 1.0, 1.0]),
                                           np.array([-1.0, -1.0, 1.0])])
        assert not v.passed
        assert (v.dim_lhs, v.dim_rhs) == (3, 2)
        assert v.certificate is not None
        assert abs(np.linalg.norm(v.certificate) - 1.0) < 1e-9

    def test_single_ray_always_passes(self):
        assert is_k_terracini_primal(SQUARE, [np.array([1.0, 1.0, 1.0])]).passed

    def test_rejects_non_extreme_ray(self):
        with pytest.raises(UsageError):
            is_k_terracini_primal(ORTHANT3, [np.array([1.0, 1.0, 0.0])])

    def test_psd_random_collections_pass(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            d = int(rng.integers(2, 5))
            rays = []
            for _ in range(int(rng.integers(1, 4))):
                v = rng.standard_normal(d)
                v /= np.linalg.norm(v)
                rays.append(svec(np.outer(v, v)))
            assert is_k_terracini_primal(Psd(d), rays).passed


class TestNormalPreimageSpan:
    def test_trace_map_full_face(self):
        B = svec(np.eye(2))[None, :]
        assert span_of_normal_preimage(B, PsdFace(2, np.zeros((2, 0)))).dim == 1

    def test_zero_face_kills_surjective_map(self):
        B = svec(np.eye(2))[None, :]
        assert span_of_normal_preimage(B, PsdFace(2, np.eye(2))).dim == 0

    def test_orthant_sign_constraints_collapse(self):
        # B' lam = (l1, -l1, l2) must be >= 0 on {0, 1}: forces l1 = 0,
        # and = 0 on {2}: forces l2 = 0
        B = np.array([[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]])
        assert span_of_normal_preimage(B, PolyhedralFace((0, 1))).dim == 0

    def test_orthant_interior_multiplier(self):
        B = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
        assert span_of_normal_preimage(B, PolyhedralFace((0, 1, 2))).dim == 2
        assert span_of_normal_preimage(B, PolyhedralFace((0,))).dim == 0

    def test_diagonal_embedding(self):
        B = np.vstack([svec(np.diag([1.0, 0.0])), svec(np.diag([0.0, 1.0]))])
        assert span_of_normal_preimage(B, PsdFace(2, np.zeros((2, 0)))).dim == 2


def test_primal_and_dual_checkers_agree_on_orthant_images():
    rng = np.random.default_rng(0)
    agree = 0
    for _ in range(50):
        N = int(rng.integers(3, 7))
        n = int(rng.integers(2, min(N, 4) + 1))
        B = rng.standard_normal((n, N))
        try:
            img = LinearImage(Polyhedral(np.eye(N)), B)
            image_poly = Polyhedral(B.T, check_pointed=True)
        except DomainError:
            continue  # image cone is not pointed
        # only sample base generators whose images stay extreme downstairs
        cand = [j for j in range(N) if image_poly.is_extreme_ray(B[:, j])]
        if len(cand) < 2:
            continue
        k = int(rng.integers(1, min(3, len(cand)) + 1))
        idx = list(rng.choice(cand, size=k, replace=False))
        vp = is_k_terracini_primal(img, [B[:, j] for j in idx],
                                   check_extreme=False)
        vd = is_k_terracini_dual(img, idx)
        assert vp.passed == vd.passed
        agree += 1
    assert agree >= 25  # most draws give a pointed image with 2+ extreme rays


def test_dual_checker_identity_psd_image():
    img = LinearImage(Psd(3), np.eye(6))
    v = is_k_terracini_dual(img, [np.array([1.0, 0.0, 0.0]),
                                  np.array([0.0, 1.0, 0.0])])
    assert v.passed


def test_dual_checker_binary_moments_exact():
    v = is_k_terracini_dual(Veronese(2, 4), [np.array([1.0, 0.0]),
                                             np.array([0.0, 1.0])])
    assert v.mode == "dual"


class TestUpgradeCheck:
    def test_psd_passes_all_orders(self):
        rep = terracini_upgrade_check(Psd(3), k_max=3, samples=15, seed=5)
        assert rep["all_pass"]
        assert rep["chain"]["within_bound"]

    def test_square_cone_fails_only_at_two(self):
        rep = terracini_upgrade_check(SQUARE, k_max=2, samples=40, seed=6)
        assert not rep["all_pass"]
        assert rep["per_k"][1]["passes"] == 40
        assert rep["per_k"][2]["passes"] < 40

    def test_orthant_passes(self):
        rep = terracini_upgrade_check(Polyhedral(np.eye(4)), k_max=4,
                                      samples=15, seed=7)
        assert rep["all_pass"]

    def test_verdict_serialization(self):
        v = is_k_terracini_primal(SQUARE, [np.array([1.0, 1.0, 1.0]),
                                           np.array([-1.0, -1.0, 1.0])])
        d = v.to_json_dict()
        assert d["passed"] is False
        assert d["dim_lhs"] == 3 and d["dim_rhs"] == 2
        assert d["mode"] == "primal"


def test_random_cones_primal_consistency():
    """On random polyhedral cones the verdict dims always satisfy
    dim(sum) <= dim(tangent at the sum of rays)."""
    rng = np.random.default_rng(21)
    for seed in range(6):
        cone = random_polyhedral_cone(4, 7, seed=seed)
        ext = [g for g in cone.generators if cone.is_extreme_ray(g)]
        if len(ext) < 2:
            continue
        pick = rng.choice(len(ext), size=2, replace=False)
        v = is_k_terracini_primal(cone, [ext[pick[0]], ext[pick[1]]])
        assert v.dim_rhs <= v.dim_lhs
        if v.passed:
            assert v.dim_lhs == v.dim_rhs
