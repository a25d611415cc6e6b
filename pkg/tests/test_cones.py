"""Cone models: membership, minimal faces, normal cones, extreme rays."""

import json

import numpy as np
import pytest
import scipy.optimize

from conekit import (
    Hyperbolicity,
    LinearImage,
    Polyhedral,
    Psd,
    Veronese,
    cone_from_json_dict,
    normal_cone,
    random_polyhedral_cone,
)
from conekit.cones import (
    PolyhedralFace,
    PsdFace,
    chain_reduce,
    height_bound,
    minimal_face,
)
from conekit.errors import DomainError, UnsupportedOperationError, UsageError
from conekit.linalg import svec
from conekit.neighborly import veronese_phi
from conekit.polynomials import elementary_symmetric, parse_poly, product_poly

ORTHANT3 = Polyhedral(np.eye(3))
# the four edges of a square pyramid over z = 1
SQUARE = Polyhedral(np.array([[1.0, 1.0, 1.0], [1.0, -1.0, 1.0],
                              [-1.0, 1.0, 1.0], [-1.0, -1.0, 1.0]]))


class TestPolyhedral:
    def test_constructor_rejects_bad_generators(self):
        with pytest.raises(UsageError):
            Polyhedral(np.zeros((0, 3)))
        with pytest.raises(UsageError):
            Polyhedral([[1.0, 0.0], [0.0, 0.0]])

    def test_constructor_rejects_lines(self):
        with pytest.raises(DomainError):
            Polyhedral([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])

    def test_membership(self):
        assert ORTHANT3.membership([1.0, 0.0, 2.0])
        assert not ORTHANT3.membership([1.0, -0.5, 0.0])
        assert SQUARE.membership([0.2, -0.3, 1.0])
        assert not SQUARE.membership([1.5, 0.0, 1.0])
        assert SQUARE.membership([1.0, 1.0, 1.0])  # an edge

    def test_minimal_face_orthant(self):
        assert ORTHANT3.minimal_face([1.0, 0.0, 1.0]) == PolyhedralFace((0, 2))
        assert ORTHANT3.minimal_face([0.0, 0.0, 0.0]) == PolyhedralFace(())
        assert ORTHANT3.minimal_face([1.0, 1.0, 1.0]) == PolyhedralFace((0, 1, 2))

    def test_minimal_face_outside_raises(self):
        with pytest.raises(DomainError):
            ORTHANT3.minimal_face([1.0, -1.0, 0.0])

    def test_face_contains_own_point(self):
        for x in ([1.0, 0.0, 1.0], [0.3, 0.2, 0.0], [1.0, 1.0, 1.0]):
            f = ORTHANT3.minimal_face(x)
            assert ORTHANT3.face_contains(f, x)
        # the empty face holds only the origin
        assert ORTHANT3.face_contains(PolyhedralFace(()), [0.0, 0.0, 0.0])
        assert not ORTHANT3.face_contains(PolyhedralFace(()), [1.0, 0.0, 0.0])

    def test_normal_cone_at_a_face(self):
        N = ORTHANT3.normal_cone([1.0, 0.0, 1.0])
        assert N.contains([0.0, -1.0, 0.0])
        assert N.contains([0.0, 0.0, 0.0])
        assert not N.contains([0.0, 1.0, 0.0])
        assert not N.contains([-1.0, 0.0, 0.0])  # must vanish on the face

    def test_extreme_rays(self):
        assert ORTHANT3.is_extreme_ray([2.0, 0.0, 0.0])
        assert not ORTHANT3.is_extreme_ray([1.0, 1.0, 0.0])
        for g in SQUARE.generators:
            assert SQUARE.is_extreme_ray(g)
        assert not SQUARE.is_extreme_ray(SQUARE.generators[0] + SQUARE.generators[1])

    def test_extreme_ray_with_duplicate_generator(self):
        cone = Polyhedral([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
        assert cone.is_extreme_ray([1.0, 0.0])

    def test_extreme_ray_edge_cases(self):
        with pytest.raises(UsageError):
            ORTHANT3.is_extreme_ray([0.0, 0.0, 0.0])
        with pytest.raises(DomainError):
            ORTHANT3.is_extreme_ray([1.0, -1.0, 0.0])


def _scipy_in_cone(G, x):
    """Feasibility of G' lam = x, lam >= 0, solved by an external LP."""
    res = scipy.optimize.linprog(np.zeros(G.shape[0]), A_eq=G.T, b_eq=x,
                                 bounds=(0, None), method="highs")
    return res.status == 0


def test_extremality_matches_external_lp():
    """is_extreme_ray agrees with a scipy-based oracle on random cones."""
    for seed in (3, 4, 5):
        rng = np.random.default_rng(seed)
        cone = random_polyhedral_cone(int(rng.integers(3, 5)),
                                      int(rng.integers(6, 9)), seed=seed)
        G = cone.generators
        for i in range(G.shape[0]):
            others = np.delete(G, i, axis=0)
            assert cone.is_extreme_ray(G[i]) == (not _scipy_in_cone(others, G[i]))


def test_random_polyhedral_cone_frozen():
    cone = random_polyhedral_cone(4, 8, seed=1)
    assert cone.generators.shape == (8, 4)
    np.testing.assert_allclose(cone.generators[:, 0], 1.0)
    extreme = {i for i in range(8) if cone.is_extreme_ray(cone.generators[i])}
    assert extreme == {0, 1, 3, 4, 5, 6, 7}


def test_random_polyhedral_cone_guards():
    with pytest.raises(UsageError):
        random_polyhedral_cone(1, 4, seed=0)
    with pytest.raises(UsageError):
        random_polyhedral_cone(4, 3, seed=0)


class TestPsd:
    def test_membership(self):
        P = Psd(2)
        assert P.membership(svec(np.array([[2.0, 1.0], [1.0, 2.0]])))
        assert not P.membership(svec(np.array([[1.0, 2.0], [2.0, 1.0]])))

    def test_minimal_face_kernel(self):
        P = Psd(3)
        f = P.minimal_face(svec(np.diag([1.0, 1.0, 0.0])))
        assert isinstance(f, PsdFace)
        assert f.rank == 2
        np.testing.assert_allclose(np.abs(f.Z.ravel()), [0.0, 0.0, 1.0],
                                   atol=1e-12)
        assert P.minimal_face(svec(np.eye(3))).rank == 3

    def test_normal_cone(self):
        P = Psd(2)
        N = P.normal_cone(svec(np.diag([1.0, 0.0])))
        e2e2 = np.outer([0.0, 1.0], [0.0, 1.0])
        assert N.contains(svec(-e2e2))
        assert not N.contains(svec(e2e2))
        assert not N.contains(svec(-np.eye(2)))  # touches the range

    def test_extreme_rays(self):
        P = Psd(3)
        v = np.array([1.0, -2.0, 0.5])
        assert P.is_extreme_ray(svec(np.outer(v, v)))
        assert not P.is_extreme_ray(svec(np.diag([1.0, 1.0, 0.0])))
        with pytest.raises(UsageError):
            P.is_extreme_ray(svec(np.zeros((3, 3))))
        with pytest.raises(DomainError):
            P.is_extreme_ray(svec(np.diag([1.0, -1.0, 0.0])))

    def test_face_contains(self):
        P = Psd(2)
        f = P.minimal_face(svec(np.diag([1.0, 0.0])))
        assert P.face_contains(f, svec(np.diag([3.0, 0.0])))
        assert not P.face_contains(f, svec(np.eye(2)))
        assert not P.face_contains(f, svec(np.diag([-1.0, 0.0])))

    def test_matrix_input_is_accepted(self):
        # methods accept the symmetric matrix itself, not just its svec
        P = Psd(2)
        assert P.membership(np.eye(2))
        assert P.minimal_face(np.diag([1.0, 0.0])).rank == 1


class TestLinearImage:
    def test_polyhedral_image(self):
        B = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
        K = LinearImage(ORTHANT3, B)
        assert K.ambient_dim == 2
        assert K.membership([1.0, 0.0])
        assert K.membership([2.0, 3.0])
        assert not K.membership([-1.0, 0.5])

    def test_polyhedral_normal_cone(self):
        B = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
        K = LinearImage(ORTHANT3, B)
        N = K.normal_cone([1.0, 0.0])
        assert N.contains([0.0, -1.0])
        assert not N.contains([1.0, 0.0])
        assert not N.contains([-1.0, 0.0])

    def test_psd_diagonal_image(self):
        # svec(X) -> (X11, X22); the image is the nonnegative quadrant
        B = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        K = LinearImage(Psd(2), B)
        assert K.membership([1.0, 1.0])
        assert K.membership([0.0, 2.0])
        assert not K.membership([-1.0, 1.0])

    def test_psd_preimage_is_feasible(self):
        B = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        K = LinearImage(Psd(2), B)
        X = K.preimage([2.0, 3.0])
        assert X.shape == (2, 2)
        np.testing.assert_allclose(np.diag(X), [2.0, 3.0], atol=1e-6)
        assert np.linalg.eigvalsh(X)[0] >= -1e-8

    def test_preimage_outside_raises(self):
        B = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
        K = LinearImage(ORTHANT3, B)
        with pytest.raises(DomainError):
            K.preimage([-1.0, 0.0])

    def test_constructor_guards(self):
        with pytest.raises(UsageError):
            LinearImage(Veronese(2, 2), np.eye(3))
        with pytest.raises(UsageError):
            LinearImage(ORTHANT3, np.eye(2))


class TestHyperbolicity:
    def test_product_polynomial_gives_orthant(self):
        H = Hyperbolicity(product_poly(3), np.ones(3))
        assert H.membership([1.0, 2.0, 3.0])
        assert H.membership([1.0, 0.0, 1.0])  # boundary, exact coefficients
        assert not H.membership([1.0, -0.5, 2.0])

    def test_elementary_symmetric_cone(self):
        H = Hyperbolicity(elementary_symmetric(3, 2), np.ones(3))
        assert H.membership([1.0, 1.0, 1.0])
        assert not H.membership([1.0, 1.0, -1.0])

    def test_constructor_guards(self):
        with pytest.raises(UsageError):
            Hyperbolicity(parse_poly("x1^2 + x2", 2), np.ones(2))
        with pytest.raises(DomainError):
            Hyperbolicity(product_poly(2), np.array([1.0, -1.0]))
        with pytest.raises(DomainError):
            Hyperbolicity(parse_poly("x1^2 + x2^2", 2), np.array([1.0, 0.0]))

    def test_no_extreme_ray_certificate(self):
        H = Hyperbolicity(product_poly(3), np.ones(3))
        with pytest.raises(UnsupportedOperationError):
            H.is_extreme_ray([1.0, 0.0, 0.0])


class TestVeronese:
    def test_ambient_dim(self):
        assert Veronese(2, 4).ambient_dim == 5
        assert Veronese(3, 2).ambient_dim == 6

    def test_membership_unsupported(self):
        with pytest.raises(UnsupportedOperationError):
            Veronese(2, 4).membership(np.ones(5))

    def test_catalecticant_of_moment_vector(self):
        V = Veronese(2, 4)
        M = V.catalecticant(veronese_phi(2, 4, [1.0, 2.0]))
        assert M.shape == (3, 3)
        # rank-one Gram matrix of (1, 2, 4)
        np.testing.assert_allclose(M, np.outer([1.0, 2.0, 4.0], [1.0, 2.0, 4.0]))

    def test_extreme_rays_are_moment_vectors(self):
        V = Veronese(2, 4)
        assert V.is_extreme_ray(veronese_phi(2, 4, [1.0, 2.0]))
        mixed = veronese_phi(2, 4, [1.0, 2.0]) + veronese_phi(2, 4, [1.0, -1.0])
        assert not V.is_extreme_ray(mixed)
        assert not V.is_extreme_ray(np.zeros(5))

    def test_degree_must_be_even(self):
        with pytest.raises(UsageError):
            Veronese(2, 3)


class TestJsonRoundTrip:
    def test_polyhedral(self):
        d = json.loads(json.dumps(SQUARE.to_json_dict()))
        cone = cone_from_json_dict(d)
        np.testing.assert_allclose(cone.generators, SQUARE.generators)

    def test_psd(self):
        cone = cone_from_json_dict(json.loads(json.dumps(Psd(4).to_json_dict())))
        assert isinstance(cone, Psd) and cone.d == 4

    def test_linear_image(self):
        B = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
        K = LinearImage(ORTHANT3, B)
        back = cone_from_json_dict(json.loads(json.dumps(K.to_json_dict())))
        np.testing.assert_allclose(back.B, B)
        assert isinstance(back.base, Polyhedral)

    def test_hyperbolicity(self):
        H = Hyperbolicity(elementary_symmetric(3, 2), np.ones(3))
        back = cone_from_json_dict(json.loads(json.dumps(H.to_json_dict())))
        assert back.p.terms == H.p.terms
        np.testing.assert_allclose(back.e, H.e)

    def test_veronese(self):
        back = cone_from_json_dict(Veronese(3, 4).to_json_dict())
        assert (back.n, back.two_d) == (3, 4)

    def test_unknown_type(self):
        with pytest.raises(UsageError):
            cone_from_json_dict({"type": "icecream"})


class TestChainReduce:
    def test_orthant_scan(self):
        rep = chain_reduce(ORTHANT3, [np.eye(3)[0], np.eye(3)[0], np.eye(3)[1],
                                      np.array([1.0, 1.0, 0.0]), np.eye(3)[2]])
        assert tuple(rep.indices) == (0, 2, 4)
        assert rep.chain_length == 3
        assert rep.height_bound == height_bound(ORTHANT3) == 4

    def test_psd_accepts_matrices_and_svecs(self):
        P = Psd(3)
        pts = [np.diag([1.0, 0.0, 0.0]), svec(np.diag([2.0, 0.0, 0.0])),
               np.eye(3)]
        rep = chain_reduce(P, pts)
        assert tuple(rep.indices) == (0, 2)
        assert rep.height_bound == 4

    def test_guards(self):
        with pytest.raises(UsageError):
            chain_reduce(ORTHANT3, [])
        with pytest.raises(DomainError):
            chain_reduce(ORTHANT3, [np.array([1.0, -1.0, 0.0])])
        with pytest.raises(UnsupportedOperationError):
            chain_reduce(Veronese(2, 4), [np.ones(5)])


def test_free_function_wrappers():
    x = np.array([1.0, 0.0, 1.0])
    assert minimal_face(ORTHANT3, x) == ORTHANT3.minimal_face(x)
    assert normal_cone(ORTHANT3, x).contains([0.0, -1.0, 0.0])
