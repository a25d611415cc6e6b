"""Interior-point LP/SDP solver and the max-min-slack programs."""

import numpy as np
import pytest

from conekit.errors import UsageError
from conekit.linalg import Subspace, orthonormal_basis, smat, svec
from conekit.solver import (
    LpProblem,
    SdpProblem,
    max_min_slack_orthant,
    max_min_slack_psd,
    relative_interior_point,
    solve_lp,
    solve_sdp,
)

KKT_TOL = 1e-7


def _assert_healthy(rep, obj=None):
    assert rep.status == "optimal"
    assert max(rep.kkt_residuals) <= KKT_TOL
    assert abs(rep.primal_obj - rep.dual_obj) <= 1e-6 * (1 + abs(rep.primal_obj))
    if obj is not None:
        assert abs(rep.primal_obj - obj) <= 1e-6 * (1 + abs(obj))


class TestLp:
    def test_vertex_solution(self):
        # min x1 + 2 x2  s.t.  x1 + x2 = 1, x >= 0  ->  x = e1
        rep = solve_lp(LpProblem([1.0, 2.0], [[1.0, 1.0]], [1.0]))
        _assert_healthy(rep, obj=1.0)
        np.testing.assert_allclose(rep.x, [1.0, 0.0], atol=1e-6)

    def test_free_variables(self):
        # min x1 with x1 free, x1 + x2 = 0, x2 >= 0  ->  x1 unbounded below?
        # no: x1 = -x2 <= 0, minimized by x2 -> inf; bound it with x2 <= 2
        # via a second equation x2 + x3 = 2, x3 >= 0.
        prob = LpProblem([1.0, 0.0, 0.0],
                         [[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]],
                         [0.0, 2.0],
                         lower_bounds=[-np.inf, 0.0, 0.0])
        rep = solve_lp(prob)
        _assert_healthy(rep, obj=-2.0)
        assert abs(rep.x[0] + 2.0) < 1e-6

    def test_infeasible(self):
        rep = solve_lp(LpProblem([1.0], [[1.0]], [-1.0]))
        assert rep.status == "infeasible"

    def test_unbounded(self):
        # min -x1  s.t.  x1 - x2 = 0, x >= 0
        rep = solve_lp(LpProblem([-1.0, 0.0], [[1.0, -1.0]], [0.0]))
        assert rep.status == "unbounded"

    def test_dimension_mismatch(self):
        with pytest.raises(UsageError):
            LpProblem([1.0, 1.0], [[1.0]], [1.0])

    def test_random_battery_kkt(self):
        """Feasible-by-construction random LPs all close the KKT system."""
        rng = np.random.default_rng(10)
        for _ in range(20):
            n, d = int(rng.integers(2, 6)), int(rng.integers(4, 9))
            A = rng.standard_normal((n, d))
            x0 = rng.exponential(1.0, size=d)  # interior feasible point
            rep = solve_lp(LpProblem(rng.standard_normal(d) ** 2 + 0.1,
                                     A, A @ x0))
            _assert_healthy(rep)
            np.testing.assert_allclose(A @ rep.x, A @ x0, atol=1e-6)
            assert np.min(rep.x) >= -1e-8


class TestSdp:
    def test_corner_solution(self):
        # min tr X  s.t.  X11 = 1, X psd  ->  X = e1 e1'
        E11 = np.zeros((2, 2))
        E11[0, 0] = 1.0
        rep = solve_sdp(SdpProblem(np.eye(2), [(E11, 1.0)], d=2))
        _assert_healthy(rep, obj=1.0)
        X = smat(rep.x)
        np.testing.assert_allclose(X, E11, atol=1e-5)

    def test_matrix_and_svec_inputs_agree(self):
        C = np.array([[2.0, 1.0], [1.0, 3.0]])
        A1 = np.eye(2)
        r1 = solve_sdp(SdpProblem(C, [(A1, 1.0)], d=2))
        r2 = solve_sdp(SdpProblem(svec(C), [(svec(A1), 1.0)], d=2))
        _assert_healthy(r1)
        assert abs(r1.primal_obj - r2.primal_obj) < 1e-9

    def test_infeasible(self):
        rep = solve_sdp(SdpProblem(np.eye(2), [(np.eye(2), -1.0)], d=2))
        assert rep.status == "infeasible"

    def test_random_battery_kkt(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            d = int(rng.integers(2, 5))
            m = int(rng.integers(1, 4))
            G = rng.standard_normal((d, d))
            X0 = G @ G.T + 0.1 * np.eye(d)  # interior feasible
            mats = []
            for _ in range(m):
                M = rng.standard_normal((d, d))
                mats.append(0.5 * (M + M.T))
            prob = SdpProblem(np.eye(d),
                              [(M, float(np.sum(M * X0))) for M in mats],
                              d=d)
            rep = solve_sdp(prob)
            _assert_healthy(rep)
            X = smat(rep.x)
            assert np.linalg.eigvalsh(X)[0] >= -1e-7


class TestRelativeInteriorPoint:
    def test_orthant_feasible(self):
        W = Subspace.full(2)
        p = relative_interior_point(W, ("orthant", 2, (0, 1)))
        assert p is not None
        assert np.all(p[:2] < 0)  # strictly inside the negative face cone

    def test_orthant_slice_misses(self):
        # W = span{e1} but the normal cone lives on coordinate 2
        W = orthonormal_basis([np.array([1.0, 0.0])])
        assert relative_interior_point(W, ("orthant", 2, (1,))) is None

    def test_orthant_empty_support_is_origin(self):
        W = Subspace.full(3)
        p = relative_interior_point(W, ("orthant", 3, ()))
        np.testing.assert_allclose(p, np.zeros(3))

    def test_orthant_off_support_vanishes(self):
        W = orthonormal_basis([np.array([0.0, 1.0, 0.0]),
                               np.array([0.0, 0.0, 1.0])])
        p = relative_interior_point(W, ("orthant", 3, (1, 2)))
        assert p is not None
        assert abs(p[0]) < 1e-9 and p[1] < 0 and p[2] < 0

    def test_psd_feasible(self):
        d = 2
        W = Subspace.full(3)  # svec(S^2)
        Z = np.array([[0.0], [1.0]])  # kernel direction e2
        p = relative_interior_point(W, ("psd", d, Z))
        assert p is not None
        P = smat(p)
        # -P = c * e2 e2' with c > 0
        assert P[1, 1] < -1e-7
        assert abs(P[0, 0]) < 1e-8 and abs(P[0, 1]) < 1e-8

    def test_psd_slice_misses(self):
        # W orthogonal to the e2 e2' direction cannot meet ri(-N)
        W = orthonormal_basis([svec(np.diag([1.0, 0.0]))])
        Z = np.array([[0.0], [1.0]])
        assert relative_interior_point(W, ("psd", 2, Z)) is None

    def test_psd_zero_kernel_is_origin(self):
        W = Subspace.full(3)
        p = relative_interior_point(W, ("psd", 2, np.zeros((2, 0))))
        np.testing.assert_allclose(p, np.zeros(3))

    def test_unknown_face_kind(self):
        with pytest.raises(UsageError):
            relative_interior_point(Subspace.full(2), ("simplex", 2, ()))


def test_max_min_slack_orthant_value():
    # W = span{(1,1)}: slack can be scaled up until the t <= 1 cap binds
    W = orthonormal_basis([np.array([1.0, 1.0])])
    t, w = max_min_slack_orthant(W, (0, 1))
    assert abs(t - 1.0) < 1e-5
    assert np.min(w) >= t - 1e-6
    assert abs(w[0] - w[1]) < 1e-6  # w stays on the line


def test_max_min_slack_psd_eigenvalue():
    # W = span{svec(I_2)}: Y = w restricted to the kernel, best lambda_min
    W = orthonormal_basis([svec(np.eye(2))])
    t, w, Y = max_min_slack_psd(W, np.eye(2), 2)
    assert t > 1e-6
    assert np.linalg.eigvalsh(Y)[0] >= t - 1e-6
