"""Exact-recovery trials and the equivalence studies built on them."""

import json

import numpy as np
import pytest

from conekit.errors import UsageError
from conekit.linalg import SymVec
from conekit.recovery import (
    dt_equivalence_study,
    exact_recovery_trial_lp,
    exact_recovery_trial_sdp,
    gaussian_map_psd,
    most_tc_study,
    null_interior_check,
    run_experiment,
    summary_csv,
    unique_preimage_check,
)


class TestGaussianMapPsd:
    def test_shape_and_determinism(self):
        m1 = gaussian_map_psd(4, 3, seed=7)
        m2 = gaussian_map_psd(4, 3, seed=7)
        assert len(m1) == 3 and all(isinstance(s, SymVec) for s in m1)
        assert all(np.array_equal(a.coords, b.coords) for a, b in zip(m1, m2))

    def test_diagonal_variance(self):
        # entries are scaled so that <A_i, X> has unit-variance rows: the
        # diagonal of each A_i keeps variance 1/n
        n = 5
        diags = []
        for s in range(200):
            for M in gaussian_map_psd(6, n, seed=1000 + s):
                diags.extend(np.diag(M.to_matrix()))
        v = np.var(diags)
        assert abs(v - 1.0 / n) < 0.05 / n


class TestLpTrial:
    def test_identity_map_always_recovers(self):
        t = exact_recovery_trial_lp(np.eye(4), np.array([1.0, 0, 2, 0]))
        assert t.valid and t.recovered and t.unique_optimum and t.exact_recovery
        assert t.k == 2

    def test_flat_optimal_face(self):
        t = exact_recovery_trial_lp(np.array([[1.0, 1, 1]]),
                                    np.array([1.0, 0, 0]))
        assert t.valid and not t.recovered and not t.exact_recovery

    def test_gaussian_sparse_recovery(self):
        rng = np.random.default_rng(3)
        hits = 0
        for s in range(40):
            A = rng.standard_normal((15, 30))
            x = np.zeros(30)
            x[rng.integers(30)] = rng.exponential() + 0.1
            if exact_recovery_trial_lp(A, x, seed=s).exact_recovery:
                hits += 1
        assert hits >= 36

    def test_negative_plant_rejected(self):
        with pytest.raises(UsageError):
            exact_recovery_trial_lp(np.eye(3), np.array([1.0, -0.5, 0]))

    def test_rate_non_increasing_in_sparsity(self):
        A = np.random.default_rng(123).standard_normal((12, 24))
        rates = []
        for k in (1, 3, 5, 7):
            rng = np.random.default_rng(500 + k)
            hit = 0
            for _ in range(15):
                x = np.zeros(24)
                x[rng.choice(24, k, replace=False)] = rng.exponential(1.0, k)
                if exact_recovery_trial_lp(A, x, seed=k).exact_recovery:
                    hit += 1
            rates.append(hit / 15)
        assert all(rates[i] >= rates[i + 1] - 1e-9 for i in range(len(rates) - 1))


def _sym_basis(d):
    out = []
    for i in range(d):
        for j in range(i, d):
            E = np.zeros((d, d))
            E[i, j] = E[j, i] = 1.0
            out.append(E)
    return out


class TestSdpTrial:
    def test_full_basis_always_recovers(self):
        G = np.random.default_rng(0).standard_normal((3, 1))
        t = exact_recovery_trial_sdp(_sym_basis(3), G @ G.T)
        assert t.valid and t.recovered and t.exact_recovery
        assert t.k == 1

    def test_gaussian_rank_one_recovery(self):
        rng = np.random.default_rng(11)
        hits = 0
        for s in range(10):
            mats = gaussian_map_psd(4, 12, seed=200 + s)
            G = rng.standard_normal((4, 1))
            if exact_recovery_trial_sdp(mats, G @ G.T, seed=s).exact_recovery:
                hits += 1
        assert hits >= 9

    def test_single_constraint_fails(self):
        mats = gaussian_map_psd(4, 1, seed=5)
        G = np.random.default_rng(6).standard_normal((4, 1))
        t = exact_recovery_trial_sdp(mats, G @ G.T, seed=1)
        assert t.valid and not t.exact_recovery


class TestUniquePreimage:
    def test_injective_map(self):
        assert unique_preimage_check(np.eye(5), np.array([1.0, 0, 0, 2, 0]))

    def test_null_direction_through_the_face(self):
        B = np.array([[2.0, 1, 0], [0, 1, 2]])  # null space spans (1,-2,1)
        assert not unique_preimage_check(B, np.array([0.0, 1, 0]))
        assert unique_preimage_check(B, np.array([1.0, 0, 0]))

    def test_degenerate_maps(self):
        assert not unique_preimage_check(np.array([[0.0, 1.0]]),
                                         np.array([1.0, 0.0]))
        assert not unique_preimage_check(np.zeros((2, 3)),
                                         np.array([1.0, 0, 0]))

    def test_psd_variants(self):
        tr = np.eye(2)
        e11 = np.zeros((2, 2))
        e11[0, 0] = 1.0
        assert unique_preimage_check([tr, e11], np.diag([1.0, 0.0]))
        assert not unique_preimage_check([tr], np.diag([1.0, 0.0]))
        assert unique_preimage_check(_sym_basis(3), np.diag([1.0, 0.0, 0.0]))


class TestNullInterior:
    def test_hand_cases(self):
        assert null_interior_check(np.zeros((2, 4)))
        assert not null_interior_check(np.eye(4))

    def test_wide_gaussian_maps_pass(self):
        good = 0
        for s in range(20):
            A = np.random.default_rng(400 + s).standard_normal((2, 12))
            if null_interior_check(A):
                good += 1
        assert good >= 18

    def test_psd_cases(self):
        assert null_interior_check([np.zeros((3, 3))])
        assert not null_interior_check(_sym_basis(3))
        assert null_interior_check(gaussian_map_psd(4, 2, seed=9))


class TestDtEquivalenceStudy:
    def test_agreement_rates(self):
        rep = dt_equivalence_study(10, 6, 1, trials=4, seed=42, plants=5)
        s = rep["summary"]
        assert s["num_gated_in"] >= 1
        assert s["num_gated_in"] + s["num_excluded"] == 4
        assert s["plant_agreement_rate"] == 1.0
        assert s["map_agreement_rate"] == 1.0

    def test_deterministic_and_parallel_identical(self):
        rep1 = dt_equivalence_study(10, 6, 1, trials=4, seed=42, plants=5)
        rep2 = dt_equivalence_study(10, 6, 1, trials=4, seed=42, plants=5)
        rep3 = dt_equivalence_study(10, 6, 1, trials=4, seed=42, plants=5,
                                    jobs=2)
        assert json.dumps(rep1, sort_keys=True) == json.dumps(rep2, sort_keys=True)
        assert json.dumps(rep1, sort_keys=True) == json.dumps(rep3, sort_keys=True)

    def test_both_sides_fail_together_when_overloaded(self):
        rep = dt_equivalence_study(5, 2, 4, trials=2, seed=0, plants=3)
        gated = [r for r in rep["maps"] if r["gated_in"]]
        assert all(not r["map_recovery_all"] and not r["map_faces_all"]
                   for r in gated)


class TestMostTcStudy:
    def test_injective_regime(self):
        rep = most_tc_study(4, 12, 1, trials=2, seed=7, plants=3)
        s = rep["summary"]
        assert s["dimension_hypothesis_ok"]
        assert s["er_up_agreement_rate"] == 1.0
        assert s["joint_rate"] == 1.0
        assert all(r["face_mode"] == "isomorphic" for r in rep["maps"])

    def test_surjective_regime_uses_dual_checker(self):
        rep = most_tc_study(4, 7, 2, trials=2, seed=19, plants=3)
        assert all(r["face_mode"] == "dual" for r in rep["maps"])
        assert rep["perturbed_map_evidence"]["evidence_only"]
        assert rep["summary"]["er_up_agreement_rate_gated"] in (None, 1.0)

    def test_dimension_deficit_kills_recovery_not_agreement(self):
        rep = most_tc_study(3, 2, 2, trials=2, seed=3, plants=3,
                            perturbations=0)
        s = rep["summary"]
        assert s["joint_rate"] == 0.0
        assert s["er_up_agreement_rate"] == 1.0


class TestRunExperiment:
    def test_lp_config_routes_to_dt_study(self):
        rep = run_experiment({"kind": "lp", "d": 8, "n": 5, "k": 1,
                              "trials": 2, "seed": 1, "plants": 3})
        assert rep["kind"] == "dt-equivalence"
        assert summary_csv(rep).splitlines()[0].startswith("map,")

    def test_config_validation(self):
        with pytest.raises(UsageError):
            run_experiment({"kind": "lp", "d": 8})
        with pytest.raises(UsageError):
            run_experiment({"kind": "qp", "d": 2, "n": 1, "k": 1,
                            "trials": 1, "seed": 0})
