"""Command-line interface: exit codes, payload shapes, manifests."""

import io
import json
import os
import subprocess
import sys

import pytest

from conekit.cli import main

SRC = os.path.join(os.path.dirname(__file__), os.pardir, "src")


def run(argv, stdin_text=None, capsys=None):
    """Drive main() in-process; returns (exit_code, parsed_or_raw_stdout)."""
    old = sys.stdin
    if stdin_text is not None:
        sys.stdin = io.StringIO(stdin_text)
    try:
        code = main(argv)
    finally:
        sys.stdin = old
    out = capsys.readouterr().out
    try:
        return code, json.loads(out)
    except json.JSONDecodeError:
        return code, out


class TestTerracini:
    def test_random_rays_pass(self, capsys):
        code, pay = run(["terracini", "--cone", "psd:3", "--random", "2",
                         "--seed", "1"], capsys=capsys)
        assert code == 0 and pay["passed"]

    def test_square_cone_negative_finding(self, capsys):
        rays = json.dumps([[0.57735026919, 0.57735026919, 0.57735026919],
                           [-0.57735026919, -0.57735026919, 0.57735026919]])
        code, pay = run(["terracini", "--cone", "square-cone",
                         "--rays", rays], capsys=capsys)
        assert code == 2
        assert not pay["passed"] and pay["dim_lhs"] != pay["dim_rhs"]

    def test_explicit_orthant_rays(self, capsys):
        code, pay = run(["terracini", "--cone", "orthant:4", "--rays",
                         "[[1,0,0,0],[0,1,0,0],[0,0,1,0]]"], capsys=capsys)
        assert code == 0 and pay["passed"]

    def test_psd_rays_as_matrices(self, capsys):
        rays = json.dumps([[[1, 0], [0, 0]], [[0, 0], [0, 1]]])
        code, pay = run(["terracini", "--cone", "psd:2", "--rays", rays],
                        capsys=capsys)
        assert code == 0 and pay["passed"]

    def test_upgrade_scan(self, capsys):
        code, pay = run(["terracini", "--cone", "psd:2", "--upgrade", "2",
                         "--samples", "5", "--seed", "3"], capsys=capsys)
        assert code == 0 and pay["all_pass"]
        assert set(pay["per_k"]) == {"1", "2"}

    def test_cone_on_stdin(self, capsys):
        cone = json.dumps({"type": "polyhedral",
                           "generators": [[1, 0], [0, 1]]})
        code, pay = run(["terracini", "--cone", "-", "--rays",
                         "[[1,0],[0,1]]"], stdin_text=cone, capsys=capsys)
        assert code == 0 and pay["passed"]

    def test_dual_method_on_linear_image_file(self, tmp_path, capsys):
        cpath = tmp_path / "cone.json"
        cpath.write_text(json.dumps(
            {"type": "linear_image",
             "base": {"type": "polyhedral",
                      "generators": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
             "map": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}))
        code, pay = run(["terracini", "--cone", str(cpath), "--rays",
                         "[[1,0,0],[0,1,0]]", "--method", "dual"],
                        capsys=capsys)
        assert code == 0 and pay["passed"]

    def test_esym_builtin(self, capsys):
        code, _ = run(["terracini", "--cone", "esym:4:2", "--rays",
                       "[[1,0,0,0],[0,1,0,0]]", "--skip-extremality-check"],
                      capsys=capsys)
        assert code in (0, 2)


class TestErrorChannel:
    def test_unknown_cone(self, capsys):
        code, pay = run(["terracini", "--cone", "nosuch:3", "--random", "1",
                         "--seed", "0"], capsys=capsys)
        assert code == 1 and pay["error"]["kind"] == "usage-error"

    def test_malformed_json(self, capsys):
        code, pay = run(["terracini", "--cone", "psd:3", "--rays", "[[1,0"],
                        capsys=capsys)
        assert code == 1 and pay["error"]["kind"] == "usage-error"

    def test_stochastic_mode_requires_seed(self, capsys):
        code, pay = run(["terracini", "--cone", "psd:3", "--random", "2"],
                        capsys=capsys)
        assert code == 1 and "seed" in pay["error"]["detail"]

    def test_rays_or_random_required(self, capsys):
        code, _ = run(["terracini", "--cone", "psd:3"], capsys=capsys)
        assert code == 1

    def test_vector_length_mismatch(self, capsys):
        code, pay = run(["hyperbolic", "eig", "--poly", "x1 x2",
                         "--e", "1,1,1", "--x", "1,1"], capsys=capsys)
        assert code == 1 and "entries" in pay["error"]["detail"]


class TestHyperbolic:
    def test_eig(self, capsys):
        code, pay = run(["hyperbolic", "eig", "--poly", "x1 x2 x3",
                         "--e", "1,1,1", "--x", "3,1,2"], capsys=capsys)
        assert code == 0
        assert pay["eigenvalues"] == pytest.approx([3.0, 2.0, 1.0])

    def test_lorentz_eig(self, capsys):
        code, pay = run(["hyperbolic", "eig", "--poly", "x1^2 - x2^2 - x3^2",
                         "--e", "1,0,0", "--x", "1,0.6,0"], capsys=capsys)
        assert code == 0
        assert pay["eigenvalues"] == pytest.approx([1.6, 0.4])

    def test_localize(self, capsys):
        code, pay = run(["hyperbolic", "localize", "--poly", "x1 x2 x3",
                         "--x", "1,0,0"], capsys=capsys)
        assert code == 0 and pay["mult"] == 2

    def test_derivative(self, capsys):
        code, pay = run(["hyperbolic", "derivative", "--poly", "x1 x2 x3",
                         "--e", "1,1,1"], capsys=capsys)
        assert code == 0 and len(pay["poly"]["terms"]) == 3

    def test_lineality(self, capsys):
        code, pay = run(["hyperbolic", "lineality", "--poly", "x1 x2 x3",
                         "--e", "1,1,1"], capsys=capsys)
        assert code == 0 and pay["dim"] == 0

    def test_mult3(self, capsys):
        code, pay = run(["hyperbolic", "mult3", "--poly", "x1 x2 x3 x4",
                         "--e", "1,1,1,1", "--x", "0,0,0,1"], capsys=capsys)
        assert code == 0 and pay["passed"]

    def test_missing_vector_flag(self, capsys):
        code, _ = run(["hyperbolic", "eig", "--poly", "x1 x2", "--e", "1,1"],
                      capsys=capsys)
        assert code == 1


class TestVeronese:
    def test_double_vanish_builtin_dataset(self, capsys):
        code, pay = run(["veronese", "double-vanish", "--points",
                         "blekherman-s", "--n", "4", "--deg", "4"],
                        capsys=capsys)
        assert code == 0 and pay["dim"] == 10

    def test_certificate(self, capsys):
        code, pay = run(["veronese", "certificate", "--points",
                         "[[1,0],[0,1]]", "--d", "2"], capsys=capsys)
        assert code == 0 and pay["two_d"] == 4
        assert len(pay["coefficients"]) == 5

    def test_growth(self, capsys):
        code, pay = run(["veronese", "growth", "--points", "[[1,0],[0,1]]",
                         "--d", "2", "--num-samples", "50", "--seed", "5"],
                        capsys=capsys)
        assert code == 0 and pay["num_samples"] > 0 and pay["mu"] > 0

    def test_growth_requires_seed(self, capsys):
        code, _ = run(["veronese", "growth", "--points", "[[1,0],[0,1]]",
                       "--d", "2"], capsys=capsys)
        assert code == 1


class TestNeighborly:
    def test_orthant(self, capsys):
        code, pay = run(["neighborly", "--cone", "orthant:5", "--k", "2"],
                        capsys=capsys)
        assert code == 0 and pay["passed"]

    def test_square_cone_negative(self, capsys):
        code, pay = run(["neighborly", "--cone", "square-cone", "--k", "2"],
                        capsys=capsys)
        assert code == 2 and not pay["passed"]
        assert pay["failing_subset"] is not None

    def test_rejects_non_polyhedral(self, capsys):
        code, _ = run(["neighborly", "--cone", "psd:3", "--k", "1"],
                      capsys=capsys)
        assert code == 1


class TestRecover:
    def test_lp_summary(self, capsys):
        code, pay = run(["recover", "lp", "--d", "12", "--n", "8", "--k", "1",
                         "--trials", "5", "--seed", "9"], capsys=capsys)
        assert code == 0 and pay["kind"] == "recover-lp"
        assert pay["num_valid"] == 5 and pay["exact_recovery_rate"] == 1.0

    def test_lp_records(self, capsys):
        code, pay = run(["recover", "lp", "--d", "12", "--n", "8", "--k", "1",
                         "--trials", "3", "--seed", "9", "--records"],
                        capsys=capsys)
        assert code == 0 and len(pay["trials"]) == 3

    def test_sdp_summary(self, capsys):
        code, pay = run(["recover", "sdp", "--d", "3", "--n", "10", "--k", "1",
                         "--trials", "3", "--seed", "2"], capsys=capsys)
        assert code == 0 and pay["kind"] == "recover-sdp"
        assert pay["num_valid"] == 3

    def test_seed_is_mandatory(self, capsys):
        code, _ = run(["recover", "lp", "--d", "12", "--n", "8", "--k", "1",
                       "--trials", "5"], capsys=capsys)
        assert code == 1

    def test_dt_study_deterministic(self, capsys):
        argv = ["recover", "dt-study", "--d", "6", "--n", "3", "--k", "1",
                "--trials", "2", "--plants", "3", "--seed", "7"]
        code, pay = run(argv, capsys=capsys)
        assert code == 0 and pay["kind"] == "dt-equivalence"
        code2, pay2 = run(argv, capsys=capsys)
        assert pay == pay2

    def test_dt_study_csv(self, capsys):
        code, out = run(["recover", "dt-study", "--d", "6", "--n", "3",
                         "--k", "1", "--trials", "2", "--plants", "3",
                         "--seed", "7", "--format", "csv"], capsys=capsys)
        assert code == 0 and out.splitlines()[0].startswith("map")

    def test_most_tc_study(self, capsys):
        code, pay = run(["recover", "most-tc-study", "--d", "3", "--n", "6",
                         "--k", "1", "--trials", "2", "--plants", "2",
                         "--seed", "4", "--perturbations", "0"],
                        capsys=capsys)
        assert code == 0 and pay["kind"] == "most-tc"

    def test_csv_only_for_studies(self, capsys):
        code, _ = run(["recover", "lp", "--d", "6", "--n", "4", "--k", "1",
                       "--trials", "2", "--seed", "1", "--format", "csv"],
                      capsys=capsys)
        assert code == 1


class TestOutputsAndManifest:
    def test_out_file_plus_manifest(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, _ = run(["recover", "lp", "--d", "10", "--n", "6", "--k", "1",
                       "--trials", "3", "--seed", "11",
                       "--out", str(out_path)], capsys=capsys)
        assert code == 0
        stdout_text = out_path.read_text()
        assert json.loads(stdout_text)["kind"] == "recover-lp"
        man = json.loads((tmp_path / "report.json.manifest.json").read_text())
        assert man["command"] == "recover lp"
        assert man["seed"] == 11
        assert man["version"] == "0.1.0"
        assert man["config"]["d"] == 10 and man["config"]["trials"] == 3
        assert man["outputs"] == [os.path.realpath(str(out_path))]
        assert isinstance(man["wall_time_s"], float)


@pytest.mark.parametrize("argv", [["--version"]])
def test_version_flag(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == "conekit 0.1.0"


class TestSubprocessEntry:
    def _env(self):
        env = dict(os.environ)
        env["PYTHONPATH"] = SRC + os.pathsep + env.get("PYTHONPATH", "")
        return env

    def test_repeated_runs_byte_identical(self):
        argv = [sys.executable, "-m", "conekit.cli", "recover", "lp",
                "--d", "10", "--n", "6", "--k", "1", "--trials", "3",
                "--seed", "5"]
        r1 = subprocess.run(argv, capture_output=True, text=True,
                            env=self._env())
        r2 = subprocess.run(argv, capture_output=True, text=True,
                            env=self._env())
        assert r1.returncode == 0
        assert r1.stdout and r1.stdout == r2.stdout

    def test_eig_through_module_entry(self):
        r = subprocess.run([sys.executable, "-m", "conekit.cli",
                            "hyperbolic", "eig", "--poly", "x1 x2 x3",
                            "--e", "1,1,1", "--x", "3,1,2"],
                           capture_output=True, text=True, env=self._env())
        assert r.returncode == 0
        assert json.loads(r.stdout)["eigenvalues"] == pytest.approx([3, 2, 1])
