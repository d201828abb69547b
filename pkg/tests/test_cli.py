"""Command-line contract: exit codes, report shape, determinism, suites."""

import json
import subprocess
import sys

import pytest

from hrsym import ANCHOR_REGISTRY, build_algebra
from hrsym.scenarios import ScenarioError, load_scenario, run_scenario, scenario_from_dict


def run_cli(*args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "hrsym", *args],
        capture_output=True,
        text=True,
        **kwargs,
    )


@pytest.fixture
def algebra_scenario(tmp_path):
    path = tmp_path / "algebra.json"
    path.write_text(json.dumps({"kind": "algebra", "payload": {"name": "hr3"}}))
    return path


@pytest.fixture
def mutated_scenario(tmp_path):
    # flip one structure constant: [K1, P1] = -M instead of +M
    desc = build_algebra("hr3").to_descriptor()
    for entry in desc["brackets"]:
        if entry["a"] == "K1" and entry["b"] == "P1":
            entry["terms"][0]["num"] = -1
    desc["name"] = "hr3_flipped"
    path = tmp_path / "mutated.json"
    path.write_text(json.dumps({"kind": "algebra", "payload": {"descriptor": desc}}))
    return path


class TestExitCodes:
    def test_passing_scenario_exits_zero(self, algebra_scenario):
        proc = run_cli("verify", "algebra", str(algebra_scenario))
        assert proc.returncode == 0
        report = json.loads(proc.stdout)
        assert report["status"] == "pass"

    def test_flipped_constant_exits_one_and_names_check(self, mutated_scenario):
        proc = run_cli("verify", "algebra", str(mutated_scenario))
        assert proc.returncode == 1
        assert "jacobi:hr3_flipped" in proc.stderr
        report = json.loads(proc.stdout)
        assert report["status"] == "fail"
        failing = [c for c in report["checks"] if c["status"] == "fail"]
        assert failing and failing[0]["name"] == "jacobi:hr3_flipped"

    def test_malformed_json_exits_two_without_partial_report(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{this is not json")
        proc = run_cli("verify", "algebra", str(bad))
        assert proc.returncode == 2
        assert proc.stdout == ""

    def test_missing_file_exits_two(self, tmp_path):
        proc = run_cli("verify", "algebra", str(tmp_path / "absent.json"))
        assert proc.returncode == 2

    def test_unknown_suite_exits_two(self):
        proc = run_cli("suite", "everything")
        assert proc.returncode == 2

    def test_unknown_kind_exits_two(self, algebra_scenario):
        proc = run_cli("verify", "algebras", str(algebra_scenario))
        assert proc.returncode == 2

    def test_kind_mismatch_exits_two(self, algebra_scenario):
        proc = run_cli("verify", "composite", str(algebra_scenario))
        assert proc.returncode == 2

    def test_bad_tolerance_syntax_exits_two(self, algebra_scenario):
        proc = run_cli("verify", "algebra", str(algebra_scenario), "--tol", "nonsense")
        assert proc.returncode == 2
        proc = run_cli("verify", "algebra", str(algebra_scenario), "--tol", "not_a_tol=1")
        assert proc.returncode == 2

    def test_bad_payload_value_exits_two(self, tmp_path):
        path = tmp_path / "bad_payload.json"
        path.write_text(
            json.dumps(
                {
                    "kind": "algebra",
                    "payload": {"name": "hr3",
                                "subalgebras": [{"generators": ["K1", "Z9"]}]},
                }
            )
        )
        proc = run_cli("verify", "algebra", str(path))
        assert proc.returncode == 2
        assert "Z9" in proc.stderr

    def test_negative_mass_payload_exits_two(self, tmp_path):
        path = tmp_path / "neg.json"
        path.write_text(
            json.dumps(
                {"kind": "single_rep", "payload": {"mass": -1.0, "dims": 1, "levels": 4}}
            )
        )
        proc = run_cli("verify", "rep", str(path))
        assert proc.returncode == 2


class TestReports:
    def test_out_file_written(self, algebra_scenario, tmp_path):
        out = tmp_path / "report.json"
        proc = run_cli("verify", "algebra", str(algebra_scenario), "--out", str(out))
        assert proc.returncode == 0
        report = json.loads(out.read_text())
        assert report["tool"] == "hrsym"
        assert report["checks"][0]["anchor"] in ANCHOR_REGISTRY

    def test_determinism_modulo_wall_time(self, algebra_scenario):
        out1 = run_cli("verify", "algebra", str(algebra_scenario)).stdout
        out2 = run_cli("verify", "algebra", str(algebra_scenario)).stdout
        r1, r2 = json.loads(out1), json.loads(out2)
        r1.pop("wall_time_s")
        r2.pop("wall_time_s")
        assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)

    def test_every_check_carries_registered_anchor(self, tmp_path):
        scenario = scenario_from_dict(
            {
                "kind": "composite",
                "payload": {
                    "particleA": {"mass": 1.0, "dims": 1, "levels": 6},
                    "particleB": {"mass": 2.0, "dims": 1, "levels": 6},
                    "margin": 1,
                },
            }
        )
        report = run_scenario(scenario)
        for check in report.to_json()["checks"]:
            assert check["anchor"] in ANCHOR_REGISTRY

    def test_naive_position_flagged_non_physical(self, tmp_path):
        path = tmp_path / "composite.json"
        path.write_text(
            json.dumps(
                {
                    "kind": "composite",
                    "payload": {
                        "particleA": {"mass": 1.0, "dims": 1, "levels": 8},
                        "particleB": {"mass": 2.0, "dims": 1, "levels": 8},
                        "margin": 1,
                    },
                }
            )
        )
        proc = run_cli("verify", "composite", str(path))
        assert proc.returncode == 0
        report = json.loads(proc.stdout)
        naive = [c for c in report["checks"] if c["name"] == "ccr:x_naive:p"][0]
        assert naive["metrics"]["non_physical"] is True
        assert naive["metrics"]["coefficient"] == pytest.approx(2.0, abs=1e-12)
        com = [c for c in report["checks"] if c["name"] == "ccr:x_com:p"][0]
        assert com["metrics"]["coefficient"] == pytest.approx(1.0, abs=1e-12)


class TestToleranceOverrides:
    def test_cli_override_can_force_failure(self, tmp_path):
        path = tmp_path / "rep.json"
        path.write_text(
            json.dumps(
                {
                    "kind": "single_rep",
                    "payload": {"mass": 1.0, "dims": 1, "levels": 8, "algebra": "h3",
                                "margin": 0},
                }
            )
        )
        # margin 0 leaves the boundary defect in view; the default tolerance
        # fails it, a loose override accepts it
        strict = run_cli("verify", "rep", str(path))
        assert strict.returncode == 1
        loose = run_cli("verify", "rep", str(path), "--tol", "homomorphism=100")
        assert loose.returncode == 0

    def test_scenario_tolerances_apply(self, tmp_path):
        path = tmp_path / "rep.json"
        path.write_text(
            json.dumps(
                {
                    "kind": "single_rep",
                    "payload": {"mass": 1.0, "dims": 1, "levels": 8, "algebra": "h3",
                                "margin": 0},
                    "tolerances": {"homomorphism": 100.0},
                }
            )
        )
        proc = run_cli("verify", "rep", str(path))
        assert proc.returncode == 0

    def test_unknown_tolerance_in_scenario_rejected(self, tmp_path):
        path = tmp_path / "rep.json"
        path.write_text(
            json.dumps(
                {"kind": "algebra", "payload": {"name": "so3"},
                 "tolerances": {"bogus": 1.0}}
            )
        )
        with pytest.raises(ScenarioError):
            load_scenario(path)


class TestSuites:
    def test_core_suite_passes_quickly(self):
        import time

        start = time.perf_counter()
        proc = run_cli("suite", "paper-core")
        elapsed = time.perf_counter() - start
        assert proc.returncode == 0
        report = json.loads(proc.stdout)
        assert report["status"] == "pass"
        assert report["check_count"] >= 12
        assert elapsed <= 10.0

    def test_suite_thread_env_variable(self, tmp_path):
        import os

        env = dict(os.environ, HRSYM_THREADS="4")
        proc = subprocess.run(
            [sys.executable, "-m", "hrsym", "suite", "paper-core"],
            capture_output=True, text=True, env=env,
        )
        assert proc.returncode == 0

    def test_scenario_kinds_cover_cli_kinds(self):
        from hrsym.scenarios import KINDS

        assert set(KINDS) == {"algebra", "uea", "single_rep", "composite", "spectrum", "dynamics"}


class TestDynamicsPayloads:
    def test_explicit_state_vector_accepted(self, tmp_path):
        # a ladder eigenstate given as explicit [re, im] coefficients
        vec = [[0.0, 0.0]] * 8
        vec[1] = [1.0, 0.0]
        path = tmp_path / "dyn.json"
        path.write_text(
            json.dumps(
                {
                    "kind": "dynamics",
                    "payload": {
                        "check": "conservation",
                        "levels": 8,
                        "mass": 1.0,
                        "potential": {"kind": "poly_x", "coefficients": [0, 0, 0.5]},
                        "t_max": 1.0,
                        "steps": 10,
                        "psi0": vec,
                    },
                }
            )
        )
        proc = run_cli("verify", "dynamics", str(path))
        assert proc.returncode == 0

    def test_wrong_length_state_vector_exits_two(self, tmp_path):
        path = tmp_path / "dyn.json"
        path.write_text(
            json.dumps(
                {
                    "kind": "dynamics",
                    "payload": {"check": "conservation", "levels": 8,
                                "psi0": [[1.0, 0.0], [0.0, 0.0]]},
                }
            )
        )
        proc = run_cli("verify", "dynamics", str(path))
        assert proc.returncode == 2
