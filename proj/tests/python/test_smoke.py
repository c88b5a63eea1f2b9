import json
import math
import os
import subprocess

import pytest

import covlab

UNIFORM = {"family": "uniform", "params": {"lo": 0.0, "hi": 1.0}}
HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = os.path.join(HERE, "..", "..", "configs", "examples")


def test_theorem_ids():
    ids = covlab.theorem_ids()
    assert "T1.2.1" in ids and "TA.1" in ids
    assert len(ids) == len(set(ids))


def test_kernel_values():
    assert covlab.kernel(UNIFORM, 0.5, 0.5) == pytest.approx(0.25, rel=1e-15)
    assert covlab.kernel(UNIFORM, 0.2, 0.7) == pytest.approx(0.06, rel=1e-15)


def test_covariance_of_uniform():
    value, error = covlab.covariance(UNIFORM, {"expr": "x"}, {"expr": "x"})
    assert value == pytest.approx(1.0 / 12.0, rel=1e-13)
    assert error < 1e-12


def test_check_linear_equality():
    report = covlab.check("T1.2.1", {"measure": UNIFORM, "f": {"expr": "2*x+1"}, "g": {"expr": "3*x"}})
    assert abs(report["margin"]) <= 1e-9
    assert report["verdict"] in ("PASS", "NUMERICALLY_INCONCLUSIVE")
    assert "seed" in report


def test_gaussian_case():
    report = covlab.check(
        "T1.2.2",
        {"measure": {"family": "gaussian"}, "f": {"expr": "exp(-x^2)"}, "g": {"expr": "x^2"}},
    )
    assert report["lhs"] == pytest.approx(3 ** -1.5 - 3 ** -0.5, abs=1e-6)
    assert report["verdict"] == "PASS"


def test_errors_are_value_errors():
    with pytest.raises(ValueError, match="unknown theorem id"):
        covlab.check("NOPE", {"measure": UNIFORM, "f": {"expr": "x"}, "g": {"expr": "x"}})
    with pytest.raises(ValueError):
        covlab.kernel({"family": "uniform", "params": {"lo": 1, "hi": 0}}, 0.0, 0.0)


def test_kernel_csv_grid():
    rows = covlab.kernel_csv(UNIFORM, 3).strip().splitlines()
    assert rows[0] == "x,y,k"
    assert len(rows) == 10
    center = [float(v) for v in rows[5].split(",")]
    assert center[2] == pytest.approx(0.25)


def test_small_suite_and_mutant():
    result = covlab.run_suite({"theorems": ["T1.2.1", "C4.7"], "instances": 3, "seed": 5})
    assert result["summary"]["fail_count"] == 0
    assert len(result["reports"]) == 6
    mutant = covlab.run_suite({"theorems": ["T1.2.2"], "instances": 3, "mutants": ["T1.2.2"]})
    assert mutant["summary"]["fail_count"] > 0


def test_oracle_battery():
    out = covlab.oracle_verify(seed=11, instances=25)
    assert out["pass"] is True
    assert {line["identity"] for line in out["identities"]} >= {"hoeffding", "andreev", "tensorization"}


@pytest.mark.skipif("COVLAB_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_bindings():
    cfg = os.path.join(CONFIGS, "c47_cubic.json")
    proc = subprocess.run(
        [os.environ["COVLAB_CLI"], "check", "--theorem", "C4.7", "--config", cfg],
        capture_output=True, text=True, check=True,
    )
    from_cli = json.loads(proc.stdout)
    with open(cfg) as fh:
        from_py = covlab.check("C4.7", json.load(fh))
    assert from_cli["margin"] == from_py["margin"]
    assert math.isclose(from_cli["margin"], 1 / 7 - 3 / 25, abs_tol=1e-6)
