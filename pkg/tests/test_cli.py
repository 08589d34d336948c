import json
import os
import subprocess
import sys

import pytest

SRC = os.path.join(os.path.dirname(__file__), "..", "src")


def run_cli(*args, env_extra=None):
    env = dict(os.environ, PYTHONPATH=SRC + os.pathsep + os.environ.get("PYTHONPATH", ""))
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "delaystab.cli", *args],
        capture_output=True, text=True, env=env,
    )


@pytest.fixture(scope="module")
def cfg_sin_cos(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "sin_cos.json"
    path.write_text(json.dumps({
        "schema": 1,
        "equation": {"terms": [
            {"coeff": "0.2 + 0.05*sin(n)", "lag": 1},
            {"coeff": "0.1*abs(cos(n))", "lag": 20},
        ]},
        "horizon": 2000,
    }))
    return str(path)


@pytest.fixture(scope="module")
def cfg_vanishing(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "vanishing.json"
    path.write_text(json.dumps({
        "schema": 1,
        "equation": {"terms": [{"coeff": "3^(-n-1)", "lag": 0}]},
        "horizon": 500,
    }))
    return str(path)


@pytest.fixture(scope="module")
def cfg_factorial(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "factorial.json"
    path.write_text(json.dumps({
        "schema": 1,
        "equation": {"terms": [{"coeff": "1 - 1/(n+1)", "lag": 0}]},
        "horizon": 40,
    }))
    return str(path)


def test_check_reports_stability(cfg_sin_cos):
    r = run_cli("check", cfg_sin_cos, "--no-meta")
    assert r.returncode == 0, r.stderr
    report = json.loads(r.stdout)
    assert "corollary8.1" in report["stable_criteria"]
    assert report["oracle"]["decay"]["mu_hat"] < 1
    winner = [v for v in report["verdicts"] if v["criterion"] == "corollary8.1"][0]
    assert winner["witnesses"]["gamma_min"] < 1
    assert winner["citation"]


def test_check_vanishing_no_stability(cfg_vanishing):
    r = run_cli("check", cfg_vanishing, "--no-meta")
    report = json.loads(r.stdout)
    assert report["stable_criteria"] == []
    assert report["oracle"]["decay"]["mu_hat"] >= 0.99  # kernel stays above 1/2


def test_check_empty_checks(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({
        "schema": 1,
        "equation": {"terms": [{"coeff": "0.2", "lag": 1}]},
        "checks": [],
    }))
    r = run_cli("check", str(path), "--no-meta")
    report = json.loads(r.stdout)
    assert report["verdicts"] == []
    assert report["oracle"]["spectral"]["radius"] == pytest.approx(0.7236, abs=1e-3)


def test_check_echo_reparses(cfg_sin_cos, tmp_path):
    r = run_cli("check", cfg_sin_cos, "--no-meta")
    echo = json.loads(r.stdout)["equation"]
    path = tmp_path / "echo.json"
    path.write_text(json.dumps({"schema": 1, "equation": echo, "horizon": 100}))
    r2 = run_cli("check", str(path), "--no-meta")
    assert r2.returncode == 0
    assert json.loads(r2.stdout)["equation"] == echo


def test_simulate_factorial_values(cfg_factorial):
    r = run_cli("simulate", cfg_factorial, "--N", "10")
    lines = r.stdout.strip().splitlines()
    assert lines[0] == "n,value"
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values[0] == 1.0 and values[1] == 1.0
    assert values[2] == pytest.approx(0.5)
    assert values[3] == pytest.approx(1 / 6)


def test_simulate_history_validation(cfg_sin_cos):
    r = run_cli("simulate", cfg_sin_cos, "--N", "5", "--history", "1.0", "2.0")
    assert r.returncode == 2
    assert "history" in r.stderr


def test_simulate_csv_output(cfg_factorial, tmp_path):
    out = tmp_path / "traj.csv"
    r = run_cli("simulate", cfg_factorial, "--N", "5", "--csv", str(out))
    assert r.returncode == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,value" and len(lines) == 7


def test_fundamental_csv_includes_bound(cfg_factorial, tmp_path):
    r = run_cli("fundamental", cfg_factorial, "--k", "0", "--N", "6")
    lines = r.stdout.strip().splitlines()
    assert lines[0] == "n,value,bound"
    n, value, bound = lines[2].split(",")
    assert (n, value) == ("1", "1")
    assert float(bound) >= float(value)


def test_examples_all_pass():
    r = run_cli("examples")
    assert r.returncode == 0, r.stdout + r.stderr
    assert "all fixtures pass" in r.stdout


def test_examples_only_filter():
    r = run_cli("examples", "--only", "vanishing_coefficient", "--json", "--no-meta")
    payload = json.loads(r.stdout)
    assert list(payload["fixtures"]) == ["vanishing_coefficient"]
    assert payload["pass"] is True
    r2 = run_cli("examples", "--only", "nope")
    assert r2.returncode == 2


def test_examples_json_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run_cli("examples", "--json", "--no-meta", "--out", str(a)).returncode == 0
    assert run_cli("examples", "--json", "--no-meta", "--out", str(b)).returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_fuzz_small_clean():
    r = run_cli("fuzz", "--count", "20", "--json")
    assert r.returncode == 0, r.stdout + r.stderr
    payload = json.loads(r.stdout)
    assert payload["pass"] is True
    assert all(not v for v in payload["counterexamples"].values())


def test_fuzz_single_seed_deterministic():
    a = run_cli("fuzz", "--count", "1", "--seeds", "0", "--json")
    b = run_cli("fuzz", "--count", "1", "--seeds", "0", "--json")
    assert a.stdout == b.stdout


def test_fuzz_mutation_surfaces_counterexamples():
    # corrupting the nonoscillation threshold must make the harness fail:
    # proves the fuzz suite can actually catch an unsound checker
    r = run_cli("fuzz", "--count", "120", "--json",
                env_extra={"DELAYSTAB_LOOSEN_THRESHOLDS": "1"})
    assert r.returncode == 1
    payload = json.loads(r.stdout)
    assert payload["counterexamples"]["oracle_soundness"]


def test_config_errors_exit_2(tmp_path):
    missing = run_cli("check", str(tmp_path / "nope.json"))
    assert missing.returncode == 2
    bad_schema = tmp_path / "bad.json"
    bad_schema.write_text(json.dumps({"schema": 2, "equation": {"terms": []}}))
    assert run_cli("check", str(bad_schema)).returncode == 2
    bad_expr = tmp_path / "expr.json"
    bad_expr.write_text(json.dumps({
        "schema": 1,
        "equation": {"terms": [{"coeff": "0.2 +", "lag": 1}]},
    }))
    r = run_cli("check", str(bad_expr))
    assert r.returncode == 2
    assert "position" in r.stderr
