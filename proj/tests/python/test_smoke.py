import csv
import io
import json
import math
import os
import pathlib
import subprocess

import numpy as np
import pytest

import bwa_markov as bwa

ROOT = pathlib.Path(__file__).resolve().parents[2]
CONFIGS = ROOT / "configs"
CLI = os.environ.get("BWA_CLI")


def test_fixture_and_stationary():
    f = bwa.fixture("two_state")
    pi = f.chain.stationary()
    assert pi == pytest.approx([5 / 6, 1 / 6], abs=1e-12)
    assert "reference" in bwa.fixture_names()


def test_train_predict_matches_numpy_oracle():
    f = bwa.fixture("reference")
    X, y = f.chain.sample_path(200, 3)
    state = bwa.train(f.space, X, y, 0.5)
    x = [0.4]
    cum = np.zeros(f.space.size)
    for xi, yi in zip(X, y):
        cum += [abs(f.space.evaluate(h, list(xi)) - yi) for h in range(f.space.size)]
    w = 0.5 ** (cum - cum.min()) * np.asarray(f.space.prior)
    preds = [f.space.evaluate(h, x) for h in range(f.space.size)]
    assert bwa.predict(state, x, f.space) == pytest.approx(float(w @ preds / w.sum()), abs=1e-12)
    assert sum(bwa.posterior_masses(state, f.space)) == pytest.approx(1.0, abs=1e-12)


def test_certificate_and_ess():
    cert = bwa.fit_certificate(bwa.fixture("two_state").chain)
    assert cert.rho == pytest.approx(0.4, abs=1e-6)
    assert bwa.effective_sample_size(100, math.exp(-8)) == 10
    assert bwa.n_from_ne(10.0, math.exp(-8)) == (100, False)


def test_bounds():
    inputs = bwa.BoundInputs(eps=0.1, delta=0.05, gamma=0.0)
    assert bwa.lemma1_ne(inputs).n_e_required == pytest.approx(800 * math.log(40), rel=1e-12)
    assert bwa.lemma2_ne(inputs).n_e_required / bwa.lemma1_ne(inputs).n_e_required == pytest.approx(36.0)
    bound, guarantee = bwa.theorem4_guarantee(bwa.BoundInputs(eps=0.1, delta=0.05, Xi=0.2))
    assert guarantee == pytest.approx(0.3)
    with pytest.raises(ValueError):
        bwa.lemma1_ne(bwa.BoundInputs(eps=3.5, delta=0.05))
    assert bwa.weight_domination_threshold(0.5, 24, 1.0, 1.0) == pytest.approx(0.0625)


def test_mcmc_runs():
    f = bwa.fixture("reference")
    X, y = f.chain.sample_path(30, 7)
    value, err, acc = bwa.predict_mcmc(X, y, 0.5, [0.5], grid=21, samples=500, seed=1)
    assert 0.0 <= value <= 1.0 and err >= 0.0 and 0.0 < acc <= 1.0


def test_run_experiment_is_deterministic():
    config = {"fixture": "reference", "trials": 30, "schedule": [10, 100]}
    csv_a, summary = bwa.run_experiment("consistency", config)
    csv_b, _ = bwa.run_experiment("consistency", config)
    assert csv_a == csv_b
    assert summary["passed"]
    rows = list(csv.DictReader(io.StringIO(csv_a)))
    assert len(rows) == 60 and rows[0]["status"] == "ok"


def test_bound_table_mirror():
    table = bwa.bound_table(_strip_comments(CONFIGS / "bounds_hand.json"))
    names = [row["bound"] for row in table["bounds"]]
    assert names == ["lemma1", "lemma2", "theorem2", "corollary1", "theorem4"]
    assert table["bounds"][0]["n_e_required"] == pytest.approx(800 * math.log(40), rel=1e-12)


def _strip_comments(path):
    return json.loads("\n".join(line for line in path.read_text().splitlines() if not line.strip().startswith("//")))


def test_verify_subset():
    results = bwa.verify([1, 2])
    assert [r["id"] for r in results] == [1, 2]
    assert all(r["passed"] for r in results)


needs_cli = pytest.mark.skipif(not CLI, reason="BWA_CLI not set")


def run_cli(*args, check=True):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, check=check)


@needs_cli
def test_cli_bounds_table_and_json_agree(tmp_path):
    cfg = CONFIGS / "reference_consistency.json"
    text = run_cli("bounds", "-c", cfg, "--json", tmp_path / "bounds.json").stdout
    mirror = json.loads((tmp_path / "bounds.json").read_text())
    for row in mirror["bounds"]:
        assert json.dumps(row["n_e_required"]) in text


@needs_cli
def test_cli_simulate_train_predict(tmp_path):
    cfg = CONFIGS / "reference_consistency.json"
    traj = tmp_path / "traj.csv"
    weights = tmp_path / "weights.csv"
    run_cli("simulate", "-c", cfg, "-n", 500, "-s", 4, "-o", traj)
    header = traj.read_text().splitlines()[0]
    assert header == "step,x0,y"
    run_cli("train", "-c", cfg, "-t", traj, "-o", weights)
    assert weights.read_text().splitlines()[0] == "hypothesis_id,cumulative_loss,log_weight,posterior_mass"
    out = json.loads(run_cli("predict", "-c", cfg, "-x", "0.5", "-w", weights).stdout)
    assert out["method"] == "exact"
    assert 0.0 <= out["value"] <= 1.0


@needs_cli
def test_cli_experiment_exit_codes(tmp_path):
    ok = run_cli("experiment", "consistency", "-c", CONFIGS / "three_state_custom.json", "-o", tmp_path / "out")
    assert ok.returncode == 0
    assert (tmp_path / "out" / "report.csv").exists()
    assert json.loads((tmp_path / "out" / "summary.json").read_text())["passed"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"fixture": "reference", "trials": 5, "schedule": [10]}))
    failed = run_cli("experiment", "consistency", "-c", bad, "-o", tmp_path / "bad", check=False)
    assert failed.returncode != 0


@needs_cli
def test_cli_verify_only():
    res = run_cli("verify", "--only", 1, check=False)
    assert res.returncode == 0
    assert "PASS" in res.stdout
