import json

import numpy as np
import pytest

from igsp.cli import main
from igsp.evaluation import ScenarioConfig, make_instance, simulate_dataset
from igsp.io import load_dataset


@pytest.fixture
def sim(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--p", "5", "--k", "1", "--target-size", "2", "--n", "3000",
                 "--c", "0.5", "--seed", "7", "--out", str(out)]) == 0
    return out


def test_simulate_writes_artifacts(sim):
    assert sorted(p.name for p in sim.iterdir()) == [
        "manifest.json", "regime_0.csv", "regime_1.csv", "truth.edges"]
    doc = json.loads((sim / "manifest.json").read_text())
    assert doc["variables"] == ["X1", "X2", "X3", "X4", "X5"]
    assert doc["regimes"][0]["targets"] == []
    assert len(doc["regimes"][1]["targets"]) == 2
    assert doc["options"]["generator"]["seed"] == 7


def test_simulate_round_trip_is_exact(sim):
    loaded = load_dataset(sim / "manifest.json")
    sc = ScenarioConfig(p=5, k=1, target_size=2, c=0.5, ns=(3000,))
    inst = make_instance(sc, 7, 0)
    data = simulate_dataset(inst.model, inst.family, 3000, 7, 0, 1, 0)
    assert loaded.family == inst.family
    for a, b in zip(loaded.data, data):
        assert np.array_equal(a.samples, b.samples)


@pytest.mark.parametrize("algorithm", ["igsp", "alg1"])
def test_run_and_evaluate(sim, tmp_path, algorithm, capsys):
    est = tmp_path / f"{algorithm}.edges"
    assert main(["run", "--algorithm", algorithm, "--manifest", str(sim / "manifest.json"),
                 "--alpha", "0.01", "--seed", "7", "--out", str(est)]) == 0
    report = json.loads((tmp_path / f"{algorithm}.edges.report.json").read_text())
    assert report["config"]["algorithm"] == algorithm
    assert report["config"]["seed"] == 7
    assert report["result"]["edges"] == [ln.split(",") for ln in est.read_text().splitlines()]
    assert main(["evaluate", "--estimate", str(est), "--truth", str(sim / "truth.edges"),
                 "--manifest", str(sim / "manifest.json")]) == 0
    metrics = json.loads(capsys.readouterr().out)
    assert isinstance(metrics["imec_recovered"], bool)
    assert metrics["truth_edge_count"] == len((sim / "truth.edges").read_text().splitlines())


def test_rerun_from_report(sim, tmp_path):
    est = tmp_path / "est.edges"
    main(["run", "--manifest", str(sim / "manifest.json"), "--seed", "3", "--restarts", "2",
          "--max-depth", "none", "--out", str(est)])
    first = est.read_bytes(), (tmp_path / "est.edges.report.json").read_bytes()
    est.unlink()
    assert main(["run", "--from-report", str(tmp_path / "est.edges.report.json")]) == 0
    assert (est.read_bytes(), (tmp_path / "est.edges.report.json").read_bytes()) == first


def test_explicit_start(sim, tmp_path):
    est = tmp_path / "est.edges"
    assert main(["run", "--manifest", str(sim / "manifest.json"), "--start", "X5,X4,X3,X2,X1",
                 "--out", str(est)]) == 0
    report = json.loads((tmp_path / "est.edges.report.json").read_text())
    assert report["result"]["start"] == ["X5", "X4", "X3", "X2", "X1"]
    assert main(["run", "--manifest", str(sim / "manifest.json"), "--start", "X9",
                 "--out", str(est)]) == 2


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--p", "4", "--ns", "200,2000", "--alphas", "0.01,0.05",
                 "--trials", "2", "--seed", "1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "alpha,n,proportion,successes,trials,errors"
    assert len(lines) == 5


def test_oracle_check(sim, tmp_path, capsys):
    assert main(["oracle-check", "--truth", str(sim / "truth.edges"),
                 "--manifest", str(sim / "manifest.json"), "--max-depth", "none"]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_oracle_check_detects_failure(sim, tmp_path, capsys):
    # a depth-1 walk from reversed orders cannot fix a complete graph with a
    # mid-order intervention
    (tmp_path / "m.json").write_text(json.dumps({
        "variables": ["A", "B", "C", "D"],
        "regimes": [{"targets": [], "data": "d.csv"}, {"targets": ["C"], "data": "d.csv"}],
    }))
    (tmp_path / "d.csv").write_text("0,0,0,0\n")
    (tmp_path / "t.edges").write_text("A,B\nA,C\nA,D\nB,C\nB,D\nC,D\n")
    code = main(["oracle-check", "--truth", str(tmp_path / "t.edges"), "--manifest",
                 str(tmp_path / "m.json"), "--max-depth", "1", "--starts", "10"])
    assert code == 1
    assert "not I-Markov equivalent" in capsys.readouterr().err


def test_bad_manifest_is_a_clean_error(tmp_path, capsys):
    code = main(["run", "--manifest", str(tmp_path / "missing.json"), "--out", str(tmp_path / "e")])
    assert code == 2
    assert "missing.json: file not found" in capsys.readouterr().err


def test_run_requires_inputs(capsys):
    assert main(["run"]) == 2


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as info:
        main(["launch"])
    assert info.value.code != 0
