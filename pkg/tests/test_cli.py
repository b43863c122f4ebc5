import json
import subprocess
import sys

import pytest

from steersim.cli import load_state, main


def test_figure(tmp_path, capsys):
    assert main(["figure", "fig12", "--trials", "5", "--seed", "3", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig12.csv").read_text().startswith("axis,method,mean_se,ci95,infeasible_rate,trials,seed\n")
    assert "IS-stage2" in capsys.readouterr().out


def test_sweep(tmp_path, capsys):
    cfg = tmp_path / "dense.json"
    cfg.write_text(json.dumps({"K": 3, "p_b": [0.3, 0.9], "eta": 2, "method": ["IS", "IN"], "trials": 5}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "dense.csv").read_text().splitlines()
    assert len(lines) == 5


def test_sweep_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"K": 3, "p_b": 0.3}))
    assert main(["sweep", "--config", str(cfg)]) == 2
    assert "exactly one" in capsys.readouterr().err


def test_graph_analyze(tmp_path, capsys):
    edges = tmp_path / "g.txt"
    edges.write_text("1 0 1.0\n2 0 1.0\n2 1 1.0\n3 1 1.0\n4\n")
    assert main(["graph", "analyze", "--edges", str(edges)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["order"] == [2, 3, 4, 1, 0] and out["feasible_for_is"]
    assert [c["vertices"] for c in out["components"]] == [[0, 1, 2, 3], [4]]


def test_graph_analyze_cycle(tmp_path, capsys):
    edges = tmp_path / "g.txt"
    edges.write_text("0 1 1\n1 0 5\n")
    main(["graph", "analyze", "--edges", str(edges)])
    out = json.loads(capsys.readouterr().out)
    assert out["deleted"] == [1] and out["components"][0]["cycles"] == [[0, 1]]


def test_graph_bad_file(tmp_path, capsys):
    edges = tmp_path / "g.txt"
    edges.write_text("0 1\n")
    assert main(["graph", "analyze", "--edges", str(edges)]) == 2
    assert main(["graph", "analyze", "--edges", str(tmp_path / "missing.txt")]) == 2


def test_plan_with_channels(tmp_path, capsys):
    state = {
        "connection": [[1, 0], [1, 1]],
        "channels": {
            "0,0": {"re": [[1, 0], [0, 1]]},
            "1,1": {"re": [[2, 0], [0, 1]]},
            "0,1": [[[0.3, 0.1], [0, 0]], [[0.2, 0], [0, 0]]],
        },
    }
    path = tmp_path / "s.json"
    path.write_text(json.dumps(state))
    assert main(["plan", "--state", str(path), "--snr-db", "10"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["order"] == [0, 1]
    d = out["dispositions"]["1"]
    # interference (0.3+0.1j, 0.2) against d_s = e1 through diag(2, 1)
    assert d["action"] == "steer" and d["power"] == pytest.approx(0.1 / 4)
    assert out["se"]["infeasible_count"] == 0


def test_plan_draws_channels(tmp_path):
    st_ = load_state({"connection": [[1, 1], [0, 1]], "seed": 2, "n_t": 3})
    assert set(st_.channels) == {(0, 0), (1, 0), (1, 1)} and st_.channels[(0, 0)].shape == (2, 3)
    with pytest.raises(ValueError):
        load_state({"connection": [[1]], "colour": 1})


def test_module_entry_point(tmp_path):
    edges = tmp_path / "g.txt"
    edges.write_text("0 1 1\n")
    out = subprocess.run([sys.executable, "-m", "steersim", "graph", "analyze", "--edges", str(edges)],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["order"] == [0, 1]
