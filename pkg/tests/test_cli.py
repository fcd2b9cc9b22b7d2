import json
from pathlib import Path

import pytest

from cqsim import benchmark_config, init_weights, save_config, save_weights
from cqsim.cli import cell_seed, main, run_cell
from cqsim.rng import Rng


@pytest.fixture
def small_config(tmp_path):
    cfg = benchmark_config(node_count=8, seed=0, traffic_slots=30)
    path = tmp_path / "cfg.json"
    save_config(cfg, path)
    return path


def test_run_writes_episode_rows_plus_aggregate(small_config, tmp_path):
    out = tmp_path / "out.csv"
    rc = main(["--config", str(small_config), "--policy", "cq+",
               "--episodes", "3", "--seed", "1", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 1 + 3 + 1  # header + episodes + aggregate
    assert lines[-1].split(",")[4] == "mean"


def test_rerun_is_byte_identical(small_config, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["--config", str(small_config), "--policy", "hard-cq+",
            "--episodes", "2", "--seed", "4"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_missing_weights_is_an_error(small_config, tmp_path, capsys):
    rc = main(["--config", str(small_config), "--policy", "neural",
               "--weights", str(tmp_path / "nope.json")])
    assert rc != 0
    assert "weights not found" in capsys.readouterr().err


def test_neural_without_weights_is_an_error(small_config, capsys):
    rc = main(["--config", str(small_config), "--policy", "neural"])
    assert rc != 0
    assert "requires --weights" in capsys.readouterr().err


def test_unknown_policy_is_an_error(small_config, capsys):
    rc = main(["--config", str(small_config), "--policy", "ospf"])
    assert rc != 0


def test_empty_axis_is_an_error(small_config, capsys):
    rc = main(["--config", str(small_config), "--sweep-nodes", ""])
    assert rc != 0
    assert "empty sweep axis" in capsys.readouterr().err


def test_neural_policy_runs_from_weight_file(small_config, tmp_path):
    wpath = tmp_path / "w.json"
    wpath.write_text(json.dumps(save_weights(init_weights(4, rng=Rng.from_seed(1)))))
    out = tmp_path / "out.csv"
    rc = main(["--config", str(small_config), "--policy", "neural",
               "--weights", str(wpath), "--episodes", "1", "--out", str(out)])
    assert rc == 0
    assert len(out.read_text().strip().split("\n")) == 3


def test_flow_count_override(small_config, tmp_path):
    out = tmp_path / "out.csv"
    rc = main(["--config", str(small_config), "--policy", "cq+",
               "--episodes", "1", "--flows", "2", "--out", str(out)])
    assert rc == 0
    row = out.read_text().strip().split("\n")[1].split(",")
    assert row[2] == "2"  # flows column


def test_sweep_grid_row_count(small_config, tmp_path):
    out = tmp_path / "sweep.csv"
    rc = main(["--config", str(small_config), "--policy", "cq+,hard-cq+",
               "--episodes", "2", "--seed", "2", "--out", str(out),
               "--sweep-nodes", "6,8"])
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 1 + 2 * 2  # header + nodes x policies

    assert lines[1].startswith("cq_plus,6,")


def test_sweep_cell_matches_independent_run(small_config):
    from cqsim import load_config
    base = load_config(small_config)
    a = run_cell(base, "cq_plus", 6, 1, 1.0, episodes=2, base_seed=9)
    b = run_cell(base, "cq_plus", 6, 1, 1.0, episodes=2, base_seed=9)
    assert a == b


def test_policies_share_episode_seeds():
    s1 = cell_seed(7, 12, 1, 1.0, 0)
    s2 = cell_seed(7, 12, 1, 1.0, 0)
    s3 = cell_seed(7, 12, 1, 1.0, 1)
    assert s1 == s2 != s3


def test_transition_log_written(small_config, tmp_path):
    log = tmp_path / "trans.jsonl"
    rc = main(["--config", str(small_config), "--policy", "cq+", "--episodes", "1",
               "--out", str(tmp_path / "o.csv"), "--log-transitions", str(log)])
    assert rc == 0
    lines = [json.loads(l) for l in log.read_text().strip().split("\n")]
    assert any(rec.get("done") for rec in lines)
    body = [rec for rec in lines if not rec.get("done")]
    assert all(len(rec["obs"]) == 18 for rec in body)


def test_trajectory_log_and_table_dumps(small_config, tmp_path):
    traj = tmp_path / "traj.csv"
    prefix = tmp_path / "tables"
    rc = main(["--config", str(small_config), "--policy", "cq+", "--episodes", "1",
               "--out", str(tmp_path / "o.csv"), "--log-trajectory", str(traj),
               "--dump-tables", str(prefix)])
    assert rc == 0
    header, first = traj.read_text().split("\n")[:2]
    assert header == "slot,node,x,y,speed"
    assert first.startswith("1,0,")
    dumps = list(tmp_path.glob("tables.node*.c.csv"))
    assert len(dumps) == 8
