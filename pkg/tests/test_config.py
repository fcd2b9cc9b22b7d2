import json

import pytest

from cqsim import (FlowSpec, SimConfig, benchmark_config, fork_rng,
                   validate_config)
from cqsim.config import config_from_dict, config_to_dict
from cqsim.rng import Rng


def test_single_node_rejected():
    cfg = benchmark_config()
    cfg.node_count = 1
    assert any("node_count" in v for v in validate_config(cfg))


def test_self_flow_rejected():
    cfg = benchmark_config()
    cfg.flows = [FlowSpec(source=3, destination=3)]
    assert any("source must differ" in v for v in validate_config(cfg))


def test_benchmark_config_is_valid():
    cfg = benchmark_config(node_count=12)
    assert cfg.area_width_m == 800.0 and cfg.area_height_m == 300.0
    assert cfg.radio_range_m == 150.0
    assert cfg.traffic_slots == 3000
    assert cfg.k_neighbors == 4
    assert validate_config(cfg) == []


def test_flow_ids_bounded():
    cfg = benchmark_config(node_count=5)
    cfg.flows = [FlowSpec(source=0, destination=7)]
    assert any("node ids" in v for v in validate_config(cfg))


def test_benchmark_layout_needs_five_nodes():
    cfg = benchmark_config(node_count=5)
    cfg.node_count = 3
    cfg.flows = [FlowSpec(0, 2)]
    assert any("benchmark_5" in v for v in validate_config(cfg))


def test_resolved_defaults():
    cfg = benchmark_config(node_count=12)
    assert cfg.drain_cap == 120
    assert cfg.channel_range == 150.0
    assert cfg.channel_falloff == pytest.approx(15.0)
    assert cfg.h_init == cfg.h_cap == 32.0
    assert cfg.ttl_cap == 48


def test_json_round_trip(tmp_path):
    cfg = benchmark_config(node_count=8, seed=42)
    cfg.mobility.initial_positions = [(float(i * 10), 5.0) for i in range(8)]
    d = config_to_dict(cfg)
    text = json.dumps(d)
    back = config_from_dict(json.loads(text))
    assert back == cfg


class TestForkRng:
    def test_same_label_same_stream(self):
        a = fork_rng(Rng.from_seed(7), "mobility")
        b = fork_rng(Rng.from_seed(7), "mobility")
        assert [a.random() for _ in range(5)] == [b.random() for _ in range(5)]

    def test_labels_independent(self):
        a = fork_rng(Rng.from_seed(7), "mobility")
        b = fork_rng(Rng.from_seed(7), "channel")
        assert [a.random() for _ in range(5)] != [b.random() for _ in range(5)]

    def test_seed_sensitivity(self):
        a = fork_rng(Rng.from_seed(7), "x")
        b = fork_rng(Rng.from_seed(8), "x")
        assert [a.random() for _ in range(5)] != [b.random() for _ in range(5)]

    def test_empty_label_rejected(self):
        with pytest.raises(ValueError):
            fork_rng(Rng.from_seed(1), "")

    def test_fork_ignores_parent_consumption(self):
        root = Rng.from_seed(9)
        before = fork_rng(root, "traffic").random()
        root.random()
        after = fork_rng(root, "traffic").random()
        assert before == after
