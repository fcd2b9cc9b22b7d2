"""Simulation configuration schema, validation, and JSON (de)serialization.

A `SimConfig` fully determines an episode: identical config (seed included)
reproduces a bit-identical trajectory and metrics.  All units are SI
(meters, seconds).  The JSON layout mirrors the dataclass fields; see
README for the documented schema.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .policy import PolicySpec, load_weights, save_weights

GAUSS_MARKOV = "gauss_markov"
RANDOM_WAYPOINT = "random_waypoint"
STATIC = "static"

BENCHMARK_5 = "benchmark_5"
UNIFORM = "uniform"


@dataclass
class FlowSpec:
    source: int
    destination: int
    packets_per_slot: float = 1.0


@dataclass
class MobilityConfig:
    model: str = GAUSS_MARKOV
    mu: float = 0.85                      # memory parameter of the AR(1) speed/heading process
    mean_speed_mps: float = 3.0           # long-run mean speed ("dynamic level")
    dynamic_scale: float = 1.0            # multiplier on mean speed, swept in experiments
    speed_sigma: float | None = None      # None -> mean_speed / 2
    angle_sigma: float = math.pi / 4
    region_layout: str = BENCHMARK_5
    region_overlap_frac: float = 0.10
    update_seconds: float | None = None   # None -> slot_seconds
    initial_positions: list[tuple[float, float]] | None = None

    @property
    def base_speed(self) -> float:
        return self.mean_speed_mps * self.dynamic_scale

    @property
    def speed_sigma_resolved(self) -> float:
        return self.base_speed / 2.0 if self.speed_sigma is None else self.speed_sigma


@dataclass
class ChannelConfig:
    range_m: float | None = None          # None -> SimConfig.radio_range_m
    falloff_m: float | None = None        # None -> 0.1 * range
    ack_lossless: bool = False


@dataclass
class CqConfig:
    decay: float = 0.1                    # confidence decay factor per update
    c_init: float = 0.0
    h_init: float | None = None           # None -> SimConfig.h_cap
    ack_duplicates: bool = True           # duplicate receptions still return an ACK


@dataclass
class RewardConfig:
    kind: str = "reward1"                 # reward1 | reward2
    gamma: float = 0.99                   # trainer-side discount, recorded for provenance
    w1: float = 1.0                       # delivery-contribution weight
    w2: float = 0.2                       # zero-ACK transmission penalty
    w3: float = 0.5                       # per-ACK copy penalty (normalized by network size)


@dataclass
class SimConfig:
    node_count: int = 12
    area_width_m: float = 800.0
    area_height_m: float = 300.0
    radio_range_m: float = 150.0
    slot_seconds: float = 0.05
    traffic_slots: int = 3000
    drain_slot_cap: int | None = None     # None -> 10 * node_count
    flows: list[FlowSpec] = field(default_factory=list)
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    cq: CqConfig = field(default_factory=CqConfig)
    policy: PolicySpec = field(default_factory=PolicySpec)
    reward: RewardConfig = field(default_factory=RewardConfig)
    seed: int = 0
    k_neighbors: int = 4
    h_cap: float = 32.0
    shuffle_node_order: bool = False      # randomize intra-slot processing order
    ttl_hop_cap: int | None = None        # None -> 4 * node_count
    upstream_prev_action: bool = False    # observation feature 4K+1 uses the
                                          # upstream sender's action instead of the own one

    # -- resolved defaults -------------------------------------------------
    @property
    def drain_cap(self) -> int:
        return 10 * self.node_count if self.drain_slot_cap is None else self.drain_slot_cap

    @property
    def channel_range(self) -> float:
        return self.radio_range_m if self.channel.range_m is None else self.channel.range_m

    @property
    def channel_falloff(self) -> float:
        return 0.1 * self.channel_range if self.channel.falloff_m is None else self.channel.falloff_m

    @property
    def h_init(self) -> float:
        return self.h_cap if self.cq.h_init is None else self.cq.h_init

    @property
    def ttl_cap(self) -> int:
        return 4 * self.node_count if self.ttl_hop_cap is None else self.ttl_hop_cap

    @property
    def mobility_tick(self) -> float:
        return self.slot_seconds if self.mobility.update_seconds is None else self.mobility.update_seconds


def validate_config(cfg: SimConfig) -> list[str]:
    """Return the list of invariant violations (empty iff the config is valid)."""
    v: list[str] = []
    if cfg.node_count < 2:
        v.append("node_count must be >= 2")
    if cfg.radio_range_m <= 0:
        v.append("radio_range_m must be > 0")
    if cfg.area_width_m <= 0 or cfg.area_height_m <= 0:
        v.append("area dimensions must be > 0")
    if cfg.slot_seconds <= 0:
        v.append("slot_seconds must be > 0")
    if cfg.traffic_slots < 1:
        v.append("traffic_slots must be >= 1")
    if cfg.drain_slot_cap is not None and cfg.drain_slot_cap < 0:
        v.append("drain_slot_cap must be >= 0")
    if cfg.k_neighbors < 1:
        v.append("k_neighbors must be >= 1")
    if cfg.h_cap < 1:
        v.append("h_cap must be >= 1")
    if not cfg.flows:
        v.append("at least one flow required")
    for i, f in enumerate(cfg.flows):
        if not (0 <= f.source < cfg.node_count) or not (0 <= f.destination < cfg.node_count):
            v.append(f"flow {i}: node ids must be in [0, {cfg.node_count})")
        if f.source == f.destination:
            v.append(f"flow {i}: source must differ from destination")
        if f.packets_per_slot < 0:
            v.append(f"flow {i}: packets_per_slot must be >= 0")

    m = cfg.mobility
    if not (0.0 <= m.mu <= 1.0):
        v.append("mobility.mu must be in [0, 1]")
    if m.mean_speed_mps < 0 or m.dynamic_scale < 0:
        v.append("mobility speed parameters must be >= 0")
    if (m.speed_sigma is not None and m.speed_sigma < 0) or m.angle_sigma < 0:
        v.append("mobility sigmas must be >= 0")
    if not (0.0 <= m.region_overlap_frac < 0.5):
        v.append("mobility.region_overlap_frac must be in [0, 0.5)")
    if m.model not in (GAUSS_MARKOV, RANDOM_WAYPOINT, STATIC):
        v.append(f"unknown mobility model {m.model!r}")
    if m.region_layout not in (BENCHMARK_5, UNIFORM):
        v.append(f"unknown region layout {m.region_layout!r}")
    if m.region_layout == BENCHMARK_5 and cfg.node_count < 5:
        v.append("benchmark_5 region layout requires node_count >= 5")
    if m.initial_positions is not None:
        if len(m.initial_positions) != cfg.node_count:
            v.append("initial_positions must list one (x, y) per node")
        else:
            for x, y in m.initial_positions:
                if not (0 <= x <= cfg.area_width_m and 0 <= y <= cfg.area_height_m):
                    v.append("initial_positions must lie inside the area")
                    break

    if cfg.channel.range_m is not None and cfg.channel.range_m <= 0:
        v.append("channel.range_m must be > 0")
    if cfg.channel_falloff <= 0:
        v.append("channel falloff must be > 0")

    if not (0.0 < cfg.cq.decay < 1.0):
        v.append("cq.decay must be in (0, 1)")
    if not (0.0 <= cfg.cq.c_init <= 1.0):
        v.append("cq.c_init must be in [0, 1]")
    if cfg.cq.h_init is not None and cfg.cq.h_init < 1:
        v.append("cq.h_init must be >= 1")

    if not (0.0 <= cfg.policy.epsilon <= 1.0):
        v.append("policy.epsilon must be in [0, 1]")
    if cfg.policy.kind not in ("cq_plus", "cq_plus_hard", "neural"):
        v.append(f"unknown policy kind {cfg.policy.kind!r}")
    if cfg.policy.kind == "neural" and cfg.policy.weights is None:
        v.append("neural policy requires weights")
    if cfg.policy.weights is not None:
        want = 4 * cfg.k_neighbors + 2
        if cfg.policy.weights.layer_sizes[0] != want:
            v.append(f"policy weights expect input width {cfg.policy.weights.layer_sizes[0]}, "
                     f"config implies {want}")

    if cfg.reward.kind not in ("reward1", "reward2"):
        v.append(f"unknown reward kind {cfg.reward.kind!r}")
    if min(cfg.reward.w1, cfg.reward.w2, cfg.reward.w3) < 0:
        v.append("reward weights must be >= 0")
    if not (0.0 <= cfg.reward.gamma < 1.0):
        v.append("reward.gamma must be in [0, 1)")
    if cfg.ttl_hop_cap is not None and cfg.ttl_hop_cap < 1:
        v.append("ttl_hop_cap must be >= 1")
    return v


def benchmark_config(node_count: int = 12, seed: int = 0, flow_count: int = 1,
                     traffic_slots: int = 3000) -> SimConfig:
    """Benchmark topology: 800 m x 300 m area, 150 m radio range, five mobility
    regions between a left-edge source and a right-edge destination."""
    flows = [FlowSpec(source=0, destination=node_count - 1, packets_per_slot=1.0)]
    for i in range(1, flow_count):
        # extra flows pair low/high ids deterministically; randomized variants
        # are generated by the sweep driver
        flows.append(FlowSpec(source=i % node_count,
                              destination=(node_count - 1 - i) % node_count,
                              packets_per_slot=1.0))
    return SimConfig(node_count=node_count, traffic_slots=traffic_slots,
                     flows=flows, seed=seed)


# -- JSON ------------------------------------------------------------------

def config_to_dict(cfg: SimConfig) -> dict:
    d = asdict(cfg)
    pol = d["policy"]
    pol.pop("weights", None)
    if cfg.policy.weights_file:
        pol["weights_file"] = cfg.policy.weights_file
    elif cfg.policy.weights is not None:
        pol["weights"] = save_weights(cfg.policy.weights)
    else:
        pol.pop("weights_file", None)
    return d


def config_from_dict(d: dict) -> SimConfig:
    d = dict(d)
    flows = [FlowSpec(**f) for f in d.pop("flows", [])]
    mob = d.pop("mobility", {})
    if mob.get("initial_positions") is not None:
        mob["initial_positions"] = [tuple(p) for p in mob["initial_positions"]]
    mobility = MobilityConfig(**mob)
    channel = ChannelConfig(**d.pop("channel", {}))
    cq = CqConfig(**d.pop("cq", {}))
    reward = RewardConfig(**d.pop("reward", {}))
    pol = dict(d.pop("policy", {}))
    weights = None
    if "weights" in pol and pol["weights"] is not None:
        weights = load_weights(pol.pop("weights"))
    else:
        pol.pop("weights", None)
    weights_file = pol.pop("weights_file", None)
    if weights is None and weights_file:
        weights = load_weights(json.loads(Path(weights_file).read_text()))
    policy = PolicySpec(weights=weights, weights_file=weights_file, **pol)
    return SimConfig(flows=flows, mobility=mobility, channel=channel, cq=cq,
                     reward=reward, policy=policy, **d)


def load_config(path: str | Path) -> SimConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


def save_config(cfg: SimConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")
