"""Packet-level MANET simulator with confidence-based (CQ+) routing, a neural
broadcast/unicast policy, and a multi-agent RL environment server."""

from .config import (ChannelConfig, CqConfig, FlowSpec, MobilityConfig,
                     RewardConfig, SimConfig, benchmark_config, load_config,
                     save_config, validate_config)
from .cqtable import AckValues, CqTable
from .engine import Engine, EpisodeMetrics, run_episode
from .policy import (BROADCAST, UNICAST, Observation, PolicySpec, PolicyWeights,
                     WeightLoadError, build_observation, decide_cq_plus,
                     decide_cq_plus_hard, decide_neural, init_weights,
                     load_weights, save_weights)
from .rng import Rng, fork_rng

__all__ = [
    "AckValues", "BROADCAST", "ChannelConfig", "CqConfig", "CqTable", "Engine",
    "EpisodeMetrics", "FlowSpec", "MobilityConfig",
    "Observation", "PolicySpec", "PolicyWeights", "RewardConfig", "Rng",
    "SimConfig", "UNICAST", "WeightLoadError", "benchmark_config",
    "build_observation", "decide_cq_plus", "decide_cq_plus_hard",
    "decide_neural", "fork_rng", "init_weights", "load_config", "load_weights",
    "run_episode", "save_config", "save_weights", "validate_config",
]

__version__ = "0.1.0"
