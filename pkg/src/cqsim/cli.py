"""Batch experiment runner.

Single-cell mode runs N episodes of one policy and writes one CSV row per
episode plus an aggregate row.  Sweep mode crosses network size / dynamic
level / flow count axes with a list of policies and writes one aggregate row
per cell.  Every policy in a sweep faces identical network realizations:
episode seeds are derived from (base seed, axis values, episode index) only.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import statistics
import sys
from pathlib import Path

from .config import (FlowSpec, SimConfig, benchmark_config, config_from_dict,
                     config_to_dict, load_config)
from .engine import run_episode
from .policy import PolicySpec, load_weights
from .rng import Rng, fork_rng

POLICY_FLAGS = {"cq+": "cq_plus", "hard-cq+": "cq_plus_hard", "neural": "neural"}

EPISODE_COLUMNS = [
    "policy", "nodes", "flows", "dynamic_scale", "episode", "seed", "slots_run",
    "generated", "delivered", "duplicates", "dropped", "residual",
    "transmissions", "acks", "broadcasts", "unicasts",
    "goodput", "overhead", "broadcast_rate", "mean_delay_slots", "mean_hops",
    "goodput_std", "overhead_std", "broadcast_rate_std", "delay_std", "hops_std",
]

SWEEP_COLUMNS = [
    "policy", "nodes", "flows", "dynamic_scale", "episodes",
    "goodput_mean", "goodput_std", "overhead_mean", "overhead_std",
    "broadcast_rate_mean", "broadcast_rate_std",
    "mean_delay_slots", "delay_std", "mean_hops", "hops_std",
]


def cell_seed(base_seed: int, nodes: int, flows: int, dynamic: float, episode: int) -> int:
    """Deterministic per-episode seed, shared across policies."""
    tag = f"{base_seed}|{nodes}|{flows}|{dynamic!r}|{episode}".encode()
    return int.from_bytes(hashlib.sha256(tag).digest()[:8], "little")


def _fmt(value) -> str:
    if value is None or value == "":
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row(values: dict, columns: list[str]) -> str:
    return ",".join(_fmt(values.get(c, "")) for c in columns)


def make_cell_config(base: SimConfig, nodes: int, flow_count: int,
                     dynamic: float, seed: int) -> SimConfig:
    """Instantiate one sweep cell: resize the network, rescale mobility, and
    draw any extra flow endpoints deterministically from the episode seed."""
    cfg = config_from_dict(config_to_dict(base))
    cfg.node_count = nodes
    cfg.mobility.dynamic_scale = dynamic
    cfg.seed = seed
    if nodes == base.node_count and flow_count == len(base.flows):
        cfg.flows = [FlowSpec(f.source, f.destination, f.packets_per_slot)
                     for f in base.flows]
    else:
        rate = base.flows[0].packets_per_slot if base.flows else 1.0
        flows = [FlowSpec(source=0, destination=nodes - 1, packets_per_slot=rate)]
        rng = fork_rng(Rng.from_seed(seed), "flows")
        while len(flows) < flow_count:
            src = int(rng.integers(0, nodes))
            dst = int(rng.integers(0, nodes))
            if src != dst:
                flows.append(FlowSpec(source=src, destination=dst, packets_per_slot=rate))
        cfg.flows = flows
    cfg.policy = PolicySpec(kind=base.policy.kind, epsilon=base.policy.epsilon,
                            weights=base.policy.weights,
                            weights_file=base.policy.weights_file)
    return cfg


def run_cell(base: SimConfig, policy_kind: str, nodes: int, flow_count: int,
             dynamic: float, episodes: int, base_seed: int,
             transition_log=None) -> list[dict]:
    rows = []
    for ep in range(episodes):
        seed = cell_seed(base_seed, nodes, flow_count, dynamic, ep)
        cfg = make_cell_config(base, nodes, flow_count, dynamic, seed)
        cfg.policy.kind = policy_kind
        metrics = run_episode(cfg, transition_log=transition_log)
        s = metrics.summarize(nodes)
        rows.append({
            "policy": policy_kind, "nodes": nodes, "flows": flow_count,
            "dynamic_scale": dynamic, "episode": ep, "seed": seed,
            "slots_run": s["slots_run"], "generated": s["generated"],
            "delivered": s["delivered"], "duplicates": s["duplicates_at_destination"],
            "dropped": s["dropped"], "residual": s["residual"],
            "transmissions": s["transmissions"], "acks": s["acks_returned"],
            "broadcasts": s["broadcasts"], "unicasts": s["unicasts"],
            "goodput": s["goodput"], "overhead": s["overhead"],
            "broadcast_rate": s["broadcast_rate"],
            "mean_delay_slots": s["mean_delay_slots"], "mean_hops": s["mean_hops"],
        })
    return rows


def _agg(rows: list[dict], key: str) -> tuple[float | None, float | None]:
    vals = [r[key] for r in rows if r[key] is not None]
    if not vals:
        return None, None
    return statistics.fmean(vals), statistics.pstdev(vals)


def write_run_csv(rows: list[dict], out) -> None:
    out.write(",".join(EPISODE_COLUMNS) + "\n")
    for r in rows:
        out.write(_row(r, EPISODE_COLUMNS) + "\n")
    means = {}
    for key, mkey, skey in (("goodput", "goodput", "goodput_std"),
                            ("overhead", "overhead", "overhead_std"),
                            ("broadcast_rate", "broadcast_rate", "broadcast_rate_std"),
                            ("mean_delay_slots", "mean_delay_slots", "delay_std"),
                            ("mean_hops", "mean_hops", "hops_std")):
        mean, std = _agg(rows, key)
        means[mkey] = mean
        means[skey] = std
    first = rows[0]
    agg = {"policy": first["policy"], "nodes": first["nodes"], "flows": first["flows"],
           "dynamic_scale": first["dynamic_scale"], "episode": "mean", **means}
    out.write(_row(agg, EPISODE_COLUMNS) + "\n")


def write_sweep_csv(cells: list[dict], out) -> None:
    out.write(",".join(SWEEP_COLUMNS) + "\n")
    for c in cells:
        out.write(_row(c, SWEEP_COLUMNS) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cqsim", description=__doc__)
    p.add_argument("--config", help="base config JSON (default: built-in benchmark)")
    p.add_argument("--policy", default="cq+",
                   help="policy, or comma list for sweeps: cq+ | hard-cq+ | neural")
    p.add_argument("--weights", help="weight file for the neural policy")
    p.add_argument("--episodes", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nodes", type=int, help="override network size")
    p.add_argument("--flows", type=int, help="override flow count")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--sweep-nodes", help="comma list of network sizes")
    p.add_argument("--sweep-flows", help="comma list of flow counts")
    p.add_argument("--sweep-dynamic", help="comma list of dynamic-level scales")
    p.add_argument("--log-transitions", help="JSONL per-decision transition log")
    p.add_argument("--log-trajectory", help="CSV mobility trace (slot,node,x,y,speed)")
    p.add_argument("--dump-tables", help="prefix for per-node C/H matrix CSV dumps "
                                         "(single-episode runs)")
    return p


def _parse_axis(text: str | None, cast) -> list | None:
    if text is None:
        return None
    values = [cast(v) for v in text.split(",") if v.strip() != ""]
    if not values:
        raise ValueError("empty sweep axis")
    return values


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        base = load_config(args.config) if args.config else benchmark_config()
        policies = []
        for flag in args.policy.split(","):
            flag = flag.strip()
            if flag not in POLICY_FLAGS:
                raise ValueError(f"unknown policy {flag!r} (choose from {sorted(POLICY_FLAGS)})")
            policies.append(POLICY_FLAGS[flag])
        if args.weights:
            path = Path(args.weights)
            if not path.exists():
                raise FileNotFoundError(f"weights not found: {path}")
            base.policy.weights = load_weights(json.loads(path.read_text()))
            base.policy.weights_file = str(path)
        if "neural" in policies and base.policy.weights is None:
            raise ValueError("neural policy requires --weights")

        nodes_axis = _parse_axis(args.sweep_nodes, int)
        flows_axis = _parse_axis(args.sweep_flows, int)
        dynamic_axis = _parse_axis(args.sweep_dynamic, float)
        sweeping = any(a is not None for a in (nodes_axis, flows_axis, dynamic_axis))

        base_nodes = args.nodes if args.nodes is not None else base.node_count
        base_flows = args.flows if args.flows is not None else max(1, len(base.flows))
        base_dynamic = base.mobility.dynamic_scale

        out = open(args.out, "w") if args.out else sys.stdout
        tlog = open(args.log_transitions, "w") if args.log_transitions else None
        trajlog = None
        try:
            if sweeping:
                cells = []
                for n in nodes_axis or [base_nodes]:
                    for f in flows_axis or [base_flows]:
                        for dyn in dynamic_axis or [base_dynamic]:
                            for pol in policies:
                                rows = run_cell(base, pol, n, f, dyn,
                                                args.episodes, args.seed,
                                                transition_log=tlog)
                                cell = {"policy": pol, "nodes": n, "flows": f,
                                        "dynamic_scale": dyn, "episodes": args.episodes}
                                for key, mkey, skey in (
                                        ("goodput", "goodput_mean", "goodput_std"),
                                        ("overhead", "overhead_mean", "overhead_std"),
                                        ("broadcast_rate", "broadcast_rate_mean",
                                         "broadcast_rate_std"),
                                        ("mean_delay_slots", "mean_delay_slots", "delay_std"),
                                        ("mean_hops", "mean_hops", "hops_std")):
                                    mean, std = _agg(rows, key)
                                    cell[mkey] = mean
                                    cell[skey] = std
                                cells.append(cell)
                write_sweep_csv(cells, out)
            else:
                if len(policies) != 1:
                    raise ValueError("single-cell runs take exactly one --policy")
                if args.log_trajectory:
                    trajlog = open(args.log_trajectory, "w")
                    trajlog.write("slot,node,x,y,speed\n")
                if args.dump_tables or args.log_trajectory:
                    rows = _run_instrumented(base, policies[0], base_nodes, base_flows,
                                             base_dynamic, args, tlog, trajlog)
                else:
                    rows = run_cell(base, policies[0], base_nodes, base_flows,
                                    base_dynamic, args.episodes, args.seed,
                                    transition_log=tlog)
                write_run_csv(rows, out)
        finally:
            if out is not sys.stdout:
                out.close()
            if tlog:
                tlog.close()
            if trajlog:
                trajlog.close()
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _run_instrumented(base, policy_kind, nodes, flows, dynamic, args, tlog, trajlog):
    """Single-episode path that also writes trajectory and table dumps."""
    from .engine import Engine
    seed = cell_seed(args.seed, nodes, flows, dynamic, 0)
    cfg = make_cell_config(base, nodes, flows, dynamic, seed)
    cfg.policy.kind = policy_kind
    eng = Engine(cfg, transition_log=tlog, trajectory_log=trajlog)
    metrics = eng.run()
    if args.dump_tables:
        ids = range(cfg.node_count)
        for node in eng.nodes:
            for kind in ("c", "h"):
                Path(f"{args.dump_tables}.node{node.id}.{kind}.csv").write_text(
                    node.table.matrix_csv(kind, ids))
    s = metrics.summarize(nodes)
    return [{
        "policy": policy_kind, "nodes": nodes, "flows": flows,
        "dynamic_scale": dynamic, "episode": 0, "seed": seed,
        "slots_run": s["slots_run"], "generated": s["generated"],
        "delivered": s["delivered"], "duplicates": s["duplicates_at_destination"],
        "dropped": s["dropped"], "residual": s["residual"],
        "transmissions": s["transmissions"], "acks": s["acks_returned"],
        "broadcasts": s["broadcasts"], "unicasts": s["unicasts"],
        "goodput": s["goodput"], "overhead": s["overhead"],
        "broadcast_rate": s["broadcast_rate"],
        "mean_delay_slots": s["mean_delay_slots"], "mean_hops": s["mean_hops"],
    }]


if __name__ == "__main__":
    raise SystemExit(main())
