#!/usr/bin/env python3
"""Compare routing policies on the 12-node benchmark topology.

Usage: python3 scripts/run_benchmark.py [--episodes 20] [--slots 3000]
                                        [--weights w.json] [--seed 0]
Prints an aggregate metrics table per policy; every policy sees the same
episode seeds, so the comparison is paired.
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cqsim import benchmark_config, load_weights  # noqa: E402
from cqsim.cli import run_cell, _agg  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--episodes", type=int, default=20)
    ap.add_argument("--slots", type=int, default=3000)
    ap.add_argument("--nodes", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--weights", help="add the neural policy with this weight file")
    args = ap.parse_args()

    base = benchmark_config(node_count=args.nodes, traffic_slots=args.slots)
    policies = ["cq_plus", "cq_plus_hard"]
    if args.weights:
        base.policy.weights = load_weights(json.loads(Path(args.weights).read_text()))
        policies.append("neural")

    print(f"{'policy':>14} {'goodput':>10} {'overhead':>10} {'bc_rate':>10} "
          f"{'delay':>8} {'hops':>6}")
    for pol in policies:
        rows = run_cell(base, pol, args.nodes, 1, 1.0, args.episodes, args.seed)
        gp, _ = _agg(rows, "goodput")
        oh, _ = _agg(rows, "overhead")
        bc, _ = _agg(rows, "broadcast_rate")
        dl, _ = _agg(rows, "mean_delay_slots")
        hp, _ = _agg(rows, "mean_hops")
        print(f"{pol:>14} {gp:>10.4f} {oh:>10.4f} {bc:>10.4f} {dl:>8.2f} {hp:>6.2f}")


if __name__ == "__main__":
    main()
