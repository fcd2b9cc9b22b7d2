#!/usr/bin/env python3
"""Network-size generalization sweep.

Runs the configured policies across a range of network sizes with paired
episode seeds and writes a plot-ready CSV (one aggregate row per cell).

Usage: python3 scripts/sweep_network_sizes.py --out sizes.csv
       [--sizes 10,15,20,25,30] [--episodes 20] [--weights w.json]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cqsim import cli  # noqa: E402


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--sizes", default="10,15,20,25,30")
    ap.add_argument("--episodes", type=int, default=20)
    ap.add_argument("--slots", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--weights")
    args = ap.parse_args()

    argv = ["--policy", "cq+,hard-cq+" + (",neural" if args.weights else ""),
            "--episodes", str(args.episodes), "--seed", str(args.seed),
            "--sweep-nodes", args.sizes, "--out", args.out]
    if args.weights:
        argv += ["--weights", args.weights]

    import json
    import tempfile

    from cqsim import benchmark_config, save_config
    base = benchmark_config(traffic_slots=args.slots)
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
        cfg_path = f.name
    save_config(base, cfg_path)
    raise SystemExit(cli.main(["--config", cfg_path] + argv))


if __name__ == "__main__":
    main()
