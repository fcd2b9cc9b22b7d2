#!/usr/bin/env python3
"""Evaluate the neural policy forward pass on a batch of observations.

Usage: python3 scripts/eval_forward.py WEIGHTS.json OBSERVATIONS.json
OBSERVATIONS.json holds a list of observation vectors; the output is a JSON
list of [p_unicast, p_broadcast] pairs.  External trainers use this to check
that their own forward pass agrees with the simulator's.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cqsim import load_weights  # noqa: E402


def main() -> None:
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        raise SystemExit(2)
    weights = load_weights(json.loads(Path(sys.argv[1]).read_text()))
    observations = json.loads(Path(sys.argv[2]).read_text())
    probs = [list(weights.forward(obs)) for obs in observations]
    json.dump(probs, sys.stdout)
    print()


if __name__ == "__main__":
    main()
