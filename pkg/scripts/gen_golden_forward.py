#!/usr/bin/env python3
"""Generate the golden neural-inference fixture.

Writes tests/data/golden_weights.json from a closed-form pattern (no RNG)
and prints the forward-pass probabilities for the fixed observation,
computed with a pure-python reference that shares no code with the package.
Run once; the printed values are frozen into tests/test_policy.py.
"""

import json
import math
from pathlib import Path

LAYER_SIZES = [18, 16, 16, 8, 8, 4, 2]

GOLDEN_OBS = [0.9, 0.5, 0.0, 0.0,
              0.09375, 0.0625, 1.0, 1.0,
              0.1, -0.05, 0.0, 0.0,
              -0.03125, 0.0, 0.0, 0.0,
              1.0, 0.0]


def weight(layer: int, row: int, col: int) -> float:
    return round(0.4 * math.sin(1.7 * layer + 0.9 * row + 0.3 * col), 9)


def bias(layer: int, row: int) -> float:
    return round(0.1 * math.cos(layer + 0.5 * row), 9)


def build_document() -> dict:
    layers = []
    for l in range(len(LAYER_SIZES) - 1):
        n_in, n_out = LAYER_SIZES[l], LAYER_SIZES[l + 1]
        layers.append({
            "w": [[weight(l, r, c) for c in range(n_in)] for r in range(n_out)],
            "b": [bias(l, r) for r in range(n_out)],
            "activation": "tanh" if l < len(LAYER_SIZES) - 2 else "linear",
        })
    return {"k_neighbors": 4, "layer_sizes": LAYER_SIZES, "layers": layers,
            "output": "softmax-2"}


def reference_forward(doc: dict, obs: list) -> tuple[float, float]:
    x = list(obs)
    for layer in doc["layers"]:
        y = []
        for row, b in zip(layer["w"], layer["b"]):
            acc = b
            for wij, xj in zip(row, x):
                acc += wij * xj
            y.append(math.tanh(acc) if layer["activation"] == "tanh" else acc)
        x = y
    m = max(x)
    exps = [math.exp(v - m) for v in x]
    total = sum(exps)
    return exps[0] / total, exps[1] / total


def main() -> None:
    doc = build_document()
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "golden_weights.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc) + "\n")
    p_uc, p_bc = reference_forward(doc, GOLDEN_OBS)
    print(f"wrote {out}")
    print(f"p_unicast  = {p_uc!r}")
    print(f"p_broadcast = {p_bc!r}")


if __name__ == "__main__":
    main()
