"""Broadcast/unicast decision policies.

Three interchangeable policies over the same per-node routing state:

  cq_plus       stochastic rule, broadcast with probability 1 - c*(1-eps)
  cq_plus_hard  its zero-horizon deterministic counterpart (threshold at 1/2)
  neural        feed-forward net over a fixed-width observation vector

The observation packs the best-K table rows (confidence, normalized hop
estimate), their change since the previous decision, the node's previous
action, and how the packet being routed arrived.  Its width 4K+2 is
independent of the network size, which is what lets one trained policy run
on any number of nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cqtable import CqTable
from .rng import Rng

UNICAST = 0
BROADCAST = 1
NONE_YET = -1  # no previous action / locally generated packet

_ACTIVATIONS = ("tanh", "linear")


@dataclass
class Observation:
    c_top: list[float]
    h_top: list[float]
    dc_top: list[float]
    dh_top: list[float]
    prev_action: int
    arrival_mode: int

    def as_vector(self) -> list[float]:
        return (list(self.c_top) + list(self.h_top) + list(self.dc_top)
                + list(self.dh_top) + [float(self.prev_action), float(self.arrival_mode)])

    @property
    def width(self) -> int:
        return 4 * len(self.c_top) + 2


def build_observation(table: CqTable, d: int, k: int, h_cap: float,
                      prev_action: int, arrival_mode: int) -> Observation:
    """Assemble the policy input for a decision at `table.owner` toward d.

    Hop estimates are clipped to [1, h_cap] and divided by h_cap so they stay
    in (0, 1] for any network size.  Deltas compare against the snapshot taken
    at this node's previous decision for d (zeros on the first one); the
    snapshot is refreshed as a side effect.
    """
    rows = table.top_k(d, k)
    c_top = [c for (_, c, _) in rows]
    h_top = [min(max(h, 1.0), h_cap) / h_cap for (_, _, h) in rows]
    prev = table.prev_top.get(d)
    if prev is None:
        dc = [0.0] * k
        dh = [0.0] * k
    else:
        pc, ph = prev
        dc = [a - b for a, b in zip(c_top, pc)]
        dh = [a - b for a, b in zip(h_top, ph)]
    table.prev_top[d] = (c_top, h_top)
    return Observation(c_top, h_top, dc, dh, prev_action, arrival_mode)


# -- rule-based policies -----------------------------------------------------

def broadcast_probability(c_best: float, epsilon: float) -> float:
    """P(broadcast) = eps + (1-eps)*(1-c) = 1 - c*(1-eps)."""
    return 1.0 - c_best * (1.0 - epsilon)


def decide_cq_plus(c_best: float, epsilon: float, rng: Rng) -> int:
    if not (0.0 <= c_best <= 1.0):
        raise ValueError("c_best must be in [0, 1]")
    return BROADCAST if rng.random() < broadcast_probability(c_best, epsilon) else UNICAST


def decide_cq_plus_hard(c_best: float, epsilon: float) -> int:
    """Zero-horizon optimum of the uncertainty reward: broadcast iff
    c*(1-eps) < 1/2, unicast on the exact tie."""
    if not (0.0 <= c_best <= 1.0):
        raise ValueError("c_best must be in [0, 1]")
    return BROADCAST if c_best * (1.0 - epsilon) < 0.5 else UNICAST


# -- neural policy -----------------------------------------------------------

class WeightLoadError(ValueError):
    pass


@dataclass
class PolicyLayer:
    w: np.ndarray        # (out, in), row-major over output units
    b: np.ndarray        # (out,)
    activation: str


@dataclass
class PolicyWeights:
    layer_sizes: list[int]
    layers: list[PolicyLayer]
    k_neighbors: int | None = None

    def forward(self, vec) -> tuple[float, float]:
        """(p_unicast, p_broadcast) for one observation vector."""
        x = np.asarray(vec, dtype=np.float64)
        if x.shape != (self.layer_sizes[0],):
            raise WeightLoadError(
                f"observation width {x.shape} does not match input layer "
                f"({self.layer_sizes[0]})")
        for layer in self.layers:
            x = layer.w @ x + layer.b
            if layer.activation == "tanh":
                x = np.tanh(x)
        z = x - x.max()                      # stable 2-way softmax
        e = np.exp(z)
        p = e / e.sum()
        return float(p[0]), float(p[1])


def decide_neural(spec: "PolicySpec", obs: Observation, rng: Rng) -> int:
    if spec.weights is None:
        raise ValueError("neural policy requires weights")
    _, p_bc = spec.weights.forward(obs.as_vector())
    return BROADCAST if rng.random() < p_bc else UNICAST


def load_weights(doc: dict) -> PolicyWeights:
    """Parse and validate the portable weight-file document.

    Schema: {"k_neighbors": int, "layer_sizes": [ints],
             "layers": [{"w": [[...]], "b": [...], "activation": "tanh"|"linear"}],
             "output": "softmax-2"}
    """
    if not isinstance(doc, dict):
        raise WeightLoadError("weight document must be a JSON object")
    for key in ("layer_sizes", "layers", "output"):
        if key not in doc:
            raise WeightLoadError(f"missing field {key!r}")
    if doc["output"] != "softmax-2":
        raise WeightLoadError(f"unsupported output head {doc['output']!r}")
    sizes = [int(s) for s in doc["layer_sizes"]]
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise WeightLoadError("layer_sizes must chain at least input -> output, all >= 1")
    if sizes[-1] != 2:
        raise WeightLoadError("output layer must have width 2")
    raw_layers = doc["layers"]
    if len(raw_layers) != len(sizes) - 1:
        raise WeightLoadError(
            f"{len(sizes)} layer sizes imply {len(sizes) - 1} layers, got {len(raw_layers)}")
    layers: list[PolicyLayer] = []
    for i, raw in enumerate(raw_layers):
        n_in, n_out = sizes[i], sizes[i + 1]
        act = raw.get("activation", "tanh")
        if act not in _ACTIVATIONS:
            raise WeightLoadError(f"layer {i}: unknown activation {act!r}")
        w = np.asarray(raw["w"], dtype=np.float64)
        b = np.asarray(raw["b"], dtype=np.float64)
        if w.shape != (n_out, n_in):
            raise WeightLoadError(f"layer {i}: weight shape {w.shape} != ({n_out}, {n_in})")
        if b.shape != (n_out,):
            raise WeightLoadError(f"layer {i}: bias length {b.shape} != ({n_out},)")
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise WeightLoadError(f"layer {i}: non-finite value")
        layers.append(PolicyLayer(w=w, b=b, activation=act))
    k = doc.get("k_neighbors")
    return PolicyWeights(layer_sizes=sizes, layers=layers,
                         k_neighbors=None if k is None else int(k))


def save_weights(weights: PolicyWeights) -> dict:
    return {
        "k_neighbors": weights.k_neighbors,
        "layer_sizes": list(weights.layer_sizes),
        "layers": [
            {"w": layer.w.tolist(), "b": layer.b.tolist(), "activation": layer.activation}
            for layer in weights.layers
        ],
        "output": "softmax-2",
    }


def init_weights(k_neighbors: int, hidden: tuple[int, ...] = (16, 16, 8, 8, 4),
                 rng: Rng | None = None, scale: float = 0.5) -> PolicyWeights:
    """Fresh network of the standard shape; small random weights unless rng is None."""
    sizes = [4 * k_neighbors + 2, *hidden, 2]
    layers = []
    for i in range(len(sizes) - 1):
        n_in, n_out = sizes[i], sizes[i + 1]
        if rng is None:
            w = np.zeros((n_out, n_in))
            b = np.zeros(n_out)
        else:
            w = rng.normal(0.0, scale / np.sqrt(n_in), size=(n_out, n_in))
            b = np.zeros(n_out)
        act = "tanh" if i < len(sizes) - 2 else "linear"
        layers.append(PolicyLayer(w=w, b=np.asarray(b, dtype=np.float64), activation=act))
    return PolicyWeights(layer_sizes=sizes, layers=layers, k_neighbors=k_neighbors)


# -- the selector ------------------------------------------------------------

CQ_PLUS = "cq_plus"
CQ_PLUS_HARD = "cq_plus_hard"
NEURAL = "neural"


@dataclass
class PolicySpec:
    kind: str = CQ_PLUS
    epsilon: float = 0.05
    weights: PolicyWeights | None = field(default=None, repr=False)
    weights_file: str | None = None

    def decide(self, c_best: float, obs: Observation, rng: Rng) -> int:
        if self.kind == CQ_PLUS:
            return decide_cq_plus(c_best, self.epsilon, rng)
        if self.kind == CQ_PLUS_HARD:
            return decide_cq_plus_hard(c_best, self.epsilon)
        if self.kind == NEURAL:
            return decide_neural(self, obs, rng)
        raise ValueError(f"unknown policy kind {self.kind!r}")
