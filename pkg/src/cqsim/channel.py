"""Link success model and one-slot delivery semantics.

Links are perfect within the radio range R and decay exponentially beyond
it; transmissions in the same slot never interfere.  ACKs traverse the
reverse link with the same success probability (a missing ACK is what the
routing layer treats as failure), unless `ack_lossless` is set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .rng import Rng

UNICAST = "unicast"
BROADCAST = "broadcast"


@dataclass(frozen=True)
class ResolvedChannel:
    range_m: float
    falloff_m: float
    ack_lossless: bool = False


@dataclass
class TxOutcome:
    receivers: set[int]
    acks: set[int]          # receivers whose ACK would survive the reverse link
    mode: str


def link_success_prob(distance: float, ch: ResolvedChannel) -> float:
    if distance < 0:
        raise ValueError("distance must be >= 0")
    if distance <= ch.range_m:
        return 1.0
    return math.exp(-(distance - ch.range_m) / ch.falloff_m)


def transmit(sender: int, mode: str, target: int | None,
             positions: list[tuple[float, float]], ch: ResolvedChannel,
             rng: Rng) -> TxOutcome:
    """Resolve one transmission.

    Every candidate receiver succeeds independently with the link
    probability; each successful receiver's ACK makes an independent reverse
    trip.  Whether a receiver actually sends an ACK is the engine's call
    (loop drops stay silent); this only answers whether it would arrive.
    """
    if mode == UNICAST:
        if target is None or target == sender:
            raise ValueError("unicast requires a target distinct from the sender")
        candidates = [target]
    elif mode == BROADCAST:
        candidates = [n for n in range(len(positions)) if n != sender]
    else:
        raise ValueError(f"unknown transmit mode {mode!r}")

    sx, sy = positions[sender]
    receivers: set[int] = set()
    acks: set[int] = set()
    for r in candidates:
        rx, ry = positions[r]
        p = link_success_prob(math.hypot(rx - sx, ry - sy), ch)
        if p >= 1.0 or rng.random() < p:
            receivers.add(r)
            if ch.ack_lossless or p >= 1.0 or rng.random() < p:
                acks.add(r)
    return TxOutcome(receivers=receivers, acks=acks, mode=mode)
