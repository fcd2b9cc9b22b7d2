"""Packet data model.

A packet is identified by a globally unique id; forwarding creates per-node
copies that share the id (duplicate detection and delivery counting key on
it) while each copy carries its own traversal trace.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import FlowSpec


@dataclass(frozen=True)
class Packet:
    packet_id: int
    flow: FlowSpec
    created_slot: int
    path_trace: tuple[int, ...]
    hop_count: int

    @classmethod
    def fresh(cls, packet_id: int, flow: FlowSpec, created_slot: int) -> "Packet":
        return cls(packet_id, flow, created_slot, (flow.source,), 0)

    def hop_to(self, node_id: int) -> "Packet":
        """Copy held by `node_id` after one more hop."""
        return Packet(
            self.packet_id,
            self.flow,
            self.created_slot,
            self.path_trace + (node_id,),
            self.hop_count + 1,
        )

    def visited(self, node_id: int) -> bool:
        return node_id in self.path_trace
