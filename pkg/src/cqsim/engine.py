"""Per-slot episode loop.

One slot = one packet duration.  Each slot: (1) mobility tick, (2) traffic
generation into source queues, (3) every node holding traffic pops its head
packet, picks broadcast or unicast via the configured policy, and transmits;
receptions are resolved (loops dropped silently, duplicates dropped but
ACKed, fresh packets enqueued and ACKed, arrivals at the destination
delivered and ACKed with full confidence), and each returned ACK updates the
sender's routing table — zero ACKs decay it; (4) rewards and metrics are
accumulated.  After the traffic horizon the loop drains remaining queues up
to a slot cap.

The loop can also run externally driven: it pauses at each slot's decision
point, hands out per-node observations, and resumes once actions are
supplied (this is what the environment server wraps).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from . import channel, mobility, policy
from .config import SimConfig, validate_config
from .cqtable import CqTable
from .packet import Packet
from .rng import Rng, fork_rng


@dataclass
class NodeState:
    id: int
    kin: mobility.NodeKinematics
    table: CqTable
    queue: deque[Packet] = field(default_factory=deque)
    seen: set[int] = field(default_factory=set)
    arrival_mode: dict[int, int] = field(default_factory=dict)   # packet id -> how it got here
    last_action: dict[int, int] = field(default_factory=dict)    # destination -> previous action


@dataclass
class EpisodeMetrics:
    generated: int = 0
    delivered: int = 0
    duplicates_at_destination: int = 0
    dropped: int = 0
    residual: int = 0
    transmissions: int = 0
    acks_returned: int = 0
    broadcasts: int = 0
    unicasts: int = 0
    ttl_drops: int = 0
    slots_run: int = 0
    delay_slots: list[int] = field(default_factory=list)
    hop_counts: list[int] = field(default_factory=list)
    broadcasts_by_slot: list[int] = field(default_factory=list)
    unicasts_by_slot: list[int] = field(default_factory=list)
    reward_total_by_node: dict[int, float] = field(default_factory=dict)

    def summarize(self, node_count: int) -> dict:
        decisions = self.broadcasts + self.unicasts
        delivered = self.delivered
        return {
            "generated": self.generated,
            "delivered": delivered,
            "duplicates_at_destination": self.duplicates_at_destination,
            "dropped": self.dropped,
            "residual": self.residual,
            "transmissions": self.transmissions,
            "acks_returned": self.acks_returned,
            "broadcasts": self.broadcasts,
            "unicasts": self.unicasts,
            "slots_run": self.slots_run,
            "goodput": (delivered / self.generated) if self.generated else 0.0,
            "overhead": (self.transmissions / (node_count * delivered)) if delivered else None,
            "broadcast_rate": (self.broadcasts / decisions) if decisions else 0.0,
            "mean_delay_slots": (sum(self.delay_slots) / delivered) if delivered else None,
            "mean_hops": (sum(self.hop_counts) / delivered) if delivered else None,
        }


@dataclass
class DecisionRequest:
    node: int
    destination: int
    obs: policy.Observation
    c_best: float
    j_star: int


def compute_reward1(action: int, c_best: float, epsilon: float) -> float:
    """Immediate uncertainty reward: unicast pays off in proportion to the
    confidence of the best route, broadcast in proportion to its uncertainty."""
    if not (0.0 <= c_best <= 1.0):
        raise ValueError("c_best must be in [0, 1]")
    stake = c_best * (1.0 - epsilon)
    return 1.0 - stake if action == policy.BROADCAST else stake


def compute_reward2(contributed: bool, transmitted: bool, acks: int,
                    cfg_reward, node_count: int) -> float:
    """Overhead-aware reward: credit delivery contributions, penalize dead
    transmissions and the packet copies each ACK represents."""
    r = 0.0
    if contributed:
        r += cfg_reward.w1
    if transmitted and acks == 0:
        r -= cfg_reward.w2
    r -= cfg_reward.w3 * acks / node_count
    return r


class Engine:
    """One episode.  Native mode: `run()`.  Externally driven mode:
    `start()` then repeated `apply_actions()` until `done`."""

    def __init__(self, cfg: SimConfig, transition_log=None, trajectory_log=None):
        problems = validate_config(cfg)
        if problems:
            raise ValueError("invalid config: " + "; ".join(problems))
        self.cfg = cfg
        root = Rng.from_seed(cfg.seed)
        self._rng_mobility = fork_rng(root, "mobility")
        self._rng_channel = fork_rng(root, "channel")
        self._rng_traffic = fork_rng(root, "traffic")
        self._rng_policy = fork_rng(root, "policy")
        self._rng_order = fork_rng(root, "order")

        kins, self.regions, self.region_of = mobility.initial_kinematics(cfg, self._rng_mobility)
        self.nodes = [
            NodeState(id=i, kin=kins[i],
                      table=CqTable(i, decay=cfg.cq.decay, c_init=cfg.cq.c_init,
                                    h_init=cfg.h_init))
            for i in range(cfg.node_count)
        ]
        self._channel = channel.ResolvedChannel(
            range_m=cfg.channel_range, falloff_m=cfg.channel_falloff,
            ack_lossless=cfg.channel.ack_lossless)
        self.metrics = EpisodeMetrics(
            reward_total_by_node={i: 0.0 for i in range(cfg.node_count)})
        self.slot = 0
        self.done = False
        self._next_packet_id = 0
        self._delivered_ids: set[int] = set()
        self._transition_log = transition_log
        self._trajectory_log = trajectory_log
        # per-slot event scratch
        self._slot_tx: dict[int, int] = {}        # node -> acks received this slot
        self._slot_actions: dict[int, tuple[int, float]] = {}   # node -> (action, c_best)
        self._slot_delivery_credit: set[int] = set()
        self._pending: list[DecisionRequest] = []
        self._pending_rewards: dict[int, float] = {}

    # -- helpers ---------------------------------------------------------------

    def positions(self) -> list[tuple[float, float]]:
        return [(n.kin.x, n.kin.y) for n in self.nodes]

    def _others(self, node_id: int) -> list[int]:
        return [n for n in range(self.cfg.node_count) if n != node_id]

    def queues_empty(self) -> bool:
        return all(not n.queue for n in self.nodes)

    # -- slot phases -------------------------------------------------------------

    def _begin_slot(self) -> None:
        self.slot += 1
        self._slot_tx.clear()
        self._slot_actions.clear()
        self._slot_delivery_credit.clear()
        cfg = self.cfg
        if cfg.mobility.model != mobility.STATIC:
            dt = cfg.mobility_tick
            ticks = max(1, round(cfg.slot_seconds / dt))
            for _ in range(ticks):
                for n in self.nodes:
                    n.kin = mobility.step(n.kin, cfg.mobility, self._rng_mobility,
                                          self.regions[n.kin.region], dt)
        if self._trajectory_log is not None:
            for n in self.nodes:
                self._trajectory_log.write(
                    f"{self.slot},{n.id},{n.kin.x!r},{n.kin.y!r},{n.kin.speed!r}\n")
        if self.slot <= cfg.traffic_slots:
            for flow in cfg.flows:
                count = int(flow.packets_per_slot)
                frac = flow.packets_per_slot - count
                if frac > 0.0 and self._rng_traffic.random() < frac:
                    count += 1
                src = self.nodes[flow.source]
                for _ in range(count):
                    pkt = Packet.fresh(self._next_packet_id, flow, self.slot)
                    self._next_packet_id += 1
                    self.metrics.generated += 1
                    src.queue.append(pkt)
                    src.seen.add(pkt.packet_id)
                    src.arrival_mode[pkt.packet_id] = policy.NONE_YET

    def _decision_order(self) -> list[int]:
        order = [n.id for n in self.nodes if n.queue]
        if self.cfg.shuffle_node_order and order:
            order = [order[i] for i in self._rng_order.permutation(len(order))]
        return order

    def _collect_requests(self) -> list[DecisionRequest]:
        cfg = self.cfg
        requests = []
        for node_id in self._decision_order():
            node = self.nodes[node_id]
            pkt = node.queue[0]
            d = pkt.flow.destination
            j_star = node.table.best_next_hop(d, self._others(node_id))
            c_best = node.table.c(j_star, d)
            arrival = node.arrival_mode.get(pkt.packet_id, policy.NONE_YET)
            if cfg.upstream_prev_action:
                prev = arrival
            else:
                prev = node.last_action.get(d, policy.NONE_YET)
            obs = policy.build_observation(node.table, d, cfg.k_neighbors, cfg.h_cap,
                                           prev_action=prev, arrival_mode=arrival)
            requests.append(DecisionRequest(node=node_id, destination=d, obs=obs,
                                            c_best=c_best, j_star=j_star))
        return requests

    def _apply_actions(self, actions: dict[int, int]) -> None:
        cfg = self.cfg
        positions = self.positions()  # frozen for the slot; mobility ticks at slot start
        for req in self._pending:
            action = actions[req.node]
            node = self.nodes[req.node]
            pkt = node.queue.popleft()
            node.arrival_mode.pop(pkt.packet_id, None)
            d = pkt.flow.destination
            node.last_action[d] = action
            self._slot_actions[req.node] = (action, req.c_best)

            mode = channel.BROADCAST if action == policy.BROADCAST else channel.UNICAST
            outcome = channel.transmit(req.node, mode, req.j_star, positions,
                                       self._channel, self._rng_channel)
            self.metrics.transmissions += 1
            if action == policy.BROADCAST:
                self.metrics.broadcasts += 1
                self.metrics.broadcasts_by_slot[-1] += 1
            else:
                self.metrics.unicasts += 1
                self.metrics.unicasts_by_slot[-1] += 1

            acked: list[tuple[int, object]] = []
            for r in sorted(outcome.receivers):
                ack = self._receive(r, pkt, mode)
                if ack is not None and r in outcome.acks:
                    acked.append((r, ack))
            if acked:
                for r, ack in acked:
                    node.table.update_on_ack(r, d, ack)
            else:
                node.table.update_on_failure(req.j_star, d)
            self.metrics.acks_returned += len(acked)
            self._slot_tx[req.node] = len(acked)

    def _receive(self, receiver: int, pkt: Packet, mode: str):
        """Resolve one reception; returns the ACK values to send back, or None
        for silent drops."""
        node = self.nodes[receiver]
        d = pkt.flow.destination
        if receiver == d:
            if pkt.packet_id in self._delivered_ids:
                self.metrics.duplicates_at_destination += 1
            else:
                self._delivered_ids.add(pkt.packet_id)
                self.metrics.delivered += 1
                self.metrics.delay_slots.append(self.slot - pkt.created_slot)
                self.metrics.hop_counts.append(pkt.hop_count + 1)
                self._slot_delivery_credit.update(pkt.path_trace)
            return node.table.make_ack(d, self._others(receiver), is_destination=True)
        if pkt.visited(receiver):
            return None
        if pkt.hop_count + 1 > self.cfg.ttl_cap:
            self.metrics.ttl_drops += 1
            return None
        if pkt.packet_id in node.seen:
            if not self.cfg.cq.ack_duplicates:
                return None
            return node.table.make_ack(d, self._others(receiver))
        hopped = pkt.hop_to(receiver)
        node.queue.append(hopped)
        node.seen.add(pkt.packet_id)
        node.arrival_mode[pkt.packet_id] = (
            policy.BROADCAST if mode == channel.BROADCAST else policy.UNICAST)
        return node.table.make_ack(d, self._others(receiver))

    def _end_slot(self) -> None:
        cfg = self.cfg
        rewards: dict[int, float] = {}
        if cfg.reward.kind == "reward1":
            for node_id, (action, c_best) in self._slot_actions.items():
                rewards[node_id] = compute_reward1(action, c_best, cfg.policy.epsilon)
        else:
            for node_id in range(cfg.node_count):
                r = compute_reward2(
                    contributed=node_id in self._slot_delivery_credit,
                    transmitted=node_id in self._slot_tx,
                    acks=self._slot_tx.get(node_id, 0),
                    cfg_reward=cfg.reward, node_count=cfg.node_count)
                if r != 0.0 or node_id in self._slot_actions:
                    rewards[node_id] = r
        for node_id, r in rewards.items():
            self.metrics.reward_total_by_node[node_id] += r
            self._pending_rewards[node_id] = self._pending_rewards.get(node_id, 0.0) + r
        self.metrics.slots_run = self.slot

        if self._transition_log is not None:
            for req in self._pending:
                action, c_best = self._slot_actions[req.node]
                self._transition_log.write(json.dumps({
                    "slot": self.slot, "node": req.node, "destination": req.destination,
                    "obs": req.obs.as_vector(), "action": action, "c_best": c_best,
                    "reward": rewards.get(req.node, 0.0), "done": False,
                }) + "\n")

        if self.slot >= cfg.traffic_slots and self.queues_empty():
            self._finish()
        elif self.slot >= cfg.traffic_slots + cfg.drain_cap:
            self._finish()

    def _finish(self) -> None:
        self.done = True
        residual_ids = {p.packet_id for n in self.nodes for p in n.queue}
        residual_ids -= self._delivered_ids
        self.metrics.residual = len(residual_ids)
        self.metrics.dropped = (self.metrics.generated - self.metrics.delivered
                                - self.metrics.residual)
        if self._transition_log is not None:
            self._transition_log.write(json.dumps({
                "slot": self.slot, "done": True,
                "info": self.metrics.summarize(self.cfg.node_count),
            }) + "\n")

    # -- drivers -------------------------------------------------------------

    def _advance_to_decisions(self) -> list[DecisionRequest]:
        """Run slots until one has pending decisions or the episode ends."""
        while not self.done:
            self._begin_slot()
            self.metrics.broadcasts_by_slot.append(0)
            self.metrics.unicasts_by_slot.append(0)
            self._pending = self._collect_requests()
            if self._pending:
                return self._pending
            self._end_slot()
        return []

    def start(self) -> list[DecisionRequest]:
        """Begin external driving; returns the first slot's decision requests."""
        if self.slot != 0:
            raise RuntimeError("episode already started")
        return self._advance_to_decisions()

    def take_rewards(self) -> dict[int, float]:
        """Drain rewards accumulated since the previous drain (covers every
        slot executed in between, decision-less ones included)."""
        out = self._pending_rewards
        self._pending_rewards = {}
        return out

    def apply_actions(self, actions: dict[int, int]) -> list[DecisionRequest]:
        """Supply actions for the outstanding requests and advance to the next
        decision point (or the episode end).  Returns the new requests."""
        if self.done:
            raise RuntimeError("episode finished")
        want = {r.node for r in self._pending}
        got = set(actions)
        if want != got:
            missing, extra = sorted(want - got), sorted(got - want)
            raise KeyError(f"actions do not match outstanding requests "
                           f"(missing {missing}, unexpected {extra})")
        for node_id, action in actions.items():
            if action not in (policy.UNICAST, policy.BROADCAST):
                raise ValueError(f"invalid action {action!r} for node {node_id}")
        self._apply_actions(actions)
        self._end_slot()
        self._pending = []
        if self.done:
            return []
        return self._advance_to_decisions()

    def run(self) -> EpisodeMetrics:
        """Native episode: decisions come from the configured policy."""
        requests = self.start()
        while not self.done:
            actions = {
                req.node: self.cfg.policy.decide(req.c_best, req.obs, self._rng_policy)
                for req in requests
            }
            requests = self.apply_actions(actions)
        return self.metrics


def run_episode(cfg: SimConfig, transition_log=None, trajectory_log=None) -> EpisodeMetrics:
    return Engine(cfg, transition_log=transition_log, trajectory_log=trajectory_log).run()
