"""Per-node confidence/hop-estimate routing state.

Each node i keeps two sparse matrices keyed by (next-hop j, destination d):

  c(i,j,d) in [0, 1]   confidence that routing to d via j behaves as estimated
  h(i,j,d) >= 1        estimated hop count from i to d through j

Unvisited pairs report the initialization values (c_init, h_init).  ACKs
carry (c_ack, h_ack) back from the receiving node; successful updates blend
them in with an exponential moving average whose hop-estimate gain

  alpha = max(c_ack, 1 - c(i,j,d))

adapts to how confident either side is.  Missing ACKs decay confidence and
leave the hop estimate untouched.
"""

from __future__ import annotations

import io
from dataclasses import dataclass


@dataclass(frozen=True)
class AckValues:
    c_ack: float
    h_ack: float


def route_key(c: float, h: float) -> float:
    """Uncertainty-weighted path cost; lower is better."""
    return h * (1.0 - c)


class CqTable:
    def __init__(self, owner: int, decay: float = 0.1,
                 c_init: float = 0.0, h_init: float = 32.0):
        if not (0.0 < decay < 1.0):
            raise ValueError("decay must be in (0, 1)")
        self.owner = owner
        self.decay = decay
        self.c_init = c_init
        self.h_init = h_init
        self._c: dict[tuple[int, int], float] = {}
        self._h: dict[tuple[int, int], float] = {}
        # previous normalized top-K rows per destination, for delta features
        self.prev_top: dict[int, tuple[list[float], list[float]]] = {}

    # -- lookups -------------------------------------------------------------

    def c(self, j: int, d: int) -> float:
        return self._c.get((j, d), self.c_init)

    def h(self, j: int, d: int) -> float:
        return self._h.get((j, d), self.h_init)

    def known(self, d: int) -> list[int]:
        """Next-hops with a stored entry toward d, ascending."""
        return sorted(j for (j, dd) in self._c if dd == d)

    def _check_keys(self, j: int, d: int) -> None:
        if j == self.owner or d == self.owner:
            raise ValueError("table entries never reference the owning node")

    # -- selection -------------------------------------------------------------

    def best_next_hop(self, d: int, candidates) -> int | None:
        """argmin over candidates of h*(1-c); ties break to the lowest node id."""
        best, best_key = None, None
        for j in sorted(candidates):
            k = route_key(self.c(j, d), self.h(j, d))
            if best_key is None or k < best_key:
                best, best_key = j, k
        return best

    def make_ack(self, d: int, candidates, is_destination: bool = False) -> AckValues:
        """ACK values this node returns for a packet headed to d.

        At the destination both values are 1 (full confidence, one hop away).
        Otherwise they quote the node's own best route estimate.
        """
        if is_destination:
            return AckValues(1.0, 1.0)
        k_hat = self.best_next_hop(d, candidates)
        if k_hat is None:
            return AckValues(self.c_init, 1.0 + self.h_init)
        return AckValues(self.c(k_hat, d), 1.0 + self.h(k_hat, d))

    # -- updates -------------------------------------------------------------

    def update_on_ack(self, j: int, d: int, ack: AckValues) -> None:
        self._check_keys(j, d)
        c_t = self.c(j, d)
        h_t = self.h(j, d)
        alpha = max(ack.c_ack, 1.0 - c_t)
        h_next = (1.0 - alpha) * h_t + alpha * ack.h_ack
        c_next = (1.0 - self.decay) * c_t + self.decay * ack.c_ack
        self._h[(j, d)] = max(1.0, h_next)
        self._c[(j, d)] = min(1.0, max(0.0, c_next))

    def update_on_failure(self, j: int, d: int) -> None:
        """Transmission produced no ACK: decay confidence, keep the hop estimate."""
        self._check_keys(j, d)
        c_next = (1.0 - self.decay) * self.c(j, d)
        self._c[(j, d)] = min(1.0, max(0.0, c_next))
        self._h.setdefault((j, d), self.h_init)

    # -- feature extraction -----------------------------------------------------

    def top_k(self, d: int, k: int) -> list[tuple[int | None, float, float]]:
        """Best k known rows toward d, ascending by h*(1-c), ties by node id.

        Always returns exactly k rows; missing rows are padded with synthetic
        entries at the initialization values (node id None).
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        rows = [(j, self.c(j, d), self.h(j, d)) for j in self.known(d)]
        rows.sort(key=lambda r: (route_key(r[1], r[2]), r[0]))
        rows = rows[:k]
        while len(rows) < k:
            rows.append((None, self.c_init, self.h_init))
        return rows

    # -- inspection -------------------------------------------------------------

    def matrix_csv(self, kind: str, node_ids) -> str:
        """CSV dump of the C or H matrix: rows = next-hop j, columns = destination d."""
        if kind not in ("c", "h"):
            raise ValueError("kind must be 'c' or 'h'")
        get = self.c if kind == "c" else self.h
        ids = [n for n in sorted(node_ids) if n != self.owner]
        buf = io.StringIO()
        buf.write("next_hop\\dest," + ",".join(str(d) for d in ids) + "\n")
        for j in ids:
            buf.write(str(j) + "," + ",".join(repr(get(j, d)) for d in ids) + "\n")
        return buf.getvalue()
