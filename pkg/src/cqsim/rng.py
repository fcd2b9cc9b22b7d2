"""Deterministic, fork-able random streams.

Every stochastic subsystem (mobility, channel, traffic, policy) draws from
its own stream, forked from the episode seed by a string label.  Forking is
a pure function of (seed path, label): the same seed and label always
reproduce the same stream regardless of how much the parent was used.
"""

from __future__ import annotations

import hashlib

import numpy as np

_SEED_MASK = (1 << 64) - 1


def _label_entropy(label: str) -> int:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class Rng:
    """A numpy Generator plus the seed path it was derived from."""

    def __init__(self, path: tuple[int, ...]):
        self.path = path
        self.gen = np.random.default_rng(np.random.SeedSequence(list(path)))

    @classmethod
    def from_seed(cls, seed: int) -> "Rng":
        return cls((int(seed) & _SEED_MASK,))

    # Sampling calls delegate to the underlying numpy Generator.
    def __getattr__(self, name):
        return getattr(self.gen, name)

    def __repr__(self) -> str:
        return f"Rng(path={self.path})"


def fork_rng(rng: Rng, label: str) -> Rng:
    """Mint an independent child stream identified by `label`.

    Same (parent path, label) always yields the same stream; different
    labels or different seeds yield statistically independent streams.
    """
    if not label:
        raise ValueError("fork label must be non-empty")
    return Rng(rng.path + (_label_entropy(label),))
