"""Deterministic random streams keyed by (seed, stream).

Every source of randomness in the package is a counter-based generator keyed
by a root seed plus a stream id.  Stream ids are derived from short component
names so that independent parts of an experiment (network init, training
batches, threshold calibration, test scenes) never share draws, and any part
can be replayed in isolation.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def stream_id(name: str, index: int = 0) -> int:
    """Stable 64-bit stream id for a named component and an index."""
    digest = hashlib.sha256(f"{name}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


class Rng:
    """Philox stream; the same (seed, stream) pair always replays the same draws."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self.gen = np.random.Generator(np.random.Philox(key=key))

    def derive(self, name: str, index: int = 0) -> "Rng":
        """Fresh stream for a named sub-component, keyed by the same root seed."""
        return Rng(self.seed, stream_id(name, index))

    def normal(self, loc=0.0, scale=1.0, size=None) -> np.ndarray:
        return self.gen.normal(loc, scale, size)

    def uniform(self, low=0.0, high=1.0, size=None) -> np.ndarray:
        return self.gen.uniform(low, high, size)

    def integers(self, low, high=None, size=None) -> np.ndarray:
        return self.gen.integers(low, high, size)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, stream={self.stream})"
