"""Counter-based random number streams for reproducible parallel Monte Carlo.

Streams are keyed by a (master seed, stream index) pair fed to a Philox
counter-based bit generator, so a stream's output depends only on its key,
never on which thread or in which order it is consumed.  Trial i of an
experiment always uses ``RngStream(seed, i)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """Key for an independent, reproducible random stream."""

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 bits")
        if not (0 <= self.stream < 2**64):
            raise ValueError("stream index must fit in 64 bits")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.Philox(key=(self.seed, self.stream)))

    def substream(self, index: int) -> "RngStream":
        """Derive a child stream; distinct indices give independent streams.

        Child keys are spread with a fixed odd multiplier so nested use
        (e.g. per-trial substreams of a per-experiment stream) cannot
        collide with sibling top-level streams.
        """
        mixed = ((self.stream ^ 0xD1B54A32D192ED03) * 0x9E3779B97F4A7C15 + index + 1) % 2**64
        return RngStream(self.seed, mixed)
