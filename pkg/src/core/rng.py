"""
Keyed random streams.

A stream is identified by (master_seed, stream_id). The generator for a
stream is built from a numpy SeedSequence whose spawn key is the stream id,
so streams with different ids are independent and the same id always
reproduces the same sequence, no matter which process or thread asks for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np


# First element of the stream id for each purpose. Evaluation streams never
# carry an algorithm tag so paired runs share replicate seeds.
INIT = 0
EVALUATION = 1
VARIATION = 2
SIMULATION = 3

# Replicate retry offset appended to an evaluation stream id
RETRY = 1

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Immutable handle on one keyed random stream"""

    master_seed: int
    stream_id: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & _MASK64)
        object.__setattr__(self, "stream_id", tuple(int(i) for i in self.stream_id))
        if any(i < 0 for i in self.stream_id):
            raise ValueError(f"stream ids must be non-negative: {self.stream_id}")

    def child(self, *ids: int) -> "RngStream":
        """Return the sub-stream with `ids` appended to this stream's id."""
        return RngStream(self.master_seed, self.stream_id + tuple(ids))

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.master_seed, spawn_key=self.stream_id)

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def seed_int(self) -> int:
        """A 63-bit integer seed derived from the stream (for external evaluators)."""
        words = self.seed_sequence().generate_state(2, dtype=np.uint32)
        return ((int(words[0]) << 32) | int(words[1])) & ((1 << 63) - 1)


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Accept either a stream handle or an already running generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")
