"""Counter-based random streams keyed by (master seed, trial index).

Stream algorithm, fixed for bit-reproducibility: numpy ``Philox`` (4x64,
10 rounds) seeded through ``SeedSequence(entropy=master, spawn_key=(trial,))``.
A different trial index gives an independent stream regardless of which
worker draws it or in what order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STREAM_ALGORITHM = "philox4x64-10/seedsequence-v1"


@dataclass(frozen=True)
class Seed:
    master: int
    trial: int = 0

    def __post_init__(self):
        if not 0 <= self.master < 2**64:
            raise ValueError("master seed must be a 64-bit unsigned integer")
        if self.trial < 0:
            raise ValueError("trial index must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.master, spawn_key=(self.trial,))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, trial: int) -> "Seed":
        return Seed(self.master, trial)


def as_generator(seed) -> np.random.Generator:
    """Accept a ``Seed``, a plain int (trial 0) or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, Seed):
        return seed.generator()
    return Seed(int(seed)).generator()


def randbelow(rng: np.random.Generator, m: int) -> int:
    """Exactly uniform integer in [0, m) for arbitrarily large ``m``."""
    if m <= 0:
        raise ValueError("empty range")
    if m < 2**62:
        return int(rng.integers(0, m))
    bits = m.bit_length()
    words = (bits + 63) // 64
    while True:
        r = 0
        for w in rng.integers(0, 2**64, size=words, dtype=np.uint64):
            r = (r << 64) | int(w)
        r >>= words * 64 - bits
        if r < m:
            return r
