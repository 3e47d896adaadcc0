"""SplitMix64, a fixed and portable 64-bit generator.

Output ``n`` (0-based) of seed ``s`` is ``mix(s + (n + 1) * GAMMA mod 2**64)``,
so any block of the stream can be computed directly. That keeps golden
files reproducible in any language and lets per-pixel draws vectorize.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, stream: int) -> int:
    """Independent sub-stream seed for ``(seed, stream)``."""
    return mix64((seed * GAMMA + stream) & MASK64)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi], inclusive."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + int(self.uniform() * (hi - lo + 1))

    def choice(self, items):
        return items[self.randint(0, len(items) - 1)]


def uniform_block(seed: int, n: int) -> np.ndarray:
    """The first ``n`` :meth:`SplitMix64.uniform` draws for ``seed``, as an array."""
    with np.errstate(over="ignore"):
        counter = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(seed & MASK64) + counter * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
