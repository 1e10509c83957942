"""Counter-based pseudo-random stream with platform-independent replay.

The generator is splitmix64 (Steele, Lea & Flood; the mixer used by Java's
SplittableRandom): draw number ``k`` of a stream with seed ``s`` is
``mix64(s + (k + 1) * GOLDEN)`` where GOLDEN = 0x9E3779B97F4A7C15.  Every
draw is a pure function of (seed, counter), so streams can be replayed,
split and evaluated out of order on any platform.

Sub-streams are derived as ``mix64(seed ^ mix64(SPLIT + index))``; snapshot
``i`` of an acquisition run always uses sub-stream ``i`` of the run seed,
which makes acquisition order-independent and safe to parallelise.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_SPLIT = 0x632BE59BD9B4E019


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream_seed(seed: int, index: int) -> int:
    """Seed of sub-stream `index` of a stream with seed `seed`."""
    return mix64((seed & _MASK64) ^ mix64((_SPLIT + index) & _MASK64))


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(0xBF58476D1CE4E5B9)
        z ^= z >> np.uint64(27)
        z *= np.uint64(0x94D049BB133111EB)
        z ^= z >> np.uint64(31)
    return z


class RandomStream:
    """Deterministic counter-based random stream.

    Parameters
    ----------
    seed:
        64-bit integer seed. Identical seeds reproduce identical draws on
        every platform.
    counter:
        Number of draws already consumed (0 for a fresh stream).
    """

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        self.seed = int(seed) & _MASK64
        self.counter = int(counter)

    def __repr__(self):
        return f"RandomStream(seed={self.seed:#x}, counter={self.counter})"

    def substream(self, index: int) -> "RandomStream":
        """Independent stream derived from (seed, index); never advances self."""
        return RandomStream(substream_seed(self.seed, index))

    def next_u64(self) -> int:
        v = mix64((self.seed + (self.counter + 1) * GOLDEN) & _MASK64)
        self.counter += 1
        return v

    def u64_array(self, count: int) -> np.ndarray:
        """Next `count` draws as a uint64 array (vectorised)."""
        ks = np.arange(self.counter + 1, self.counter + count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = np.uint64(self.seed) + ks * np.uint64(GOLDEN)
        self.counter += count
        return _mix64_np(states)

    def uniform(self, count: int | None = None):
        """Uniform floats in [0, 1): one draw consumed per value."""
        if count is None:
            return self.next_u64() / 2.0**64
        return self.u64_array(count) / 2.0**64

    def coin(self) -> int:
        """Fair coin flip in {0, 1} (top bit of the next draw)."""
        return self.next_u64() >> 63

    def bits(self, nbits: int) -> np.ndarray:
        """`nbits` random bits, packed LSB-first into uint64 words."""
        nwords = (nbits + 63) // 64
        words = self.u64_array(nwords)
        extra = nwords * 64 - nbits
        if extra:
            words[-1] &= np.uint64(_MASK64 >> extra)
        return words

    def index_below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection (bound <= 2**63)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        # rejection zone keeps the draw exactly uniform
        limit = (2**64 // bound) * bound
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound
