"""Seeded random streams for the simulator.

The generator is xorshift64* (Vigna, 2016): a 64-bit xorshift state with
shifts (12, 25, 27) and multiplier 0x2545F4914F6CDD1D applied to the output.
Seeds go through one round of splitmix64 so that small or zero seeds still
give a non-zero, well-mixed state.  Every stream is derived from an explicit
integer seed; nothing reads global state.
"""

from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def hash64(*parts) -> int:
    """Stable 64-bit hash of the string forms of ``parts`` (BLAKE2b)."""
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        data = repr(p).encode("utf-8") if not isinstance(p, str) else p.encode("utf-8")
        h.update(len(data).to_bytes(4, "little"))
        h.update(data)
    return int.from_bytes(h.digest(), "little")


class XorShift64Star:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        s = splitmix64(seed & MASK64)
        self.state = s or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & MASK64

    def uniform(self) -> float:
        """Double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform_range(self, lo: float, hi: float) -> float:
        """Draw from [lo, hi); the upper bound is never returned."""
        v = lo + (hi - lo) * self.uniform()
        return v if v < hi else lo
