"""SplitMix64: the match-internal deterministic random stream.

Chosen over random.Random because the full generator state is a single u64
that serializes into state digests and replay logs, and the sequence is
identical on every platform and Python build.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n). Modulo bias is irrelevant at game scale."""
        if n <= 0:
            raise ValueError(f"next_below requires n > 0, got {n}")
        return self.next_u64() % n

    def chance(self, milli: int) -> bool:
        """True with probability milli/1000."""
        if milli <= 0:
            return False
        if milli >= 1000:
            return True
        return self.next_below(1000) < milli

    def fork(self, salt: int) -> "SplitMix64":
        """Derive an independent stream (used to give each camp its own)."""
        child = SplitMix64((self.state ^ (salt * 0x9E3779B97F4A7C15)) & MASK64)
        child.next_u64()
        return child
