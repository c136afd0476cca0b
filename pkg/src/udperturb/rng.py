"""SplitMix64 pseudorandom stream.

All randomness in this package flows through this generator so that suites
are byte-identical across platforms and reruns. SplitMix64 is a tiny,
well-studied 64-bit mixer; bounded draws use rejection sampling so every
value in ``range(n)`` is exactly equally likely.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state by one step.

    Returns ``(new_state, output)``. Both are unsigned 64-bit values.
    """
    state = (state + GOLDEN_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


class RngStream:
    """Mutable wrapper around a SplitMix64 state."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state, value = splitmix64_next(self.state)
        return value

    def below(self, n: int) -> int:
        """Uniform draw from ``range(n)`` via rejection sampling.

        Rejects draws above the largest multiple of ``n`` that fits in
        64 bits, so the result is unbiased.
        """
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            value = self.next_u64()
            if value < limit:
                return value % n

    def choice(self, seq):
        """Uniform draw from a non-empty sequence."""
        return seq[self.below(len(seq))]
