"""SplitMix64 pseudo-random generator.

Chosen because it is tiny, fully specified by three constants and seeded
directly from a 64-bit integer, so the same draws can be reproduced in any
language.  ``next_float`` takes the top 53 bits of a 64-bit output.
"""

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform draw in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))
