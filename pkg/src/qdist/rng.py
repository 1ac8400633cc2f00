"""Portable seeded random numbers.

The generator is SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter
advanced by the golden-ratio increment and passed through a fixed
xor-shift-multiply finalizer.  Every derived distribution below is built
from its 53-bit uniforms with elementary formulas, so any language that
reproduces the integer stream reproduces every random instance exactly.

    state  <- state + 0x9E3779B97F4A7C15            (mod 2**64)
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2**64)
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB  (mod 2**64)
    output <- z ^ (z >> 31)
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Hash a tuple of integers into one 64-bit seed.

    Used to give every (suite seed, trial, stream) combination its own
    independent stream without consuming numbers from a shared one.
    """
    h = 0
    for part in parts:
        h = _mix((h + _GOLDEN + (int(part) & _MASK)) & _MASK)
    return h


class SplitMix64:
    """Tiny deterministic PRNG; see the module docstring for the recurrence."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return _mix(self.state)

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def integer(self, low: int, high: int) -> int:
        """Integer in [low, high] inclusive (modulo bias is below 2**-50 here)."""
        span = high - low + 1
        return low + self.next_u64() % span

    def normal(self) -> float:
        """Standard normal via Box-Muller, one uniform pair per draw."""
        u1 = 1.0 - self.uniform()  # (0, 1]
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def exponential(self) -> float:
        return -math.log(1.0 - self.uniform())
