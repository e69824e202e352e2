"""Deterministic seeded randomness built on splitmix64.

The generator contract: state advances by the 64-bit golden gamma
0x9E3779B97F4A7C15, and each output is the mixed state
(xor-shift 30, * 0xBF58476D1CE4E5B9, xor-shift 27, * 0x94D049BB133111EB,
xor-shift 31). Uniforms are next_u64 / 2**64. Seed 0 produces
0xE220A8397B1DCDAF first.
"""

from __future__ import annotations

import numpy as np

from . import kernels

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

_U64_TO_UNIT = 2.0 ** -64


class SplitMix64:
    """Scalar splitmix64 generator (pure-python reference implementation)."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return (z ^ (z >> 31)) & MASK64

    def next_uniform(self) -> float:
        return float(self.next_u64()) * _U64_TO_UNIT


def u64_stream(seed: int, n: int) -> np.ndarray:
    """First ``n`` raw outputs of the stream seeded with ``seed``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return kernels.splitmix64_fill(np.uint64(seed & MASK64), n)


def uniform_stream(seed: int, n: int) -> np.ndarray:
    """First ``n`` uniforms in [0, 1), as next_u64 / 2**64."""
    return u64_stream(seed, n).astype(np.float64) * _U64_TO_UNIT


def derive_seeds(seed: int, n: int) -> tuple[int, ...]:
    """Derive ``n`` independent sub-seeds from a study seed.

    Sub-seed k is simply the k-th raw output of the stream, so distinct
    purposes (e.g. table generation vs. row sampling) never share a stream.
    """
    gen = SplitMix64(seed)
    return tuple(gen.next_u64() for _ in range(n))
