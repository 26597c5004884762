"""Portable deterministic random numbers for the synthetic generator.

The generator is counter-based SplitMix64: draw i of a stream seeded with
``s`` is ``mix64(s + (i+1) * GOLDEN)`` where ``mix64`` is the standard
SplitMix64 finalizer.  Uniform doubles take the top 53 bits of each draw;
approximately-normal deviates are Irwin-Hall sums of 12 uniforms (no libm
calls), so identical seeds give identical bit patterns on any IEEE-754
platform.  Statistical quality is ample for sampling benchmark clusters;
this is not a general-purpose RNG.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class PortableRng:
    """Sequential deterministic stream of uniforms and normal-ish deviates."""

    def __init__(self, seed: int):
        self._seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
        self._counter = 0

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` uint64 draws."""
        idx = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        self._counter += n
        with np.errstate(over="ignore"):
            return _mix64((self._seed + idx * _GOLDEN) & _MASK)

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` doubles uniform on [0, 1)."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normals(self, n: int) -> np.ndarray:
        """``n`` approximately standard-normal deviates (Irwin-Hall, 12 terms)."""
        u = self.uniforms(12 * n).reshape(n, 12)
        return u.sum(axis=1) - 6.0
