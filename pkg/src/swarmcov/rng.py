"""Seeded random streams.

Every consumer gets its own stream keyed by ``(seed, purpose, step)`` so the
order in which subsystems draw numbers can never perturb another subsystem.
"""

from __future__ import annotations

import math

import numpy as np

# stream purposes
LINKS = 0
UE_METRIC = 1
JITTER = 2
INSTANCE = 3
SAMPLING = 4


class GaussianStream:
    """Uniform source plus a fixed Box-Muller transform.

    Each call to :meth:`gauss` consumes exactly two uniforms and returns one
    standard normal deviate (cosine branch only), so draw accounting is simple
    and identical on every platform.
    """

    def __init__(self, generator: np.random.Generator):
        self._gen = generator

    @classmethod
    def from_key(cls, seed: int, *key: int) -> "GaussianStream":
        return cls(stream(seed, *key))

    def uniform(self) -> float:
        return float(self._gen.random())

    def gauss(self) -> float:
        u1 = 1.0 - self._gen.random()  # (0, 1]
        u2 = self._gen.random()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 generator for ``seed`` and an integer key path."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
