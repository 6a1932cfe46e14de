"""Seeded random streams.

Every random draw in the package goes through a ``numpy.random.Generator``
backed by Philox (a counter-based 64-bit generator).  Independent streams are
derived from a master seed and a stream index through ``SeedSequence``'s
spawn key, so replicate ``i`` of an experiment sees the same numbers no matter
how replicates are scheduled across workers.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def make_rng(seed: int, stream: int | tuple[int, ...] = ()) -> np.random.Generator:
    if isinstance(stream, int):
        stream = (stream,)
    ss = np.random.SeedSequence(int(seed) & MASK64, spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(ss))


def as_rng(rng) -> np.random.Generator:
    """Accept a Generator or an integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        raise ValueError("an explicit seed or Generator is required")
    return make_rng(int(rng))


def spawn_seeds(rng: np.random.Generator, k: int) -> list[int]:
    """Draw ``k`` 64-bit child seeds from ``rng``."""
    return [int(s) for s in rng.integers(0, 2**63 - 1, size=k, dtype=np.int64)]
