"""Deterministic seed derivation.

Every random stream in the package descends from one user-supplied integer.
Child seeds are drawn from ``numpy.random.SeedSequence(seed, spawn_key=keys)``
so that cell ``i`` of a sweep, or the second stream of a pipeline, gets a
reproducible and statistically independent seed regardless of execution order.
"""

import numpy as np


def derive_seed(seed: int, *keys: int) -> int:
    """Return a 63-bit child seed of ``seed`` addressed by ``keys``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed))
