"""Seeded random streams.

Every stream is a PCG64 generator keyed by ``(seed, *keys)`` through
:class:`numpy.random.SeedSequence`, so streams for different trials, regimes
or restarts are independent and can be rebuilt in any order.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 0


def derive_rng(seed: int | None, *keys: int) -> np.random.Generator:
    if seed is None:
        seed = DEFAULT_SEED
    entropy = [int(seed), *(int(k) for k in keys)]
    if any(e < 0 for e in entropy):
        raise ValueError(f"seeds and stream keys must be nonnegative, got {entropy}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
