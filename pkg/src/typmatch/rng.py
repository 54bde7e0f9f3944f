"""Seeded random streams.

Every random draw in the package goes through :func:`stream`. The
generator is numpy's PCG64 seeded by a ``SeedSequence`` whose spawn key is
``(purpose, *keys)``. Each purpose has a fixed integer tag, so adding a
new purpose, or a new key inside one, never moves an existing stream.
"""

from __future__ import annotations

import numpy as np

# purpose tags; never renumber
SAMPLE = 1
GRAPH = 2
ANONYMIZE = 3
PICK = 4
MONTE_CARLO = 5
GREEDY = 6
PERMUTATION = 7
SWEEP = 8

_MASK64 = (1 << 64) - 1


def stream(seed: int, purpose: int, *keys: int) -> np.random.Generator:
    """Return an independent PCG64 generator for ``(seed, purpose, keys)``."""
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64,
                                spawn_key=(int(purpose), *(int(k) for k in keys)))
    return np.random.Generator(np.random.PCG64(ss))


def subseed(seed: int, purpose: int, *keys: int) -> int:
    """Derive a 64-bit integer seed, for handing to another seeded call."""
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64,
                                spawn_key=(int(purpose), *(int(k) for k in keys)))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)
