"""Seeded random streams.

All randomness uses numpy's ``Philox`` counter-based bit generator (4x64,
10 rounds). A stream is addressed by a top-level seed plus a tuple of
integer keys, e.g. ``(purpose, block_index)``; the keys are folded in through
``SeedSequence.spawn_key`` so streams are independent and the draws of one
block never depend on how many blocks or workers exist.
"""

import numpy as np

RNG_NAME = "numpy.random.Philox/SeedSequence"
RNG_VERSION = 1

# purposes
RUNS = 0
BOUND_H0 = 1
BOUND_H1 = 2
SCENARIO = 3
SAMPLE = 4
DECOMPOSE = 5

BLOCK_SIZE = 1000


def stream(seed, *keys):
    """Return a ``Generator`` for ``(seed, *keys)``."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def blocks(n, block_size=BLOCK_SIZE):
    """Split ``range(n)`` into fixed-size ``(block_index, start, stop)`` triples."""
    return [(b, start, min(start + block_size, n)) for b, start in enumerate(range(0, n, block_size))]
