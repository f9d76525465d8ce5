"""Seeded random streams.

Every stochastic unit of work (one QMR2 iteration, one sampling run) draws
from its own ``numpy.random.Generator`` backed by the counter-based Philox
bit generator.  The stream is keyed by ``SeedSequence(seed, spawn_key=key)``
so it depends only on the user seed and the unit's identity, never on the
order in which units are executed.  Serial and parallel runs therefore
agree bit for bit.
"""

from __future__ import annotations

import numpy as np

# Stream namespaces; part of the spawn key so that e.g. noisy and baseline
# run 7 never share a stream.
STREAM_QMR2 = 1
STREAM_NOISY = 2
STREAM_BASELINE = 3
STREAM_MISC = 4


def derive_rng(seed, *key):
    """Independent generator for ``(seed, *key)``; keys are non-negative ints."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
