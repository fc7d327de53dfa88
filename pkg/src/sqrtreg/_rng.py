"""Named deterministic random streams.

Every stochastic component draws from a counter-based Philox generator keyed
by ``(seed, stream, index...)`` through :class:`numpy.random.SeedSequence`,
so results are reproducible across platforms and independent of evaluation
order.  Stream codes: 0 design, 1 noise (per repetition), 2 cross-validation
shuffles (per repetition), 3 search restarts, 4 support draws.
"""

from __future__ import annotations

import numpy as np

DESIGN = 0
NOISE = 1
CV = 2
SEARCH = 3
SUPPORT = 4


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *key: int) -> int:
    """A derived integer seed for components that take a plain seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
