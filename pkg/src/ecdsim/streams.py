"""Deterministic random-number substreams.

A master seed plus an integer key tuple is hashed through numpy's
SeedSequence (128-bit entropy pool) into an independent PCG64 stream.
Sample i of a Monte Carlo run always uses substream(master, i), so
results do not depend on how samples are batched across threads.
"""

from __future__ import annotations

import numpy as np


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator derived from (master_seed, *key)."""
    ss = np.random.SeedSequence([int(master_seed), *[int(k) for k in key]])
    return np.random.Generator(np.random.PCG64(ss))


def as_rng(seed_or_rng) -> np.random.Generator:
    """Accept either a seed (int/None) or an existing Generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)
