"""Seeded random streams.

Every random draw in FairSim goes through a numpy ``Generator`` built from a
``SeedSequence`` of a master seed mixed with integer keys (item index, trial
index, ...). Streams for different keys are independent, so adding agents or
items never perturbs the draws of other items.
"""
from typing import Union

import numpy as np

SeededRng = np.random.Generator

SeedLike = Union[int, np.integer]


def make_rng(seed: SeedLike, *keys: int) -> SeededRng:
    """
    Build the generator for ``seed`` mixed with ``keys``.

    Args:
        seed: Master seed (any non-negative 64-bit integer).
        *keys: Integer sub-stream identifiers.

    Returns:
        np.random.Generator: A PCG64 generator owned by the caller.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def derive_seed(seed: SeedLike, *keys: int) -> int:
    """Derive a 64-bit child seed from ``seed`` and ``keys``."""
    state = np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1, dtype=np.uint64)
    return int(state[0])
