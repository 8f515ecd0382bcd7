"""
Online sampling allocator.

Items arrive in index order and are assigned immediately: for each item,
``s`` agents are sampled uniformly without replacement and the item goes to
the sampled agent with the highest value. Only the sampled entries of the
utility matrix are read, so a run costs ``m * s`` value queries instead of
``m * n``.
"""
import logging
import math
from enum import Enum
from typing import Tuple

import numpy as np

from allocation_instance import Allocation, Instance, Mode, Provenance
from utility_distributions import Family, has_atom_at_one, make_rng, mean, pdf_bounds

from .outcome import SampleLog
from .thresholds import ceil_formula

logger = logging.getLogger(__name__)


class Regime(str, Enum):
    """Which sample-size formula applies."""
    DISCRETE = "discrete"
    CONTINUOUS_CONSTANT = "continuous_constant"
    CONTINUOUS_BOUNDED_MEAN = "continuous_bounded_mean"


def sample_size(regime: Regime, m: float, alpha_min: float) -> int:
    """
    Number of agents to sample per item.

    Discrete: 2 ln m / alpha_min. ContinuousConstant: 20 ln m / alpha_min.
    ContinuousBoundedMean: 2 (ln m)^2 / alpha_min. The result is rounded up;
    callers clamp it to n.

    Raises:
        ValueError: If alpha_min <= 0 or m < 2.
    """
    if not alpha_min > 0.0:
        raise ValueError(f"alpha_min must be positive, got {alpha_min}")
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    log_m = math.log(m)
    numerator = {
        Regime.DISCRETE: 2.0 * log_m,
        Regime.CONTINUOUS_CONSTANT: 20.0 * log_m,
        Regime.CONTINUOUS_BOUNDED_MEAN: 2.0 * log_m ** 2,
    }[Regime(regime)]
    return max(1, ceil_formula(numerator / alpha_min))


def sample_size_for_instance(instance: Instance, regime: Regime) -> int:
    """
    Sample size for ``instance`` under ``regime``, clamped to n.

    Checks the regime's hypotheses first: the discrete regime needs every item
    DiscreteFinite with the value 1 in its support; the other two need
    continuous laws, and the bounded-mean one every mean below 1.
    """
    regime = Regime(regime)
    specs = instance.item_specs
    if regime is Regime.DISCRETE:
        bad = [j for j, spec in enumerate(specs) if not has_atom_at_one(spec)]
        if bad:
            raise ValueError(f"discrete regime needs an atom at 1 for every item; item {bad[0]} has none")
    else:
        bad = [j for j, spec in enumerate(specs) if spec.family is Family.DISCRETE]
        if bad:
            raise ValueError(f"continuous regime got a discrete law at item {bad[0]}")
        if regime is Regime.CONTINUOUS_BOUNDED_MEAN:
            bad = [j for j, spec in enumerate(specs) if not mean(spec) < 1.0]
            if bad:
                raise ValueError(f"bounded-mean regime needs means below 1; item {bad[0]} violates it")
    alpha_min = min(pdf_bounds(spec).alpha for spec in specs)
    return min(sample_size(regime, instance.m, alpha_min), instance.n)


def allocate_sampling(instance: Instance, s: int, seed: int) -> Tuple[Allocation, SampleLog]:
    """
    Allocate goods online by sampling ``s`` agents per item.

    Args:
        instance: A goods instance.
        s: Agents sampled per item, 1 <= s <= n.
        seed: Seed of the sampling stream.

    Returns:
        (Allocation, SampleLog): The allocation and the per-item sample record.
        Ties among sampled maxima go to the lowest agent index.
    """
    if instance.mode is not Mode.GOODS:
        raise ValueError("the sampling allocator is defined for goods only")
    n, m = instance.n, instance.m
    if not 1 <= s <= n:
        raise ValueError(f"s must lie in [1, {n}], got {s}")

    rng = make_rng(seed)
    values = instance.values
    sampled = np.empty((m, s), dtype=np.int64)
    winners = np.empty(m, dtype=np.int64)
    winning_values = np.empty(m, dtype=np.float64)
    for item in range(m):
        agents = np.sort(rng.choice(n, size=s, replace=False))
        column = np.asarray(values[agents, item])
        pick = int(np.argmax(column))
        sampled[item] = agents
        winners[item] = agents[pick]
        winning_values[item] = column[pick]

    logger.debug("Sampling allocator: m=%d s=%d, %d value queries", m, s, m * s)
    allocation = Allocation.from_owners(winners, n, Provenance.SAMPLING)
    return allocation, SampleLog(sampled=sampled, winners=winners, winning_values=winning_values)
