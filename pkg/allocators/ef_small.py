"""
Envy-free allocators for the small-m regime (m >= 5n).

Both build a threshold graph between agents and items and read the
allocation off an x-matching; any agent-item edge clears the item's
threshold, so every agent gets items it values close to the best
possible (goods) or close to zero (chores).
"""
import logging

import numpy as np

from allocation_instance import Allocation, Instance, Mode, Provenance
from matching_engine import Direction, perfect_r_matching, right_saturated_matching, threshold_graph

from .outcome import AllocOutcome, Stage
from .thresholds import DEFAULT_LOG_FACTOR, chores_thresholds, goods_thresholds

logger = logging.getLogger(__name__)


def allocate_ef_small(instance: Instance, log_factor: float = DEFAULT_LOG_FACTOR) -> AllocOutcome:
    """
    Give every agent exactly x = m / n goods it values at least at the goods' thresholds.

    Args:
        instance: A goods instance with m divisible by n.
        log_factor: Coefficient of ln(n) in the thresholds.

    Returns:
        AllocOutcome: Success, or PERFECT_X_MATCHING when no perfect x-matching exists.
    """
    if instance.mode is not Mode.GOODS:
        raise ValueError("allocate_ef_small needs a goods instance; use allocate_ef_small_chores")
    n, m = instance.n, instance.m
    if m % n:
        raise ValueError(f"m={m} is not divisible by n={n}")
    x = m // n
    if m < 5 * n:
        logger.debug("ef_small outside its intended regime: m=%d < 5n=%d", m, 5 * n)

    thresholds = goods_thresholds(instance, log_factor)
    items = np.arange(m)
    graph = threshold_graph(instance, items, thresholds.tau, Direction.AT_LEAST)
    result = perfect_r_matching(graph, x)
    if not result.ok:
        return AllocOutcome.infeasible(Stage.PERFECT_X_MATCHING, result.matched, result.required,
                                       f"threshold graph has {graph.n_edges} edges")

    owners = np.asarray(result.right_to_left, dtype=np.int64)
    return AllocOutcome.success(Allocation.from_owners(owners, n, Provenance.EF_SMALL))


def allocate_ef_small_chores(instance: Instance, log_factor: float = DEFAULT_LOG_FACTOR) -> AllocOutcome:
    """
    Two-phase envy-free allocation of chores.

    Phase 1 gives every agent x = floor(m / n) of the first x * n chores, each
    with disutility at most its threshold. Phase 2 hands the remaining
    y = m - x * n chores to distinct agents under the loosest threshold
    ``log_factor * ln(n) / (alpha_min * n)``.

    Returns:
        AllocOutcome: Success, PHASE1 or PHASE2.
    """
    if instance.mode is not Mode.CHORES:
        raise ValueError("allocate_ef_small_chores needs a chores instance")
    n, m = instance.n, instance.m
    x, y = divmod(m, n)
    if x == 0:
        raise ValueError(f"need m >= n to give every agent a phase-1 chore, got n={n} m={m}")

    thresholds = chores_thresholds(instance, log_factor)
    owners = np.empty(m, dtype=np.int64)

    first = np.arange(x * n)
    phase1 = threshold_graph(instance, first, thresholds.tau[first], Direction.AT_MOST)
    result = perfect_r_matching(phase1, x)
    if not result.ok:
        return AllocOutcome.infeasible(Stage.PHASE1, result.matched, result.required,
                                       f"phase-1 graph has {phase1.n_edges} edges")
    owners[first] = result.right_to_left

    if y:
        rest = np.arange(x * n, m)
        cap = float(thresholds.tau.max())
        phase2 = threshold_graph(instance, rest, np.full(y, cap), Direction.AT_MOST)
        result = right_saturated_matching(phase2)
        if not result.ok:
            return AllocOutcome.infeasible(Stage.PHASE2, result.matched, result.required,
                                           f"phase-2 cap {cap:.6f}")
        owners[rest] = result.right_to_left

    return AllocOutcome.success(Allocation.from_owners(owners, n, Provenance.CHORES_EF_SMALL))
