"""
Proportional allocators for goods.

``allocate_prop_two_stage`` covers n <= m <= 2n: a perfect matching on the
first n items, followed by a repair matching for agents whose first item
falls short of their proportional share. ``allocate_prop_linear`` covers
m >= r * n when every item's mean is at most c: each agent gets exactly
floor(m / n) above-threshold goods and the leftovers are dealt round-robin.
"""
import logging

import numpy as np

from allocation_instance import Allocation, Instance, Mode, Provenance
from matching_engine import (
    BipartiteGraph,
    Direction,
    left_saturated_r_matching,
    max_matching,
    perfect_r_matching,
    threshold_graph,
)
from utility_distributions import mean

from .outcome import AllocOutcome, Stage
from .thresholds import DEFAULT_LOG_FACTOR, PROP_SLACK, goods_thresholds, proportional_r

logger = logging.getLogger(__name__)


def _require_goods(instance: Instance, name: str):
    if instance.mode is not Mode.GOODS:
        raise ValueError(f"{name} needs a goods instance")


def allocate_prop_two_stage(instance: Instance, log_factor: float = DEFAULT_LOG_FACTOR) -> AllocOutcome:
    """
    Two-stage proportional algorithm for n <= m <= 2n.

    Stage 1 perfectly matches agents to the first n items through the
    threshold graph. Agents whose stage-1 item is worth less than
    u_i(M) / n form the violator set; stage 2 matches each violator to a
    distinct remaining item worth at least its deficit. Remaining items that
    stage 2 leaves unmatched go to agent 0.

    Returns:
        AllocOutcome: Success, STAGE1 or STAGE2.
    """
    _require_goods(instance, "allocate_prop_two_stage")
    n, m = instance.n, instance.m
    if not n <= m <= 2 * n:
        raise ValueError(f"two-stage algorithm needs n <= m <= 2n, got n={n} m={m}")

    thresholds = goods_thresholds(instance, log_factor)
    first = np.arange(n)
    rest = np.arange(n, m)

    stage1 = threshold_graph(instance, first, thresholds.tau[first], Direction.AT_LEAST)
    result = perfect_r_matching(stage1, 1)
    if not result.ok:
        return AllocOutcome.infeasible(Stage.STAGE1, result.matched, result.required,
                                       f"stage-1 graph has {stage1.n_edges} edges")

    owners = np.zeros(m, dtype=np.int64)
    owners[first] = result.right_to_left
    # item_of[i] is the stage-1 item of agent i
    item_of = np.empty(n, dtype=np.int64)
    item_of[owners[first]] = first

    agents = np.arange(n)
    held = instance.values[agents, item_of]
    share = instance.row_totals / n
    violators = np.flatnonzero(held < share - PROP_SLACK)
    logger.debug("two-stage: %d violators after stage 1", violators.size)

    if violators.size:
        deficit = share[violators] - held[violators]
        fix = BipartiteGraph.from_mask(instance.values[np.ix_(violators, rest)] >= deficit[:, np.newaxis])
        repair = max_matching(fix)
        if repair.cardinality < violators.size:
            return AllocOutcome.infeasible(Stage.STAGE2, repair.cardinality, int(violators.size),
                                           f"violators {violators.tolist()[:10]}")
        for left, right in repair.pairs():
            owners[rest[right]] = violators[left]

    return AllocOutcome.success(Allocation.from_owners(owners, n, Provenance.PROP_TWO_STAGE))


def allocate_prop_linear(instance: Instance, c: float, log_factor: float = DEFAULT_LOG_FACTOR) -> AllocOutcome:
    """
    Proportional allocation when m >= r(c) * n and every item mean is at most ``c``.

    Args:
        instance: A goods instance.
        c: Upper bound on item means, 0 <= c < 1.
        log_factor: Coefficient of ln(n) in the thresholds.

    Returns:
        AllocOutcome: Success or LEFT_SATURATED_X_MATCHING.

    Raises:
        ValueError: On precondition violations, before any matching is attempted.
    """
    _require_goods(instance, "allocate_prop_linear")
    r = proportional_r(c)
    n, m = instance.n, instance.m
    if m < r * n:
        raise ValueError(f"m={m} is below r * n = {r} * {n} for c={c}")
    for item, spec in enumerate(instance.item_specs):
        if mean(spec) > c + PROP_SLACK:
            raise ValueError(f"item {item} has mean {mean(spec):.6f} above the bound c={c}")

    x = m // n
    thresholds = goods_thresholds(instance, log_factor)
    graph = threshold_graph(instance, np.arange(m), thresholds.tau, Direction.AT_LEAST)
    result = left_saturated_r_matching(graph, x)
    if not result.ok:
        return AllocOutcome.infeasible(Stage.LEFT_SATURATED_X_MATCHING, result.matched, result.required,
                                       f"x={x}, r={r}")

    owners = np.array([-1 if agent is None else agent for agent in result.right_to_left], dtype=np.int64)
    leftovers = np.flatnonzero(owners < 0)
    owners[leftovers] = np.arange(leftovers.size) % n
    return AllocOutcome.success(Allocation.from_owners(owners, n, Provenance.PROP_LINEAR))
