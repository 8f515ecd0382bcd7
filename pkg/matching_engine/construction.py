"""Graph constructions: threshold graphs over an instance, random bipartite graphs, Hall witnesses."""
import itertools
import logging
from enum import Enum
from typing import FrozenSet, Optional, Sequence, Union

import numpy as np

from allocation_instance import Instance
from utility_distributions import make_rng

from .graph import BipartiteGraph

logger = logging.getLogger(__name__)

HALL_SUBSET_CAP = 20


class Direction(str, Enum):
    AT_LEAST = "at_least"
    AT_MOST = "at_most"


def threshold_graph(instance: Instance, items: Sequence[int], thresholds: Sequence[float],
                    direction: Direction) -> BipartiteGraph:
    """
    Agent-item graph with edge (i, k) iff ``values[i, items[k]]`` clears ``thresholds[k]``.

    Args:
        instance: The instance whose values are compared.
        items: The item subset forming the right side, in order.
        thresholds: One threshold per entry of ``items``.
        direction: AT_LEAST (goods, value >= threshold) or AT_MOST (chores, value <= threshold).

    Returns:
        BipartiteGraph: Left side = agents, right vertex k = ``items[k]``.
    """
    items = np.asarray(items, dtype=np.int64)
    thresholds = np.asarray(thresholds, dtype=np.float64)
    if thresholds.shape != items.shape:
        raise ValueError(f"expected {items.size} thresholds, got {thresholds.size}")
    block = instance.values[:, items]
    if direction is Direction.AT_LEAST:
        mask = block >= thresholds[np.newaxis, :]
    else:
        mask = block <= thresholds[np.newaxis, :]
    return BipartiteGraph.from_mask(mask)


def random_bipartite(n_left: int, n_right: int, edge_probs: Union[float, Sequence[float]],
                     seed: int) -> BipartiteGraph:
    """
    Random bipartite graph with edge (l, r) present independently with probability ``edge_probs[r]``.

    A scalar probability applies to every right vertex.
    """
    probs = np.broadcast_to(np.asarray(edge_probs, dtype=np.float64), (n_right,))
    if np.any((probs < 0.0) | (probs > 1.0)):
        raise ValueError("edge probabilities must lie in [0, 1]")
    draws = make_rng(seed).random((n_left, n_right))
    return BipartiteGraph.from_mask(draws < probs[np.newaxis, :])


def hall_violation(graph: BipartiteGraph, max_subset: int) -> Optional[FrozenSet[int]]:
    """
    Exhaustively search for a left subset S with |N(S)| < |S| and |S| <= max_subset.

    Exponential in ``max_subset``; meant for small test graphs only.

    Returns:
        The first violating subset in (size, lexicographic) order, or None.
    """
    if max_subset > HALL_SUBSET_CAP:
        raise ValueError(f"max_subset={max_subset} exceeds the exhaustive-search cap of {HALL_SUBSET_CAP}")
    for size in range(1, min(max_subset, graph.n_left) + 1):
        for subset in itertools.combinations(range(graph.n_left), size):
            if len(graph.neighbours(subset)) < size:
                return frozenset(subset)
    return None
