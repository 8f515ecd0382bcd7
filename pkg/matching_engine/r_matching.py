"""
r-matchings by the cloning reduction.

Every left vertex is copied ``r`` times (clone ``i * r + k`` for copy ``k``
of vertex ``i``), each copy inheriting the original adjacency; a maximum
matching on the cloned graph gives every original left vertex at most ``r``
partners. All requests reduce to one ``max_matching`` call and a check of
the resulting cardinality.
"""
import logging
from typing import Union

from .graph import BipartiteGraph, Infeasible, Matching
from .hopcroft_karp import max_matching

logger = logging.getLogger(__name__)

MatchingResult = Union[Matching, Infeasible]


def clone_left(graph: BipartiteGraph, r: int) -> BipartiteGraph:
    """Replace every left vertex by ``r`` copies with identical adjacency."""
    if r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    adjacency = tuple(row for row in graph.adjacency for _ in range(r))
    return BipartiteGraph(n_left=graph.n_left * r, n_right=graph.n_right, adjacency=adjacency)


def _max_r_matching(graph: BipartiteGraph, r: int) -> Matching:
    cloned = max_matching(clone_left(graph, r))
    return Matching.from_right_to_left(
        [None if clone is None else clone // r for clone in cloned.right_to_left], graph.n_left)


def _check(best: Matching, required: int, label: str) -> MatchingResult:
    if best.cardinality < required:
        logger.debug("%s infeasible: matched %d of %d", label, best.cardinality, required)
        return Infeasible(matched=best.cardinality, required=required, best=best)
    return best


def perfect_r_matching(graph: BipartiteGraph, r: int) -> MatchingResult:
    """
    Find an r-matching covering every right vertex.

    When ``n_right == r * n_left`` the result is a perfect r-matching (every
    left vertex has degree exactly r). When ``n_right < r * n_left`` it is a
    right-saturated r-matching (left degrees at most r).

    Args:
        graph: The bipartite graph.
        r: Left-degree bound.

    Returns:
        Matching on success, Infeasible when fewer than ``n_right`` right
        vertices can be matched.
    """
    if graph.n_right > r * graph.n_left:
        raise ValueError(f"n_right={graph.n_right} exceeds r * n_left={r * graph.n_left}; "
                         "use left_saturated_r_matching")
    return _check(_max_r_matching(graph, r), graph.n_right, f"perfect {r}-matching")


def left_saturated_r_matching(graph: BipartiteGraph, r: int) -> MatchingResult:
    """
    Find an r-matching in which every left vertex has degree exactly ``r``.

    Requires ``n_right >= r * n_left``; right vertices beyond ``r * n_left``
    stay unmatched, chosen deterministically by the matching engine.
    """
    if graph.n_right < r * graph.n_left:
        raise ValueError(f"n_right={graph.n_right} is below r * n_left={r * graph.n_left}; "
                         "use perfect_r_matching")
    return _check(_max_r_matching(graph, r), r * graph.n_left, f"left-saturated {r}-matching")


def right_saturated_matching(graph: BipartiteGraph) -> MatchingResult:
    """Find a matching covering every right vertex, each left vertex used at most once."""
    return _check(max_matching(graph), graph.n_right, "right-saturated matching")
