"""
Maximum-cardinality bipartite matching (Hopcroft-Karp).

Each phase runs a breadth-first search from the free left vertices to layer
the graph, then an iterative depth-first search that augments along
vertex-disjoint shortest paths. Left vertices and adjacency lists are
visited in ascending index order, so the returned matching is a
deterministic function of the graph.
"""
import logging
from collections import deque
from typing import List

from .graph import BipartiteGraph, Matching

logger = logging.getLogger(__name__)

FREE = -1
DEAD = -2


def _layer(graph: BipartiteGraph, match_left: List[int], match_right: List[int], dist: List[int]) -> bool:
    """
    Find shortest alternating paths from free left vertices to free right
    vertices via a breadth-first search. Returns True if one exists.
    """
    queue = deque()
    for left in range(graph.n_left):
        if match_left[left] == FREE:
            dist[left] = 0
            queue.append(left)
        else:
            dist[left] = FREE
    found = False
    while queue:
        left = queue.popleft()
        for right in graph.adjacency[left]:
            partner = match_right[right]
            if partner == FREE:
                found = True
            elif dist[partner] == FREE:
                dist[partner] = dist[left] + 1
                queue.append(partner)
    return found


def _augment_from(root: int, graph: BipartiteGraph, match_left: List[int], match_right: List[int],
                  dist: List[int], cursor: List[int]) -> bool:
    """Depth-first search for an augmenting path starting at the free vertex ``root``."""
    stack = [root]
    via: List[int] = []
    while stack:
        left = stack[-1]
        row = graph.adjacency[left]
        descended = False
        while cursor[left] < len(row):
            right = row[cursor[left]]
            cursor[left] += 1
            partner = match_right[right]
            if partner == FREE:
                for path_left, path_right in zip(stack, via + [right]):
                    match_left[path_left] = path_right
                    match_right[path_right] = path_left
                return True
            if dist[partner] == dist[left] + 1:
                stack.append(partner)
                via.append(right)
                descended = True
                break
        if not descended:
            # no augmenting continuation from here in this phase
            dist[left] = DEAD
            stack.pop()
            if via:
                via.pop()
    return False


def max_matching(graph: BipartiteGraph) -> Matching:
    """
    Compute a maximum-cardinality matching.

    Args:
        graph: The bipartite graph.

    Returns:
        Matching: A maximum matching; ties between maximum matchings are
        broken by ascending vertex and adjacency order.
    """
    match_left = [FREE] * graph.n_left
    match_right = [FREE] * graph.n_right
    dist = [FREE] * graph.n_left
    phases = 0
    while _layer(graph, match_left, match_right, dist):
        phases += 1
        cursor = [0] * graph.n_left
        for root in range(graph.n_left):
            if match_left[root] == FREE and dist[root] == 0:
                _augment_from(root, graph, match_left, match_right, dist, cursor)
    matching = Matching.from_right_to_left(
        [None if left == FREE else left for left in match_right], graph.n_left)
    logger.debug("Hopcroft-Karp: %d phases, cardinality %d on %dx%d graph with %d edges",
                 phases, matching.cardinality, graph.n_left, graph.n_right, graph.n_edges)
    return matching
