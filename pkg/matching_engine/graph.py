"""Bipartite graphs and matchings.

Vertices on both sides are indexed ``0, 1, ...``. Adjacency lists are kept
sorted so every algorithm that walks them is deterministic.
"""
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class BipartiteGraph:
    """
    Data structure representing a bipartite graph G = (L, R, E).

    Attributes:
        n_left: Number of left vertices.
        n_right: Number of right vertices.
        adjacency: For each left vertex, the sorted right vertices it is adjacent to.
    """
    n_left: int
    n_right: int
    adjacency: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.n_left < 0 or self.n_right < 0:
            raise ValueError("vertex counts must be non-negative")
        if len(self.adjacency) != self.n_left:
            raise ValueError(f"expected {self.n_left} adjacency lists, got {len(self.adjacency)}")
        adjacency = []
        for left, neighbours in enumerate(self.adjacency):
            row = tuple(sorted(int(v) for v in neighbours))
            if len(set(row)) != len(row):
                raise ValueError(f"left vertex {left} has duplicate edges")
            if row and (row[0] < 0 or row[-1] >= self.n_right):
                raise ValueError(f"left vertex {left} has an edge outside [0, {self.n_right})")
            adjacency.append(row)
        object.__setattr__(self, "adjacency", tuple(adjacency))

    @classmethod
    def from_edges(cls, n_left: int, n_right: int, edges: Iterable[Tuple[int, int]]) -> "BipartiteGraph":
        rows: List[set] = [set() for _ in range(n_left)]
        for left, right in edges:
            if not 0 <= left < n_left:
                raise ValueError(f"edge ({left}, {right}) has an out-of-range left vertex")
            rows[left].add(right)
        return cls(n_left=n_left, n_right=n_right, adjacency=tuple(tuple(row) for row in rows))

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "BipartiteGraph":
        """Graph whose edge (i, j) exists iff ``mask[i, j]`` is true."""
        mask = np.asarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise ValueError("mask must be two-dimensional")
        adjacency = tuple(tuple(np.flatnonzero(row).tolist()) for row in mask)
        return cls(n_left=mask.shape[0], n_right=mask.shape[1], adjacency=adjacency)

    @property
    def n_edges(self) -> int:
        return sum(len(row) for row in self.adjacency)

    def has_edge(self, left: int, right: int) -> bool:
        row = self.adjacency[left]
        position = int(np.searchsorted(row, right))
        return position < len(row) and row[position] == right

    def neighbours(self, lefts: Iterable[int]) -> set:
        found = set()
        for left in lefts:
            found.update(self.adjacency[left])
        return found

    def edges(self) -> List[Tuple[int, int]]:
        return [(left, right) for left, row in enumerate(self.adjacency) for right in row]

    def transpose(self) -> "BipartiteGraph":
        """The same graph with the left and right sides swapped."""
        rows: List[List[int]] = [[] for _ in range(self.n_right)]
        for left, row in enumerate(self.adjacency):
            for right in row:
                rows[right].append(left)
        return BipartiteGraph(n_left=self.n_right, n_right=self.n_left, adjacency=tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class Matching:
    """
    A matching (or r-matching) of a bipartite graph.

    Attributes:
        right_to_left: For each right vertex its matched left vertex, or None.
        left_degree: Number of right vertices matched to each left vertex.
    """
    right_to_left: Tuple[Optional[int], ...]
    left_degree: Tuple[int, ...]

    ok = True

    @classmethod
    def from_right_to_left(cls, right_to_left: Sequence[Optional[int]], n_left: int) -> "Matching":
        degree = [0] * n_left
        for left in right_to_left:
            if left is not None:
                degree[left] += 1
        return cls(right_to_left=tuple(right_to_left), left_degree=tuple(degree))

    @property
    def cardinality(self) -> int:
        return sum(1 for left in self.right_to_left if left is not None)

    def pairs(self) -> List[Tuple[int, int]]:
        """Matched ``(left, right)`` pairs in ascending right-vertex order."""
        return [(left, right) for right, left in enumerate(self.right_to_left) if left is not None]

    def rights_of(self, left: int) -> List[int]:
        return [right for right, owner in enumerate(self.right_to_left) if owner == left]

    def is_valid_for(self, graph: BipartiteGraph) -> bool:
        """True iff every recorded pair is an edge of ``graph``."""
        return all(graph.has_edge(left, right) for left, right in self.pairs())


@dataclass(frozen=True)
class Infeasible:
    """
    A matching request that cannot be met.

    Attributes:
        matched: Cardinality the engine reached.
        required: Cardinality the request needs.
        best: The maximum matching found on the (cloned) graph.
    """
    matched: int
    required: int
    best: Optional[Matching] = None

    ok = False
