from .construction import Direction, hall_violation, random_bipartite, threshold_graph
from .graph import BipartiteGraph, Infeasible, Matching
from .hopcroft_karp import max_matching
from .r_matching import (
    MatchingResult,
    clone_left,
    left_saturated_r_matching,
    perfect_r_matching,
    right_saturated_matching,
)
