"""
Brute-force ground truth for small instances and graphs.

Nothing here is clever on purpose: ``exhaustive_scan`` looks at all n^m
assignments, ``brute_max_matching`` tries every way to match each left
vertex, and ``definitional_flags`` recomputes EF and proportionality with
plain loops. Hard size caps raise ``OracleSizeError`` instead of silently
subsampling.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from allocation_instance import Allocation, Instance, Mode, Provenance
from matching_engine import BipartiteGraph, max_matching, random_bipartite
from utility_distributions import derive_seed

logger = logging.getLogger(__name__)

MAX_ASSIGNMENTS = 10 ** 7
MAX_LEFT_VERTICES = 8
SLACK = 1e-12
# upper bound on the number of floats materialised per chunk
_CHUNK_BUDGET = 1 << 22


class OracleSizeError(ValueError):
    """The requested brute-force computation exceeds the oracle's size cap."""


@dataclass(frozen=True)
class ExhaustiveReport:
    """
    Attributes:
        ef_exists: Some assignment is envy-free.
        prop_exists: Some assignment is proportional.
        msw_value: Best social welfare (max for goods, min disutility for chores).
        msw_allocation: First assignment, in enumeration order, attaining ``msw_value``.
        allocations_scanned: Always n^m.
    """
    ef_exists: bool
    prop_exists: bool
    msw_value: float
    msw_allocation: Allocation
    allocations_scanned: int


def _owners_of(codes: np.ndarray, n: int, m: int) -> np.ndarray:
    # item j's owner is digit j of the code in base n
    powers = n ** np.arange(m, dtype=np.int64)
    return (codes[:, np.newaxis] // powers[np.newaxis, :]) % n


def exhaustive_scan(instance: Instance) -> ExhaustiveReport:
    """
    Enumerate every assignment of items to agents.

    Raises:
        OracleSizeError: If n^m exceeds 10^7.
    """
    n, m = instance.n, instance.m
    total = n ** m
    if total > MAX_ASSIGNMENTS:
        raise OracleSizeError(f"n^m = {n}^{m} exceeds the exhaustive-scan cap of {MAX_ASSIGNMENTS}")

    goods = instance.mode is Mode.GOODS
    values = instance.values
    share = instance.row_totals / n
    chunk = max(1, _CHUNK_BUDGET // (m * n))
    ef_exists = prop_exists = False
    best_value, best_code = None, 0

    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        owners = _owners_of(codes, n, m)
        membership = (owners[:, :, np.newaxis] == np.arange(n)).astype(np.float64)
        bundle_values = np.einsum("ij,cjk->cik", values, membership)
        own = np.diagonal(bundle_values, axis1=1, axis2=2)

        if goods:
            ef = np.all(bundle_values <= own[:, :, np.newaxis] + SLACK, axis=(1, 2))
            prop = np.all(own >= share - SLACK, axis=1)
        else:
            ef = np.all(own[:, :, np.newaxis] <= bundle_values + SLACK, axis=(1, 2))
            prop = np.all(own <= share + SLACK, axis=1)
        ef_exists = ef_exists or bool(ef.any())
        prop_exists = prop_exists or bool(prop.any())

        welfare = own.sum(axis=1)
        pick = int(np.argmax(welfare) if goods else np.argmin(welfare))
        value = float(welfare[pick])
        if best_value is None or (value > best_value if goods else value < best_value):
            best_value, best_code = value, int(codes[pick])

    owners = _owners_of(np.array([best_code], dtype=np.int64), n, m)[0]
    # same summation as social_welfare so the optimum compares exactly
    best_value = float(values[owners, np.arange(m)].sum())
    logger.debug("Exhaustive scan of %d assignments: ef=%s prop=%s", total, ef_exists, prop_exists)
    return ExhaustiveReport(
        ef_exists=ef_exists,
        prop_exists=prop_exists,
        msw_value=best_value,
        msw_allocation=Allocation.from_owners(owners, n, Provenance.EXTERNAL),
        allocations_scanned=total,
    )


def brute_max_matching(graph: BipartiteGraph) -> int:
    """
    Maximum matching cardinality by trying every choice for every left vertex.

    Raises:
        OracleSizeError: If the graph has more than 8 left vertices.
    """
    if graph.n_left > MAX_LEFT_VERTICES:
        raise OracleSizeError(f"brute-force matching is capped at {MAX_LEFT_VERTICES} left vertices, "
                              f"got {graph.n_left}")
    adjacency = graph.adjacency

    @lru_cache(maxsize=None)
    def best(left: int, used: int) -> int:
        if left == len(adjacency):
            return 0
        found = best(left + 1, used)
        for right in adjacency[left]:
            if not used >> right & 1:
                found = max(found, 1 + best(left + 1, used | 1 << right))
        return found

    return best(0, 0)


def matching_rate(n_left: int, n_right: int, p: float, trials: int, seed: int) -> float:
    """
    Fraction of seeded G(n_left, n_right, p) graphs with a matching saturating every right vertex
    (a perfect matching when the sides are equal).

    Trial t uses the graph seed ``derive_seed(seed, t)``.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    needed = n_right
    hits = 0
    for trial in range(trials):
        graph = random_bipartite(n_left, n_right, p, derive_seed(seed, trial))
        hits += max_matching(graph).cardinality == needed
    return hits / trials


def definitional_flags(instance: Instance, alloc: Allocation) -> Tuple[bool, bool]:
    """(is_ef, is_prop) straight from the definitions, one agent and bundle at a time."""
    n = instance.n
    goods = instance.mode is Mode.GOODS
    rows = instance.values.tolist()
    ef = prop = True
    for agent in range(n):
        row = rows[agent]
        own = sum(row[item] for item in alloc.bundles[agent])
        for other in range(n):
            theirs = sum(row[item] for item in alloc.bundles[other])
            if (theirs > own + SLACK) if goods else (own > theirs + SLACK):
                ef = False
        share = sum(row) / n
        if (own < share - SLACK) if goods else (own > share + SLACK):
            prop = False
    return ef, prop
