"""Allocations: partitions of the item set into one bundle per agent."""
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Tuple

import numpy as np


class Provenance(str, Enum):
    """Which algorithm produced an allocation."""
    ARGMAX = "argmax"
    SAMPLING = "sampling"
    EF_SMALL = "ef_small"
    PROP_TWO_STAGE = "prop_two_stage"
    PROP_LINEAR = "prop_linear"
    CHORES_EF_SMALL = "chores_ef_small"
    EXTERNAL = "external"


@dataclass(frozen=True)
class Allocation:
    """
    A partition of items ``0..n_items-1`` into ``len(bundles)`` bundles.

    Construction rejects overlapping bundles, missing items and
    out-of-range item indices.
    """
    bundles: Tuple[Tuple[int, ...], ...]
    n_items: int
    provenance: Provenance = Provenance.EXTERNAL

    def __post_init__(self):
        bundles = tuple(tuple(sorted(int(j) for j in bundle)) for bundle in self.bundles)
        object.__setattr__(self, "bundles", bundles)
        if not bundles:
            raise ValueError("An allocation needs at least one agent")
        seen = np.zeros(self.n_items, dtype=np.int64)
        for agent, bundle in enumerate(bundles):
            for item in bundle:
                if not 0 <= item < self.n_items:
                    raise ValueError(f"Agent {agent} holds out-of-range item {item}")
                seen[item] += 1
        overlapping = np.flatnonzero(seen > 1)
        if overlapping.size:
            raise ValueError(f"Items assigned to several agents: {overlapping.tolist()}")
        missing = np.flatnonzero(seen == 0)
        if missing.size:
            raise ValueError(f"Items left unassigned: {missing.tolist()}")

    @classmethod
    def from_owners(cls, owners: Sequence[int], n_agents: int,
                    provenance: Provenance = Provenance.EXTERNAL) -> "Allocation":
        """Build an allocation from the owning agent of each item."""
        owners = np.asarray(owners, dtype=np.int64)
        if owners.size and (owners.min() < 0 or owners.max() >= n_agents):
            raise ValueError(f"Owner indices must lie in [0, {n_agents})")
        order = np.argsort(owners, kind="stable")
        boundaries = np.searchsorted(owners[order], np.arange(n_agents + 1))
        bundles = tuple(tuple(order[boundaries[i]:boundaries[i + 1]].tolist()) for i in range(n_agents))
        return cls(bundles=bundles, n_items=int(owners.size), provenance=provenance)

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]], n_items: int,
                     provenance: Provenance = Provenance.EXTERNAL) -> "Allocation":
        return cls(bundles=tuple(tuple(bundle) for bundle in bundles), n_items=n_items, provenance=provenance)

    @property
    def n_agents(self) -> int:
        return len(self.bundles)

    def owners(self) -> np.ndarray:
        """Owning agent of every item."""
        owners = np.empty(self.n_items, dtype=np.int64)
        for agent, bundle in enumerate(self.bundles):
            owners[list(bundle)] = agent
        return owners
