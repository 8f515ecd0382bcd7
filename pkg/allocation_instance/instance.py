"""Random fair-division instances.

An ``Instance`` holds the dense ``n x m`` utility (goods) or disutility
(chores) matrix together with the distribution each item was drawn from.
The matrix is generated eagerly, once per trial, so every allocator in a
trial reads the same numbers.
"""
import json
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from utility_distributions import DistributionSpec, FamilyMixture, draw_item_spec, make_rng, sample_many

logger = logging.getLogger(__name__)


class Mode(str, Enum):
    GOODS = "goods"
    CHORES = "chores"


@dataclass(frozen=True, eq=False)
class Instance:
    """
    A fair-division instance.

    Attributes:
        values: ``n x m`` float64 matrix in [0, 1], read-only; ``values[i, j]``
            is u_i(j) for goods and d_i(j) for chores.
        item_specs: The distribution of each item.
        mode: Goods or chores.
        seed: Master seed the matrix was generated from (None when hand-built).
        mixture: Mixture the item specs were drawn from (None when hand-built).
    """
    values: np.ndarray
    item_specs: Tuple[DistributionSpec, ...]
    mode: Mode = Mode.GOODS
    seed: Optional[int] = None
    mixture: Optional[FamilyMixture] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order="C")
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"values must be a non-empty n x m matrix, got shape {values.shape}")
        if not np.all((values >= 0.0) & (values <= 1.0)):
            raise ValueError("every value must lie in [0, 1]")
        if len(self.item_specs) != values.shape[1]:
            raise ValueError(f"expected {values.shape[1]} item specs, got {len(self.item_specs)}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "item_specs", tuple(self.item_specs))
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_values(cls, values: Union[Sequence[Sequence[float]], np.ndarray], mode: Mode = Mode.GOODS,
                    item_specs: Optional[Sequence[DistributionSpec]] = None) -> "Instance":
        """
        Build an instance from an explicit matrix.

        Item specs default to Uniform(0, 1), which makes every threshold
        formula use alpha_j = 1.
        """
        values = np.asarray(values, dtype=np.float64)
        if item_specs is None:
            item_specs = [DistributionSpec.uniform(0.0, 1.0)] * (values.shape[1] if values.ndim == 2 else 0)
        return cls(values=values, item_specs=tuple(item_specs), mode=mode)

    @cached_property
    def row_totals(self) -> np.ndarray:
        """u_i(M) (or d_i(M)) for every agent."""
        return self.values.sum(axis=1)

    def bundle_value(self, agent: int, bundle: Iterable[int]) -> float:
        return bundle_value(self, agent, bundle)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "mode": self.mode.value,
            "seed": self.seed,
            "mixture": self.mixture.model_dump(mode="json") if self.mixture else None,
            "item_specs": [spec.model_dump(mode="json") for spec in self.item_specs],
            "values": self.values.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Instance":
        values = np.asarray(payload["values"], dtype=np.float64)
        if values.shape != (payload["n"], payload["m"]):
            raise ValueError(f"values shape {values.shape} does not match n={payload['n']}, m={payload['m']}")
        return cls(
            values=values,
            item_specs=tuple(DistributionSpec.model_validate(spec) for spec in payload["item_specs"]),
            mode=Mode(payload["mode"]),
            seed=payload.get("seed"),
            mixture=FamilyMixture.model_validate(payload["mixture"]) if payload.get("mixture") else None,
        )


def generate(n: int, m: int, mode: Mode, mixture: FamilyMixture, seed: int) -> Instance:
    """
    Generate a random instance.

    Item ``j`` owns the stream ``make_rng(seed, j)``: it first draws its
    distribution from ``mixture`` and then the ``n`` agents' values, so the
    matrix is a pure function of ``(n, m, mode, mixture, seed)``.

    Args:
        n: Number of agents (>= 1).
        m: Number of items (>= 1).
        mode: Goods or chores.
        mixture: Family mixture the item distributions are drawn from.
        seed: Master seed.

    Returns:
        Instance: The generated instance.
    """
    if n < 1 or m < 1:
        raise ValueError(f"n and m must be positive, got n={n}, m={m}")
    values = np.empty((n, m), dtype=np.float64)
    specs = []
    for item in range(m):
        rng = make_rng(seed, item)
        spec = draw_item_spec(mixture, rng)
        values[:, item] = sample_many(spec, rng, n)
        specs.append(spec)
    logger.debug("Generated %s instance n=%d m=%d mixture=%s seed=%d", mode.value, n, m, mixture.name.value, seed)
    return Instance(values=values, item_specs=tuple(specs), mode=mode, seed=seed, mixture=mixture)


def bundle_value(instance: Instance, agent: int, bundle: Iterable[int]) -> float:
    """
    Additive value of ``bundle`` for ``agent``.

    Raises:
        IndexError: If the agent or an item index is out of range.
    """
    if not 0 <= agent < instance.n:
        raise IndexError(f"agent {agent} out of range for n={instance.n}")
    items = np.fromiter((int(j) for j in bundle), dtype=np.int64)
    if items.size == 0:
        return 0.0
    if items.min() < 0 or items.max() >= instance.m:
        raise IndexError(f"bundle holds items outside [0, {instance.m})")
    return float(instance.values[agent, items].sum())


def save_instance(instance: Instance, path: Union[str, Path]) -> Path:
    """Write the JSON dump; floats use the shortest round-trip repr."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(instance.to_dict()), encoding="utf-8")
    logger.info("Instance written to %s", path)
    return path


def load_instance(path: Union[str, Path]) -> Instance:
    return Instance.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
