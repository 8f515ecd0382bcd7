"""Family mixtures used to draw per-item distributions for experiments.

Each item draws fresh parameters from the mixture's hyper-parameter ranges,
so no two items share a law unless the ranges are degenerate.
"""
import hashlib
import logging
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .distributions import DistributionSpec
from .rng import SeededRng

logger = logging.getLogger(__name__)

Range = Tuple[float, float]


class MixtureName(str, Enum):
    BETA_UNIFORM = "beta_uniform"
    NORMAL_UNIFORM = "normal_uniform"
    UNIFORM_ONLY = "uniform_only"
    DISCRETE_ATOM1 = "discrete_atom1"


class FamilyMixture(BaseModel):
    """
    Hyper-parameter ranges from which each item's distribution is drawn.

    Attributes:
        name: Mixture family.
        family_weight: Probability of the non-uniform component in the
            beta_uniform and normal_uniform mixtures.
        uniform_a / uniform_b: Ranges for the Uniform[a, b] endpoints. b defaults
            to 1 so every agent can clear the matching allocators' thresholds,
            which approach 1 as n grows.
        beta_shape1 / beta_shape2: Ranges for the Beta shapes.
        normal_loc / normal_scale: Ranges for the truncated normal location and scale.
        discrete_points: Inclusive range for the number of support points below 1.
        discrete_max_point: Upper limit for the support points below 1.
        atom_mass_floor / atom_mass_ceiling: Range for the mass placed on the value 1.
    """
    model_config = ConfigDict(frozen=True)

    name: MixtureName = Field(..., description="Mixture family")
    family_weight: float = Field(default=0.5, ge=0.0, le=1.0)
    uniform_a: Range = Field(default=(0.2, 0.5))
    uniform_b: Range = Field(default=(1.0, 1.0))
    beta_shape1: Range = Field(default=(2.0, 6.0))
    beta_shape2: Range = Field(default=(0.5, 1.5))
    normal_loc: Range = Field(default=(0.3, 0.7))
    normal_scale: Range = Field(default=(0.1, 0.3))
    discrete_points: Tuple[int, int] = Field(default=(1, 4))
    discrete_max_point: float = Field(default=0.9, ge=0.0, lt=1.0)
    atom_mass_floor: float = Field(default=0.2, gt=0.0, le=1.0)
    atom_mass_ceiling: float = Field(default=0.5, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "FamilyMixture":
        for field_name in ("uniform_a", "uniform_b", "beta_shape1", "beta_shape2",
                           "normal_loc", "normal_scale", "discrete_points"):
            low, high = getattr(self, field_name)
            if low > high:
                raise ValueError(f"{field_name} range is reversed: ({low}, {high})")
        if not (0.0 <= self.uniform_a[0] and self.uniform_b[1] <= 1.0):
            raise ValueError("uniform ranges must lie inside [0, 1]")
        if self.uniform_a[1] >= self.uniform_b[0]:
            raise ValueError("uniform_a must lie strictly below uniform_b so that a < b")
        if self.beta_shape1[0] <= 0.0 or self.beta_shape2[0] <= 0.0:
            raise ValueError("beta shapes must be positive")
        if self.normal_scale[0] <= 0.0:
            raise ValueError("normal_scale must be positive")
        if self.discrete_points[0] < 1:
            raise ValueError("discrete_points must allow at least one point below 1")
        if self.atom_mass_floor > self.atom_mass_ceiling:
            raise ValueError("atom_mass_floor exceeds atom_mass_ceiling")
        return self

    def cache_tag(self) -> str:
        """Directory-safe identifier; the bare name when all ranges are defaults."""
        if self == FamilyMixture(name=self.name):
            return self.name.value
        digest = hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()[:8]
        return f"{self.name.value}-{digest}"


def _draw_uniform(mixture: FamilyMixture, rng: SeededRng) -> DistributionSpec:
    a = rng.uniform(*mixture.uniform_a)
    b = rng.uniform(*mixture.uniform_b)
    return DistributionSpec.uniform(a, b)


def _draw_discrete(mixture: FamilyMixture, rng: SeededRng) -> DistributionSpec:
    count = int(rng.integers(mixture.discrete_points[0], mixture.discrete_points[1] + 1))
    lower = np.unique(rng.uniform(0.0, mixture.discrete_max_point, size=count))
    atom = rng.uniform(mixture.atom_mass_floor, mixture.atom_mass_ceiling)
    rest = rng.dirichlet(np.ones(lower.size)) * (1.0 - atom)
    probs = np.append(rest, 1.0 - rest.sum())
    return DistributionSpec.discrete(np.append(lower, 1.0), probs)


def draw_item_spec(mixture: FamilyMixture, rng: SeededRng) -> DistributionSpec:
    """
    Draw one item's distribution from ``mixture``.

    Args:
        mixture: Mixture family and hyper-parameter ranges.
        rng: The item's own generator.

    Returns:
        DistributionSpec: Freshly parameterised spec for this item.
    """
    if mixture.name is MixtureName.UNIFORM_ONLY:
        return _draw_uniform(mixture, rng)
    if mixture.name is MixtureName.DISCRETE_ATOM1:
        return _draw_discrete(mixture, rng)
    if rng.random() >= mixture.family_weight:
        return _draw_uniform(mixture, rng)
    if mixture.name is MixtureName.BETA_UNIFORM:
        return DistributionSpec.beta(rng.uniform(*mixture.beta_shape1), rng.uniform(*mixture.beta_shape2))
    return DistributionSpec.truncated_normal(rng.uniform(*mixture.normal_loc), rng.uniform(*mixture.normal_scale))
