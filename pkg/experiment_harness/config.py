"""Experiment configuration: one JSON file describing a grid of (m, algorithm, s, trial) points."""
import json
import logging
from pathlib import Path
from typing import Any, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from allocation_instance import Mode
from allocators import Algorithm, proportional_r, supports_mode
from utility_distributions import FamilyMixture

from .settings import get_settings

logger = logging.getLogger(__name__)


class ExperimentConfig(BaseModel):
    """
    A seeded experiment.

    Every trial generates one instance per m, shared by all algorithms in
    the config. ``mixture`` accepts a bare name (``"beta_uniform"``) or a
    full mixture object with custom ranges. ``trials``, ``output_dir`` and
    ``log_factor`` default to the harness settings.
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Number of agents")
    m_values: List[int] = Field(..., min_length=1, description="Item counts to sweep")
    mode: Mode = Field(default=Mode.GOODS)
    mixture: FamilyMixture = Field(..., description="Mixture the item laws are drawn from")
    algorithms: List[Algorithm] = Field(..., min_length=1)
    s_values: List[int] = Field(default_factory=list, description="Sample sizes for the sampling allocator")
    trials: int = Field(default_factory=lambda: get_settings().default_trials, ge=1)
    base_seed: int = Field(default=0, ge=0)
    c: Optional[float] = Field(default=None, ge=0.0, lt=1.0, description="Mean bound for prop_linear")
    output_dir: Path = Field(default_factory=lambda: get_settings().output_dir)
    log_factor: float = Field(default_factory=lambda: get_settings().log_factor, gt=1.0)

    @field_validator("mixture", mode="before")
    @classmethod
    def _mixture_by_name(cls, value: Any) -> Any:
        if isinstance(value, str):
            return {"name": value}
        return value

    @field_validator("m_values")
    @classmethod
    def _positive_m(cls, value: List[int]) -> List[int]:
        if any(m < 1 for m in value):
            raise ValueError("every m must be positive")
        if len(set(value)) != len(value):
            raise ValueError("m_values contains duplicates")
        return value

    @model_validator(mode="after")
    def _check_algorithms(self) -> "ExperimentConfig":
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("algorithms contains duplicates")
        for algorithm in self.algorithms:
            if not supports_mode(algorithm, self.mode):
                raise ValueError(f"algorithms: {algorithm.value} does not apply to {self.mode.value}")

        n = self.n
        if Algorithm.SAMPLING in self.algorithms:
            if not self.s_values:
                raise ValueError("s_values: sampling needs at least one sample size")
            bad = [s for s in self.s_values if not 1 <= s <= n]
            if bad:
                raise ValueError(f"s_values: {bad} outside [1, {n}]")
        elif self.s_values:
            raise ValueError("s_values: only the sampling allocator takes a sample size")

        for m in self.m_values:
            if Algorithm.EF_SMALL in self.algorithms and m % n:
                raise ValueError(f"m_values: ef_small needs n | m, got m={m}")
            if Algorithm.PROP_TWO_STAGE in self.algorithms and not n <= m <= 2 * n:
                raise ValueError(f"m_values: prop_two_stage needs n <= m <= 2n, got m={m}")
            if Algorithm.CHORES_EF_SMALL in self.algorithms and m < n:
                raise ValueError(f"m_values: chores_ef_small needs m >= n, got m={m}")
            if Algorithm.SAMPLING in self.algorithms and m < 2:
                raise ValueError("m_values: sampling needs m >= 2")
        if Algorithm.PROP_LINEAR in self.algorithms:
            if self.c is None:
                raise ValueError("c: prop_linear needs the mean bound")
            r = proportional_r(self.c)
            bad = [m for m in self.m_values if m < r * n]
            if bad:
                raise ValueError(f"m_values: prop_linear needs m >= {r} * {n}, got {bad}")
        return self

    def sample_sizes(self, algorithm: Algorithm) -> List[Optional[int]]:
        """The s values a given algorithm is run with; ``[None]`` when it takes none."""
        return list(self.s_values) if algorithm is Algorithm.SAMPLING else [None]


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate a JSON config file."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    config = ExperimentConfig.model_validate(payload)
    logger.info("Loaded config %s: n=%d, %d m values, %d algorithms, %d trials",
                path, config.n, len(config.m_values), len(config.algorithms), config.trials)
    return config
