"""Allocator results.

Matching-based allocators either succeed with an ``Allocation`` or report
which matching could not be found. A failure is a first-class result rather
than an exception, so experiment runs can measure failure rates.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from allocation_instance import Allocation


class Stage(str, Enum):
    """The matching step that failed."""
    PERFECT_X_MATCHING = "perfect_x_matching"
    STAGE1 = "stage1"
    STAGE2 = "stage2"
    LEFT_SATURATED_X_MATCHING = "left_saturated_x_matching"
    PHASE1 = "phase1"
    PHASE2 = "phase2"


@dataclass(frozen=True)
class InfeasibleOutcome:
    stage: Stage
    matched: int
    required: int
    detail: str = ""


@dataclass(frozen=True)
class AllocOutcome:
    """
    Either a successful allocation or the stage at which the algorithm stopped.

    Attributes:
        result: The ``Allocation`` on success, an ``InfeasibleOutcome`` otherwise.
    """
    result: Union[Allocation, InfeasibleOutcome]

    @classmethod
    def success(cls, allocation: Allocation) -> "AllocOutcome":
        return cls(result=allocation)

    @classmethod
    def infeasible(cls, stage: Stage, matched: int, required: int, detail: str = "") -> "AllocOutcome":
        return cls(result=InfeasibleOutcome(stage=stage, matched=matched, required=required, detail=detail))

    @property
    def ok(self) -> bool:
        return isinstance(self.result, Allocation)

    @property
    def allocation(self) -> Optional[Allocation]:
        return self.result if self.ok else None

    @property
    def stage(self) -> Optional[Stage]:
        return None if self.ok else self.result.stage


@dataclass(frozen=True, eq=False)
class SampleLog:
    """
    What the sampling allocator looked at.

    Attributes:
        sampled: ``m x s`` array; row j holds the sampled agents S_j in ascending order.
        winners: Winning agent per item.
        winning_values: The winner's value per item.
    """
    sampled: np.ndarray
    winners: np.ndarray
    winning_values: np.ndarray
