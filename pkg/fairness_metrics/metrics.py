"""
Fairness and efficiency measurements of an allocation.

All metrics derive from the ``n x n`` bundle-value matrix
``V[i, k] = v_i(A_k)``: envy, proportionality and welfare are simple
reductions of it. Comparisons allow a 1e-12 slack for summation-order noise.
"""
import logging
import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from allocation_instance import Allocation, Instance, Mode

logger = logging.getLogger(__name__)

SLACK = 1e-12


class MetricsReport(BaseModel):
    """
    Every measurement of one allocation.

    ``envy`` and ``prop_shortfalls`` are kept on the model for callers but
    left out of the JSON form, which has the fixed fields
    {worst_envy_ratio, fraction_envious, social_welfare, is_ef, is_prop}.
    ``worst_envy_ratio`` is None for chores.
    """
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    envy: List[List[float]] = Field(default_factory=list, exclude=True)
    worst_envy_ratio: Optional[float] = Field(None, description="max_i 1 + E_i / u_i(A_i); goods only")
    fraction_envious: float = Field(..., ge=0.0, le=1.0)
    social_welfare: float = Field(..., ge=0.0)
    is_ef: bool
    is_prop: bool
    prop_shortfalls: List[float] = Field(default_factory=list, exclude=True)


class ApproxChecks(BaseModel):
    model_config = ConfigDict(frozen=True)

    c_ef: bool
    c_msw: bool


def _check_shapes(instance: Instance, alloc: Allocation):
    if alloc.n_agents != instance.n or alloc.n_items != instance.m:
        raise ValueError(f"allocation is {alloc.n_agents} agents x {alloc.n_items} items, "
                         f"instance is {instance.n} x {instance.m}")


def bundle_value_matrix(instance: Instance, alloc: Allocation) -> np.ndarray:
    """``V[i, k]`` = value agent i assigns to agent k's bundle."""
    _check_shapes(instance, alloc)
    membership = np.zeros((instance.m, instance.n), dtype=np.float64)
    membership[np.arange(instance.m), alloc.owners()] = 1.0
    return instance.values @ membership


def _envy_from(values: np.ndarray, mode: Mode) -> np.ndarray:
    own = np.diag(values)[:, np.newaxis]
    raw = values - own if mode is Mode.GOODS else own - values
    envy = np.maximum(raw, 0.0)
    np.fill_diagonal(envy, 0.0)
    return envy


def envy_matrix(instance: Instance, alloc: Allocation) -> np.ndarray:
    """
    Pairwise envy.

    Goods: ``max(0, u_i(A_k) - u_i(A_i))``. Chores: ``max(0, d_i(A_i) - d_i(A_k))``.
    The diagonal is 0.
    """
    return _envy_from(bundle_value_matrix(instance, alloc), instance.mode)


def _max_envy(envy: np.ndarray) -> np.ndarray:
    worst = envy.max(axis=1)
    return np.where(worst > SLACK, worst, 0.0)


def _worst_ratio(values: np.ndarray, envy: np.ndarray) -> float:
    worst = _max_envy(envy)
    own = np.diag(values)
    ratio = 1.0
    for agent in np.flatnonzero(worst > 0.0):
        if own[agent] <= 0.0:
            return math.inf
        ratio = max(ratio, 1.0 + worst[agent] / own[agent])
    return float(ratio)


def worst_envy_ratio(instance: Instance, alloc: Allocation) -> float:
    """
    max_i (1 + E_i / u_i(A_i)), with E_i the largest positive envy of agent i.

    Returns +inf when an envious agent values its own bundle at 0.
    """
    if instance.mode is not Mode.GOODS:
        raise ValueError("the worst envy ratio is defined for goods only")
    values = bundle_value_matrix(instance, alloc)
    return _worst_ratio(values, _envy_from(values, instance.mode))


def fraction_envious(instance: Instance, alloc: Allocation) -> float:
    """Share of agents with positive envy towards someone."""
    worst = _max_envy(envy_matrix(instance, alloc))
    return float(np.count_nonzero(worst) / instance.n)


def social_welfare(instance: Instance, alloc: Allocation) -> float:
    """Sum of own-bundle values; total disutility for chores."""
    _check_shapes(instance, alloc)
    return float(instance.values[alloc.owners(), np.arange(instance.m)].sum())


def _prop(instance: Instance, own: np.ndarray):
    share = instance.row_totals / instance.n
    if instance.mode is Mode.GOODS:
        shortfall = np.maximum(share - own, 0.0)
    else:
        shortfall = np.maximum(own - share, 0.0)
    return bool(np.all(shortfall <= SLACK)), shortfall


def is_prop(instance: Instance, alloc: Allocation) -> bool:
    """Goods: u_i(A_i) >= u_i(M) / n for all i. Chores: d_i(A_i) <= d_i(M) / n."""
    return _prop(instance, np.diag(bundle_value_matrix(instance, alloc)))[0]


def is_ef(instance: Instance, alloc: Allocation) -> bool:
    return bool(np.all(envy_matrix(instance, alloc) <= SLACK))


def approx_checks(instance: Instance, alloc: Allocation, c: float) -> ApproxChecks:
    """
    c-EF: u_i(A_i) >= c * u_i(A_k) for every pair. c-MSW: welfare >= c * optimum.

    The optimum is the argmax welfare, the column-max sum.
    """
    if instance.mode is not Mode.GOODS:
        raise ValueError("approximation checks are defined for goods only")
    if not 0.0 < c <= 1.0:
        raise ValueError(f"c must lie in (0, 1], got {c}")
    values = bundle_value_matrix(instance, alloc)
    own = np.diag(values)[:, np.newaxis]
    c_ef = bool(np.all(own >= c * values - SLACK))
    optimum = float(instance.values.max(axis=0).sum())
    c_msw = social_welfare(instance, alloc) >= c * optimum - SLACK
    return ApproxChecks(c_ef=c_ef, c_msw=bool(c_msw))


def welfare_ratio(sampled: Allocation, full: Allocation, instance: Instance) -> float:
    """social_welfare(sampled) / social_welfare(full); 1.0 when both are zero."""
    numerator = social_welfare(instance, sampled)
    denominator = social_welfare(instance, full)
    if denominator == 0.0:
        return 1.0 if numerator == 0.0 else math.inf
    return numerator / denominator


def evaluate(instance: Instance, alloc: Allocation) -> MetricsReport:
    """Compute every metric in one pass over the bundle-value matrix."""
    values = bundle_value_matrix(instance, alloc)
    envy = _envy_from(values, instance.mode)
    worst = _max_envy(envy)
    prop, shortfalls = _prop(instance, np.diag(values))
    report = MetricsReport(
        envy=envy.tolist(),
        worst_envy_ratio=_worst_ratio(values, envy) if instance.mode is Mode.GOODS else None,
        fraction_envious=float(np.count_nonzero(worst) / instance.n),
        social_welfare=social_welfare(instance, alloc),
        is_ef=bool(np.all(envy <= SLACK)),
        is_prop=prop,
        prop_shortfalls=shortfalls.tolist(),
    )
    logger.debug("Evaluated %s allocation: ef=%s prop=%s", alloc.provenance.value, report.is_ef, report.is_prop)
    return report
