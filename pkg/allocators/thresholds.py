"""Per-item thresholds for the matching-based allocators.

Goods: tau_j = 1 - k * ln(n) / (alpha_j * n). Chores: tau_j = k * ln(n) / (alpha_j * n).
The coefficient k defaults to 1.1; any k > 1 keeps the threshold-graph edge
probability at (ln n + omega(1)) / n.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from allocation_instance import Instance
from utility_distributions import pdf_bounds

logger = logging.getLogger(__name__)

DEFAULT_LOG_FACTOR = 1.1
PROP_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class Thresholds:
    """
    Attributes:
        tau: Threshold per item.
        alpha_min: Smallest density lower bound over the items.
    """
    tau: np.ndarray
    alpha_min: float


def item_alphas(instance: Instance) -> np.ndarray:
    """Density lower bound alpha_j of every item's distribution."""
    return np.array([pdf_bounds(spec).alpha for spec in instance.item_specs], dtype=np.float64)


def _threshold_gaps(instance: Instance, log_factor: float) -> tuple:
    alphas = item_alphas(instance)
    unbounded = np.flatnonzero(alphas <= 0.0)
    if unbounded.size:
        item = int(unbounded[0])
        raise ValueError(f"item {item} ({instance.item_specs[item].family.value}) has alpha_j = 0; "
                         "its threshold is undefined")
    n = instance.n
    return log_factor * math.log(n) / (alphas * n), float(alphas.min())


def goods_thresholds(instance: Instance, log_factor: float = DEFAULT_LOG_FACTOR) -> Thresholds:
    """
    tau_j = 1 - log_factor * ln(n) / (alpha_j * n), without clamping.

    Raises:
        ValueError: If some item has alpha_j = 0.
    """
    gaps, alpha_min = _threshold_gaps(instance, log_factor)
    return Thresholds(tau=1.0 - gaps, alpha_min=alpha_min)


def chores_thresholds(instance: Instance, log_factor: float = DEFAULT_LOG_FACTOR) -> Thresholds:
    """tau_j = log_factor * ln(n) / (alpha_j * n)."""
    gaps, alpha_min = _threshold_gaps(instance, log_factor)
    return Thresholds(tau=gaps, alpha_min=alpha_min)


def ceil_formula(value: float) -> int:
    # float noise such as 8.000000000000002 must not round up
    return math.ceil(value - 1e-9)


def proportional_r(c: float) -> int:
    """r = ceil(2 (3 + c) / (1 - c)), the minimum goods-per-agent ratio for the linear regime."""
    if not 0.0 <= c < 1.0:
        raise ValueError(f"mean bound c must lie in [0, 1), got {c}")
    return ceil_formula(2.0 * (3.0 + c) / (1.0 - c))
