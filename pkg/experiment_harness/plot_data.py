"""CSV data for external plotting: one row per (algorithm, s, m) with the mean and spread of a metric."""
import logging
import math
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .cache import TrialResult

logger = logging.getLogger(__name__)

COLUMNS = ["m", "algorithm", "s", "mean", "stddev", "trials"]


class PlotMetric(str, Enum):
    WORST_ENVY_RATIO = "worst_envy_ratio"
    FRACTION_ENVIOUS = "fraction_envious"
    WELFARE_RATIO = "welfare_ratio"
    SUCCESS_RATE = "success_rate"
    SOCIAL_WELFARE = "social_welfare"


def metric_value(result: TrialResult, metric: PlotMetric) -> Optional[float]:
    """
    The value ``result`` contributes to ``metric``.

    Infeasible trials only count towards success_rate; metrics that do not
    apply (welfare_ratio outside sampling, envy ratio for chores) give None.
    """
    if metric is PlotMetric.SUCCESS_RATE:
        return 1.0 if result.outcome.ok else 0.0
    if not result.outcome.ok:
        return None
    if metric is PlotMetric.WELFARE_RATIO:
        return result.welfare_ratio
    return getattr(result.metrics, metric.value)


def aggregate(results: Sequence[TrialResult], metric: Union[PlotMetric, str]) -> pd.DataFrame:
    """Mean, population standard deviation and count per (algorithm, s, m)."""
    metric = PlotMetric(metric)
    rows = []
    for result in results:
        value = metric_value(result, metric)
        if value is None:
            continue
        rows.append({
            "m": result.key.m,
            "algorithm": result.key.algorithm.value,
            "s": -1 if result.key.s is None else result.key.s,
            "value": float(value),
        })
    if not rows:
        return pd.DataFrame(columns=COLUMNS)

    frame = pd.DataFrame(rows)
    grouped = frame.groupby(["algorithm", "s", "m"], sort=True)["value"]
    # population standard deviation; an inf entry makes it nan
    table = grouped.agg(mean="mean", stddev=lambda column: column.std(ddof=0), trials="count").reset_index()
    table["s"] = table["s"].map(lambda s: "na" if s < 0 else str(s))
    return table[COLUMNS]


def _format(value) -> str:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def emit_plot_data(results: Sequence[TrialResult], metric: Union[PlotMetric, str], path: Union[str, Path]) -> Path:
    """
    Write the aggregated CSV for ``metric``.

    The header is ``m,algorithm,s,mean,stddev,trials`` and rows are sorted by
    (algorithm, s, m). Identical results give byte-identical files.
    """
    if not results:
        raise ValueError("no results to aggregate")
    table = aggregate(results, metric)
    lines: List[str] = [",".join(COLUMNS)]
    for row in table.itertuples(index=False):
        lines.append(",".join(_format(getattr(row, column)) for column in COLUMNS))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("Plot data for %s written to %s (%d rows)", PlotMetric(metric).value, path, len(table))
    return path
