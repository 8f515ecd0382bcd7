"""
Per-trial result cache.

One JSON file per TrialResult under
``output_dir/<mixture>/<algorithm>/n<n>_m<m>_s<s|na>_t<trial>.json``.
Files are write-once: a result is written to a temporary file and hard-linked
into place, so a concurrent writer of the same key either wins or finds the
file already there. Every file records the fingerprint of the config that
produced it; loading it under a different fingerprint is an error.
"""
import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from allocators import Algorithm, Stage
from fairness_metrics import MetricsReport

from .config import ExperimentConfig

logger = logging.getLogger(__name__)


class CacheConflictError(RuntimeError):
    """A cached file was produced by a different configuration."""


class TrialKey(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    m: int
    s: Optional[int] = None
    mixture: str
    algorithm: Algorithm
    trial: int


class TrialOutcome(BaseModel):
    """Success flag, or the failing stage with the matching sizes."""
    model_config = ConfigDict(frozen=True)

    ok: bool
    stage: Optional[Stage] = None
    matched: Optional[int] = None
    required: Optional[int] = None


class TrialResult(BaseModel):
    """
    Attributes:
        key: Which point of the grid this is.
        metrics: Fairness metrics; None for infeasible outcomes.
        outcome: Success or the failing stage.
        welfare_ratio: Sampled welfare over same-trial argmax welfare (sampling only).
        wall_time_ms: Allocator plus metrics time.
        seed: The per-trial instance seed.
        fingerprint: Fingerprint of the producing config.
    """
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    key: TrialKey
    metrics: Optional[MetricsReport] = None
    outcome: TrialOutcome
    welfare_ratio: Optional[float] = None
    wall_time_ms: float = Field(..., ge=0.0)
    seed: int
    fingerprint: str


def fingerprint(config: ExperimentConfig) -> str:
    """Hash of everything besides the key that changes a trial's numbers."""
    payload = {
        "mode": config.mode.value,
        "base_seed": config.base_seed,
        "log_factor": config.log_factor,
        "c": config.c,
        "mixture": config.mixture.model_dump(mode="json"),
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()[:16]


def cache_path(output_dir: Path, key: TrialKey) -> Path:
    s = "na" if key.s is None else str(key.s)
    return Path(output_dir) / key.mixture / key.algorithm.value / f"n{key.n}_m{key.m}_s{s}_t{key.trial}.json"


def load_result(path: Path, expected_fingerprint: str) -> Optional[TrialResult]:
    """
    The cached result at ``path``, or None when absent.

    Raises:
        CacheConflictError: If the file was written under another fingerprint.
    """
    if not path.exists():
        return None
    # json.loads accepts the Infinity constants pydantic writes
    result = TrialResult.model_validate(json.loads(path.read_text(encoding="utf-8")))
    if result.fingerprint != expected_fingerprint:
        logger.warning("Fingerprint mismatch at %s: cached %s, running %s",
                       path, result.fingerprint, expected_fingerprint)
        raise CacheConflictError(f"{path} was produced by a different config "
                                 f"(fingerprint {result.fingerprint}, expected {expected_fingerprint}); "
                                 "use another output_dir")
    return result


def store_result(path: Path, result: TrialResult) -> bool:
    """
    Write ``result`` unless the file already exists.

    Returns:
        bool: True if this call created the file.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(result.model_dump_json())
        try:
            os.link(temp_name, path)
        except FileExistsError:
            logger.debug("Cache file %s already written by another worker", path)
            return False
        return True
    finally:
        os.unlink(temp_name)
