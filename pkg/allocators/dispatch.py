"""Algorithm selection and the single dispatch point used by the harness and the CLI."""
import logging
import math
from enum import Enum
from typing import Optional, Tuple

from allocation_instance import Instance, Mode

from .argmax import allocate_argmax
from .ef_small import allocate_ef_small, allocate_ef_small_chores
from .outcome import AllocOutcome, SampleLog
from .proportional import allocate_prop_linear, allocate_prop_two_stage
from .sampling import allocate_sampling
from .thresholds import DEFAULT_LOG_FACTOR, proportional_r

logger = logging.getLogger(__name__)


class Algorithm(str, Enum):
    ARGMAX = "argmax"
    SAMPLING = "sampling"
    EF_SMALL = "ef_small"
    PROP_TWO_STAGE = "prop_two_stage"
    PROP_LINEAR = "prop_linear"
    CHORES_EF_SMALL = "chores_ef_small"


GOODS_ONLY = frozenset({Algorithm.SAMPLING, Algorithm.EF_SMALL, Algorithm.PROP_TWO_STAGE, Algorithm.PROP_LINEAR})
CHORES_ONLY = frozenset({Algorithm.CHORES_EF_SMALL})


def supports_mode(algorithm: Algorithm, mode: Mode) -> bool:
    algorithm, mode = Algorithm(algorithm), Mode(mode)
    if mode is Mode.GOODS:
        return algorithm not in CHORES_ONLY
    return algorithm not in GOODS_ONLY


def choose_algorithm(n: int, m: int, mode: Mode, c: Optional[float] = None) -> Algorithm:
    """
    Pick the allocator whose guarantee covers ``(n, m)``.

    Goods: argmax once m >= n ln m, the EF matching when n | m and m >= 5n,
    the two-stage proportional algorithm for n <= m <= 2n, the linear
    proportional algorithm when a mean bound ``c`` is known and m >= r(c) n.
    Chores: argmax once m >= n ln m, the two-phase EF matching otherwise.
    A single agent and anything else fall back to argmax.
    """
    mode = Mode(mode)
    if n == 1:
        return Algorithm.ARGMAX
    large = m >= 2 and m >= n * math.log(m)
    if mode is Mode.CHORES:
        return Algorithm.ARGMAX if large or m < n else Algorithm.CHORES_EF_SMALL
    if large:
        return Algorithm.ARGMAX
    if m % n == 0 and m >= 5 * n:
        return Algorithm.EF_SMALL
    if n <= m <= 2 * n:
        return Algorithm.PROP_TWO_STAGE
    if c is not None and m >= proportional_r(c) * n:
        return Algorithm.PROP_LINEAR
    return Algorithm.ARGMAX


def run_algorithm(name: Algorithm, instance: Instance, *, s: Optional[int] = None, seed: int = 0,
                  c: Optional[float] = None,
                  log_factor: float = DEFAULT_LOG_FACTOR) -> Tuple[AllocOutcome, Optional[SampleLog]]:
    """
    Run one allocator on ``instance``.

    Args:
        name: The algorithm.
        instance: The instance to allocate.
        s: Sample size; required for SAMPLING.
        seed: Seed of the sampling stream.
        c: Mean bound; required for PROP_LINEAR.
        log_factor: Threshold coefficient of the matching-based allocators.

    Returns:
        (AllocOutcome, SampleLog or None)
    """
    name = Algorithm(name)
    if not supports_mode(name, instance.mode):
        raise ValueError(f"{name.value} does not apply to {instance.mode.value} instances")
    logger.debug("Running %s on n=%d m=%d", name.value, instance.n, instance.m)

    if name is Algorithm.ARGMAX:
        return AllocOutcome.success(allocate_argmax(instance)), None
    if name is Algorithm.SAMPLING:
        if s is None:
            raise ValueError("sampling needs a sample size s")
        allocation, log = allocate_sampling(instance, s, seed)
        return AllocOutcome.success(allocation), log
    if name is Algorithm.EF_SMALL:
        return allocate_ef_small(instance, log_factor), None
    if name is Algorithm.PROP_TWO_STAGE:
        return allocate_prop_two_stage(instance, log_factor), None
    if name is Algorithm.PROP_LINEAR:
        if c is None:
            raise ValueError("prop_linear needs the mean bound c")
        return allocate_prop_linear(instance, c, log_factor), None
    return allocate_ef_small_chores(instance, log_factor), None
