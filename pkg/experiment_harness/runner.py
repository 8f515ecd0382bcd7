"""
Seeded experiment runner.

Work is split into (m, trial) units. A unit generates one instance from the
per-trial seed, runs every (algorithm, s) point of the config that is not
cached yet, and writes each result to the cache. Units are independent, so
they can run in a process pool.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

from allocation_instance import Instance, generate
from allocators import Algorithm, allocate_argmax, run_algorithm
from fairness_metrics import evaluate, welfare_ratio
from utility_distributions import derive_seed

from .cache import TrialKey, TrialOutcome, TrialResult, cache_path, fingerprint, load_result, store_result
from .config import ExperimentConfig

logger = logging.getLogger(__name__)

# stream key separating sampling randomness from instance generation
SAMPLING_STREAM = 1


@dataclass
class RunStats:
    computed: int = 0
    cached: int = 0


def trial_seed(config: ExperimentConfig, trial: int) -> int:
    return derive_seed(config.base_seed, trial)


def sampling_seed(seed: int, s: int) -> int:
    return derive_seed(seed, SAMPLING_STREAM, s)


def _compute(config: ExperimentConfig, instance: Instance, key: TrialKey, seed: int, digest: str) -> TrialResult:
    started = time.perf_counter()
    outcome, _ = run_algorithm(key.algorithm, instance, s=key.s,
                               seed=sampling_seed(seed, key.s or 0),
                               c=config.c, log_factor=config.log_factor)
    metrics = ratio = None
    if outcome.ok:
        metrics = evaluate(instance, outcome.allocation)
        if key.algorithm is Algorithm.SAMPLING:
            ratio = welfare_ratio(outcome.allocation, allocate_argmax(instance), instance)
        status = TrialOutcome(ok=True)
    else:
        failure = outcome.result
        status = TrialOutcome(ok=False, stage=failure.stage, matched=failure.matched, required=failure.required)
    elapsed = (time.perf_counter() - started) * 1000.0
    return TrialResult(key=key, metrics=metrics, outcome=status, welfare_ratio=ratio,
                       wall_time_ms=elapsed, seed=seed, fingerprint=digest)


def run_unit(config: ExperimentConfig, m: int, trial: int) -> Tuple[List[TrialResult], RunStats]:
    """Run every (algorithm, s) point for one (m, trial), loading what is cached."""
    digest = fingerprint(config)
    seed = trial_seed(config, trial)
    tag = config.mixture.cache_tag()
    stats = RunStats()
    results: List[TrialResult] = []
    instance: Optional[Instance] = None

    for algorithm in config.algorithms:
        for s in config.sample_sizes(algorithm):
            key = TrialKey(n=config.n, m=m, s=s, mixture=tag, algorithm=algorithm, trial=trial)
            path = cache_path(config.output_dir, key)
            result = load_result(path, digest)
            if result is not None:
                stats.cached += 1
            else:
                if instance is None:
                    instance = generate(config.n, m, config.mode, config.mixture, seed)
                result = _compute(config, instance, key, seed, digest)
                store_result(path, result)
                stats.computed += 1
                logger.debug("Computed %s m=%d s=%s trial=%d in %.1f ms",
                             algorithm.value, m, s, trial, result.wall_time_ms)
            results.append(result)
    return results, stats


class ExperimentRunner:
    """
    Runs an ExperimentConfig against the result cache.

    Attributes:
        config: The experiment.
        jobs: Worker processes; 1 runs in-process.
        stats: Computed and cached counts of the last ``run``.
    """

    def __init__(self, config: ExperimentConfig, jobs: int = 1):
        if jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {jobs}")
        self.config = config
        self.jobs = jobs
        self.stats = RunStats()

    def _units(self) -> List[Tuple[int, int]]:
        return [(m, trial) for m in self.config.m_values for trial in range(self.config.trials)]

    def run(self) -> List[TrialResult]:
        """
        Execute or load every trial of the config.

        Returns:
            List[TrialResult]: Sorted by (m, algorithm, s, trial).
        """
        config = self.config
        config.output_dir.mkdir(parents=True, exist_ok=True)
        units = self._units()
        logger.info("Running %d units (n=%d, mixture=%s) with %d job(s)",
                    len(units), config.n, config.mixture.cache_tag(), self.jobs)

        if self.jobs == 1:
            outputs = [run_unit(config, m, trial) for m, trial in units]
        else:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                outputs = list(pool.map(run_unit, [config] * len(units),
                                        [m for m, _ in units], [trial for _, trial in units]))

        self.stats = RunStats()
        results: List[TrialResult] = []
        for unit_results, unit_stats in outputs:
            results.extend(unit_results)
            self.stats.computed += unit_stats.computed
            self.stats.cached += unit_stats.cached
        results.sort(key=lambda r: (r.key.m, r.key.algorithm.value, r.key.s or 0, r.key.trial))
        logger.info("Run finished: %d computed, %d loaded from cache", self.stats.computed, self.stats.cached)
        return results


def run(config: ExperimentConfig, jobs: int = 1) -> List[TrialResult]:
    return ExperimentRunner(config, jobs).run()
