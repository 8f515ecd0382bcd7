"""
Desk-scale acceptance checks.

Each criterion is a finite Monte-Carlo or exhaustive check of one claim:
matching correctness, random-graph matching thresholds, the behaviour of
each allocator at a fixed (n, m), oracle consistency and reproducibility.
``run_acceptance`` runs a selection and returns one ``CriterionResult``
per criterion. The threshold coefficient of the matching-based allocators
can be overridden through ``AcceptanceOptions.log_factor``.
"""
import logging
import math
import tempfile
import time
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from allocation_instance import Instance, Mode, generate
from allocators import (
    DEFAULT_LOG_FACTOR,
    Algorithm,
    Regime,
    allocate_argmax,
    allocate_ef_small,
    allocate_ef_small_chores,
    allocate_prop_linear,
    allocate_prop_two_stage,
    allocate_sampling,
    sample_size,
)
from brute_force_oracle import brute_max_matching, definitional_flags, exhaustive_scan
from fairness_metrics import evaluate, social_welfare
from matching_engine import max_matching, random_bipartite
from utility_distributions import FamilyMixture, MixtureName, derive_seed, make_rng

from .config import ExperimentConfig
from .plot_data import emit_plot_data
from .runner import ExperimentRunner

logger = logging.getLogger(__name__)

UNIT_UNIFORM = FamilyMixture(name=MixtureName.UNIFORM_ONLY, uniform_a=(0.0, 0.0), uniform_b=(1.0, 1.0))


class AcceptanceOptions(BaseModel):
    """
    Attributes:
        log_factor: Threshold coefficient for criteria 7 to 10.
        work_dir: Cache root for criteria 4 and 12; a temporary directory when None.
    """
    model_config = ConfigDict(frozen=True)

    log_factor: float = Field(default=DEFAULT_LOG_FACTOR, gt=1.0)
    work_dir: Optional[Path] = None


class CriterionResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    key: int
    title: str
    passed: bool
    value: float
    detail: str = ""
    seconds: float = 0.0


def _seed(criterion: int, trial: int) -> int:
    return derive_seed(criterion, trial)


def _rate(flags: Iterable[bool]) -> float:
    flags = list(flags)
    return sum(flags) / len(flags)


def check_matching_oracle(options: AcceptanceOptions) -> CriterionResult:
    agree = []
    for trial in range(200):
        rng = make_rng(1, trial)
        n_left, n_right = (int(v) for v in rng.integers(1, 9, size=2))
        graph = random_bipartite(n_left, n_right, float(rng.uniform()), _seed(1, trial))
        agree.append(max_matching(graph).cardinality == brute_max_matching(graph))
    rate = _rate(agree)
    return CriterionResult(key=1, title="Matching oracle equivalence", passed=rate == 1.0, value=rate,
                           detail=f"{sum(agree)}/200 graphs agree")


def check_random_graph_threshold(options: AcceptanceOptions) -> CriterionResult:
    n = 200
    low, high = 2 * math.log(n) / n, 4 * math.log(n) / n
    perfect = []
    for trial in range(100):
        probs = make_rng(2, trial).uniform(low, high, size=n)
        graph = random_bipartite(n, n, probs, _seed(2, trial))
        perfect.append(max_matching(graph).cardinality == n)
    rate = _rate(perfect)
    return CriterionResult(key=2, title="Random-graph matching threshold", passed=rate >= 0.95, value=rate,
                           detail=f"perfect matching rate {rate:.2f}")


def check_argmax_ef(options: AcceptanceOptions) -> CriterionResult:
    mixture = FamilyMixture(name=MixtureName.BETA_UNIFORM)
    ef, ratios = [], []
    for trial in range(20):
        instance = generate(50, 10_000, Mode.GOODS, mixture, _seed(3, trial))
        report = evaluate(instance, allocate_argmax(instance))
        ef.append(report.is_ef)
        ratios.append(report.worst_envy_ratio)
    rate, mean_ratio = _rate(ef), float(np.mean(ratios))
    return CriterionResult(key=3, title="Argmax EF rate", passed=rate >= 0.9 and mean_ratio <= 1.05, value=rate,
                           detail=f"EF rate {rate:.2f}, mean worst envy ratio {mean_ratio:.4f}")


def sampling_welfare_config(output_dir: Path) -> ExperimentConfig:
    return ExperimentConfig(n=100, m_values=[10_000], mode=Mode.GOODS, mixture=MixtureName.BETA_UNIFORM.value,
                            algorithms=[Algorithm.SAMPLING], s_values=[4, 23, 46], trials=10, base_seed=4,
                            output_dir=output_dir)


def _mean_ratio_by_s(results) -> Dict[int, float]:
    grouped: Dict[int, List[float]] = {}
    for result in results:
        grouped.setdefault(result.key.s, []).append(result.welfare_ratio)
    return {s: float(np.mean(values)) for s, values in grouped.items()}


def _work_dir(options: AcceptanceOptions, name: str) -> Path:
    if options.work_dir is not None:
        return Path(options.work_dir) / name
    return Path(tempfile.mkdtemp(prefix=f"fairsim-{name}-"))


def check_sampling_welfare(options: AcceptanceOptions) -> CriterionResult:
    results = ExperimentRunner(sampling_welfare_config(_work_dir(options, "criterion4"))).run()
    means = _mean_ratio_by_s(results)
    floors = {4: 0.85, 23: 0.95, 46: 0.95}
    passed = all(means[s] >= floor for s, floor in floors.items())
    detail = ", ".join(f"s={s}: {means[s]:.4f}" for s in sorted(means))
    return CriterionResult(key=4, title="Sampling welfare ratio", passed=passed, value=min(means.values()),
                           detail=detail)


def check_sampling_degeneracy(options: AcceptanceOptions) -> CriterionResult:
    mixtures = list(MixtureName)
    same = []
    for trial in range(20):
        mixture = FamilyMixture(name=mixtures[trial % len(mixtures)])
        instance = generate(20, 200, Mode.GOODS, mixture, _seed(5, trial))
        sampled, _ = allocate_sampling(instance, instance.n, _seed(5, trial))
        same.append(sampled.bundles == allocate_argmax(instance).bundles)
    rate = _rate(same)
    return CriterionResult(key=5, title="Sampling with s = n equals argmax", passed=rate == 1.0, value=rate,
                           detail=f"{sum(same)}/20 identical")


def check_discrete_msw(options: AcceptanceOptions) -> CriterionResult:
    mixture = FamilyMixture(name=MixtureName.DISCRETE_ATOM1, atom_mass_floor=0.2)
    n, m = 100, 2000
    s = min(sample_size(Regime.DISCRETE, m, mixture.atom_mass_floor), n)
    exact = []
    for trial in range(20):
        instance = generate(n, m, Mode.GOODS, mixture, _seed(6, trial))
        _, log = allocate_sampling(instance, s, derive_seed(6, trial, 1))
        exact.append(bool(np.all(log.winning_values == instance.values.max(axis=0))))
    rate = _rate(exact)
    return CriterionResult(key=6, title="Discrete exact-MSW sampling", passed=rate >= 0.95, value=rate,
                           detail=f"s={s}, exact MSW in {sum(exact)}/20")


def _success_rate(instances: Iterable[Instance], allocate: Callable, flag: str) -> float:
    hits = []
    for instance in instances:
        outcome = allocate(instance)
        hits.append(outcome.ok and getattr(evaluate(instance, outcome.allocation), flag))
    return _rate(hits)


def check_prop_two_stage(options: AcceptanceOptions) -> CriterionResult:
    n = 150

    def instances():
        for trial in range(50):
            m = int(make_rng(7, trial).integers(n, 2 * n + 1))
            yield generate(n, m, Mode.GOODS, UNIT_UNIFORM, _seed(7, trial))

    rate = _success_rate(instances(), lambda inst: allocate_prop_two_stage(inst, options.log_factor), "is_prop")
    return CriterionResult(key=7, title="Two-stage proportional algorithm", passed=rate >= 0.9, value=rate,
                           detail=f"success and proportional in {rate:.2f} of 50 (log factor {options.log_factor})")


def check_ef_small_goods(options: AcceptanceOptions) -> CriterionResult:
    instances = (generate(100, 500, Mode.GOODS, UNIT_UNIFORM, _seed(8, trial)) for trial in range(50))
    rate = _success_rate(instances, lambda inst: allocate_ef_small(inst, options.log_factor), "is_ef")
    return CriterionResult(key=8, title="EF-small goods", passed=rate >= 0.9, value=rate,
                           detail=f"success and EF in {rate:.2f} of 50 (log factor {options.log_factor})")


def check_ef_small_chores(options: AcceptanceOptions) -> CriterionResult:
    instances = (generate(100, 500, Mode.CHORES, UNIT_UNIFORM, _seed(9, trial)) for trial in range(50))
    rate = _success_rate(instances, lambda inst: allocate_ef_small_chores(inst, options.log_factor), "is_ef")
    return CriterionResult(key=9, title="EF-small chores", passed=rate >= 0.9, value=rate,
                           detail=f"success and EF in {rate:.2f} of 50 (log factor {options.log_factor})")


def check_prop_linear(options: AcceptanceOptions) -> CriterionResult:
    instances = (generate(50, 700, Mode.GOODS, UNIT_UNIFORM, _seed(10, trial)) for trial in range(50))
    rate = _success_rate(instances, lambda inst: allocate_prop_linear(inst, 0.5, options.log_factor), "is_prop")
    return CriterionResult(key=10, title="Linear proportional algorithm", passed=rate >= 0.9, value=rate,
                           detail=f"success and proportional in {rate:.2f} of 50 (log factor {options.log_factor})")


def _small_allocations(instance: Instance):
    yield allocate_argmax(instance)
    candidates = [allocate_ef_small_chores] if instance.mode is Mode.CHORES else [allocate_ef_small,
                                                                                  allocate_prop_two_stage]
    for allocate in candidates:
        try:
            outcome = allocate(instance)
        except ValueError:
            # precondition not met, or an item law with alpha_j = 0
            continue
        if outcome.ok:
            yield outcome.allocation


def check_oracle_consistency(options: AcceptanceOptions) -> CriterionResult:
    mixtures = [FamilyMixture(name=name) for name in MixtureName] + [UNIT_UNIFORM]
    failures = []
    for trial in range(500):
        rng = make_rng(11, trial)
        n, m = int(rng.integers(2, 4)), int(rng.integers(2, 7))
        mode = Mode.GOODS if trial % 2 == 0 else Mode.CHORES
        instance = generate(n, m, mode, mixtures[trial % len(mixtures)], _seed(11, trial))
        oracle = exhaustive_scan(instance)
        if social_welfare(instance, allocate_argmax(instance)) != oracle.msw_value:
            failures.append(f"trial {trial}: argmax welfare differs from the oracle optimum")
        for allocation in _small_allocations(instance):
            report = evaluate(instance, allocation)
            if report.is_ef and not oracle.ef_exists:
                failures.append(f"trial {trial}: EF reported where none exists")
            if report.is_prop and not oracle.prop_exists:
                failures.append(f"trial {trial}: proportional reported where none exists")
            if (report.is_ef, report.is_prop) != definitional_flags(instance, allocation):
                failures.append(f"trial {trial}: metrics disagree with the definitions")
    value = 1.0 - len(failures) / 500
    return CriterionResult(key=11, title="Exhaustive-oracle consistency", passed=not failures, value=value,
                           detail=failures[0] if failures else "500 instances consistent")


def check_determinism(options: AcceptanceOptions) -> CriterionResult:
    outputs = []
    for attempt in ("first", "second"):
        root = _work_dir(options, f"criterion12-{attempt}")
        results = ExperimentRunner(sampling_welfare_config(root)).run()
        outputs.append(emit_plot_data(results, "welfare_ratio", root / "welfare_ratio.csv").read_bytes())
    same = outputs[0] == outputs[1]
    return CriterionResult(key=12, title="Byte-identical reruns", passed=same, value=float(same),
                           detail=f"{len(outputs[0])} bytes" if same else "CSV outputs differ")


CRITERIA: Dict[int, Callable[[AcceptanceOptions], CriterionResult]] = {
    1: check_matching_oracle,
    2: check_random_graph_threshold,
    3: check_argmax_ef,
    4: check_sampling_welfare,
    5: check_sampling_degeneracy,
    6: check_discrete_msw,
    7: check_prop_two_stage,
    8: check_ef_small_goods,
    9: check_ef_small_chores,
    10: check_prop_linear,
    11: check_oracle_consistency,
    12: check_determinism,
}


def run_criterion(key: int, options: Optional[AcceptanceOptions] = None) -> CriterionResult:
    options = options or AcceptanceOptions()
    if key not in CRITERIA:
        raise ValueError(f"unknown criterion {key}; choose from {sorted(CRITERIA)}")
    started = time.perf_counter()
    result = CRITERIA[key](options)
    result = result.model_copy(update={"seconds": time.perf_counter() - started})
    level = logging.INFO if result.passed else logging.WARNING
    logger.log(level, "Criterion %d (%s): %s in %.1f s - %s", key, result.title,
               "PASS" if result.passed else "FAIL", result.seconds, result.detail)
    return result


def run_acceptance(only: Optional[Iterable[int]] = None,
                   options: Optional[AcceptanceOptions] = None) -> List[CriterionResult]:
    keys = sorted(set(only)) if only else sorted(CRITERIA)
    return [run_criterion(key, options) for key in keys]
