import math

import numpy as np
import pytest

from allocation_instance import Instance, Mode, Provenance, generate
from allocators import (
    Algorithm,
    Regime,
    Stage,
    allocate_argmax,
    allocate_ef_small,
    allocate_ef_small_chores,
    allocate_prop_linear,
    allocate_prop_two_stage,
    allocate_sampling,
    choose_algorithm,
    chores_thresholds,
    goods_thresholds,
    proportional_r,
    run_algorithm,
    sample_size,
    sample_size_for_instance,
)
from fairness_metrics import evaluate, is_prop
from utility_distributions import DistributionSpec, FamilyMixture, MixtureName, make_rng


class CountingValues(np.ndarray):
    """ndarray view that records every (agent, item) entry read through indexing."""

    def __new__(cls, values):
        view = np.asarray(values).view(cls)
        view.reads = []
        return view

    def __array_finalize__(self, obj):
        self.reads = getattr(obj, "reads", None)

    def __getitem__(self, key):
        if isinstance(key, tuple) and len(key) == 2 and self.reads is not None:
            agents, item = key
            for agent in np.atleast_1d(agents):
                self.reads.append((int(agent), int(item)))
        return np.asarray(np.ndarray.__getitem__(self, key))


class CountingInstance:
    def __init__(self, instance: Instance):
        self.mode = instance.mode
        self.n = instance.n
        self.m = instance.m
        self.values = CountingValues(instance.values)


def test_argmax_goods_and_ties():
    goods = Instance.from_values([[0.9, 0.2, 0.5], [0.1, 0.8, 0.5]])
    allocation = allocate_argmax(goods)
    assert allocation.owners().tolist() == [0, 1, 0]
    assert allocation.provenance is Provenance.ARGMAX


def test_argmax_chores():
    chores = Instance.from_values([[0.9], [0.1]], Mode.CHORES)
    assert allocate_argmax(chores).owners().tolist() == [1]


def test_argmax_attains_column_extremes():
    values = make_rng(3).random((5, 30))
    for mode, extreme in ((Mode.GOODS, values.max(axis=0)), (Mode.CHORES, values.min(axis=0))):
        instance = Instance.from_values(values, mode)
        owners = allocate_argmax(instance).owners()
        assert np.array_equal(values[owners, np.arange(30)], extreme)


@pytest.mark.parametrize("regime, m, alpha, expected", [
    (Regime.DISCRETE, 1000, 0.5, 28),
    (Regime.CONTINUOUS_CONSTANT, 1000, 1.0, 139),
    (Regime.CONTINUOUS_BOUNDED_MEAN, math.e, 2.0, 1),
    (Regime.DISCRETE, 2000, 0.2, 77),
])
def test_sample_size(regime, m, alpha, expected):
    assert sample_size(regime, m, alpha) == expected


def test_sample_size_rejects_zero_alpha():
    with pytest.raises(ValueError):
        sample_size(Regime.DISCRETE, 100, 0.0)


def test_sample_size_for_instance_checks_hypotheses():
    discrete = DistributionSpec.discrete([0.3, 1.0], [0.6, 0.4])
    instance = Instance.from_values(np.full((10, 50), 0.3), item_specs=[discrete] * 50)
    assert sample_size_for_instance(instance, Regime.DISCRETE) == min(math.ceil(2 * math.log(50) / 0.4), 10)
    with pytest.raises(ValueError):
        sample_size_for_instance(Instance.from_values(np.full((3, 5), 0.5)), Regime.DISCRETE)
    with pytest.raises(ValueError):
        sample_size_for_instance(instance, Regime.CONTINUOUS_CONSTANT)


def test_sampling_full_sample_equals_argmax():
    instance = generate(12, 80, Mode.GOODS, FamilyMixture(name=MixtureName.DISCRETE_ATOM1), 4)
    sampled, log = allocate_sampling(instance, instance.n, 99)
    assert sampled.bundles == allocate_argmax(instance).bundles
    assert sampled.provenance is Provenance.SAMPLING
    assert np.array_equal(log.sampled, np.tile(np.arange(12), (80, 1)))


def test_sampling_single_agent_takes_everything_sampled():
    instance = generate(6, 40, Mode.GOODS, FamilyMixture(name=MixtureName.BETA_UNIFORM), 2)
    allocation, log = allocate_sampling(instance, 1, 5)
    assert np.array_equal(log.winners, log.sampled[:, 0])
    assert np.array_equal(allocation.owners(), log.winners)


def test_sampling_log_invariants():
    instance = generate(20, 60, Mode.GOODS, FamilyMixture(name=MixtureName.NORMAL_UNIFORM), 8)
    _, log = allocate_sampling(instance, 7, 13)
    assert log.sampled.shape == (60, 7)
    for item in range(60):
        agents = log.sampled[item]
        assert len(set(agents.tolist())) == 7
        assert log.winners[item] in agents
        assert log.winning_values[item] == instance.values[agents, item].max()


def test_sampling_reads_only_sampled_entries():
    instance = generate(30, 50, Mode.GOODS, FamilyMixture(name=MixtureName.UNIFORM_ONLY), 6)
    counting = CountingInstance(instance)
    _, log = allocate_sampling(counting, 4, 21)
    reads = counting.values.reads
    assert len(reads) == 50 * 4
    assert all(agent in log.sampled[item] for agent, item in reads)


def test_sampling_is_replayable():
    instance = generate(15, 30, Mode.GOODS, FamilyMixture(name=MixtureName.BETA_UNIFORM), 1)
    first, _ = allocate_sampling(instance, 5, 77)
    second, _ = allocate_sampling(instance, 5, 77)
    assert first == second


def test_sampling_rejects_bad_inputs():
    instance = Instance.from_values([[0.5, 0.5], [0.2, 0.3]])
    with pytest.raises(ValueError):
        allocate_sampling(instance, 3, 0)
    with pytest.raises(ValueError):
        allocate_sampling(Instance.from_values([[0.5, 0.5]], Mode.CHORES), 1, 0)


def test_goods_thresholds():
    tau = goods_thresholds(Instance.from_values(np.full((100, 2), 0.5))).tau
    assert tau == pytest.approx([0.949343, 0.949343], abs=1e-6)
    assert goods_thresholds(Instance.from_values(np.full((2, 1), 0.5))).tau[0] == pytest.approx(0.618769, abs=1e-6)


def test_doubling_alpha_halves_the_gap():
    wide = Instance.from_values(np.full((10, 1), 0.25), item_specs=[DistributionSpec.uniform(0.0, 1.0)])
    narrow = Instance.from_values(np.full((10, 1), 0.25), item_specs=[DistributionSpec.uniform(0.0, 0.5)])
    gap_wide = 1.0 - goods_thresholds(wide).tau[0]
    gap_narrow = 1.0 - goods_thresholds(narrow).tau[0]
    assert gap_narrow == pytest.approx(gap_wide / 2.0)


def test_thresholds_reject_zero_alpha():
    instance = Instance.from_values(np.full((4, 2), 0.5),
                                    item_specs=[DistributionSpec.uniform(0.0, 1.0), DistributionSpec.beta(2.0, 2.0)])
    with pytest.raises(ValueError, match="item 1"):
        goods_thresholds(instance)


def test_chores_thresholds():
    instance = Instance.from_values(np.full((100, 1), 0.5), Mode.CHORES)
    assert chores_thresholds(instance).tau[0] == pytest.approx(1.1 * math.log(100) / 100)


@pytest.mark.parametrize("c, r", [(0.5, 14), (0.0, 6)])
def test_proportional_r(c, r):
    assert proportional_r(c) == r


def test_ef_small_complete_threshold_graph():
    instance = Instance.from_values(np.full((50, 250), 1.0 - 1e-9))
    outcome = allocate_ef_small(instance)
    assert outcome.ok
    assert all(len(bundle) == 5 for bundle in outcome.allocation.bundles)
    assert outcome.allocation.provenance is Provenance.EF_SMALL


def test_ef_small_isolated_agent_is_infeasible():
    values = np.full((4, 8), 0.99)
    values[2] = 0.0
    outcome = allocate_ef_small(Instance.from_values(values))
    assert not outcome.ok
    assert outcome.stage is Stage.PERFECT_X_MATCHING
    assert outcome.result.required == 8


def test_ef_small_pairs_clear_thresholds(unit_uniform):
    instance = generate(20, 100, Mode.GOODS, unit_uniform, 5)
    tau = goods_thresholds(instance, 3.0).tau
    outcome = allocate_ef_small(instance, 3.0)
    assert outcome.ok
    for agent, bundle in enumerate(outcome.allocation.bundles):
        assert len(bundle) == 5
        assert all(instance.values[agent, item] >= tau[item] for item in bundle)


def test_ef_small_on_default_uniform_mixture():
    mixture = FamilyMixture(name=MixtureName.UNIFORM_ONLY)
    instance = generate(20, 100, Mode.GOODS, mixture, 5)
    assert all(spec.scalar("b") == 1.0 for spec in instance.item_specs)
    assert allocate_ef_small(instance, 3.0).ok


def test_ef_small_preconditions():
    with pytest.raises(ValueError):
        allocate_ef_small(Instance.from_values(np.full((3, 7), 0.5)))
    with pytest.raises(ValueError):
        allocate_ef_small(Instance.from_values(np.full((3, 6), 0.5), Mode.CHORES))


def test_prop_two_stage_hand_trace(hand_trace):
    outcome = allocate_prop_two_stage(hand_trace)
    assert outcome.ok
    assert outcome.allocation.bundles == ((0,), (1, 2))
    assert is_prop(hand_trace, outcome.allocation)


def test_prop_two_stage_without_violators():
    instance = Instance.from_values([[0.95, 0.7], [0.7, 0.95]])
    outcome = allocate_prop_two_stage(instance)
    assert outcome.ok
    assert outcome.allocation.bundles == ((0,), (1,))


def test_prop_two_stage_stage1_failure():
    outcome = allocate_prop_two_stage(Instance.from_values([[0.9, 0.9, 0.1], [0.1, 0.1, 0.1]]))
    assert outcome.stage is Stage.STAGE1


def test_prop_two_stage_stage2_failure():
    # agent 1 ends stage 1 with 0.65 of its 0.8 share; item 2 is worth nothing to it
    failing = Instance.from_values([[0.9, 0.1, 0.5], [0.95, 0.65, 0.0]])
    outcome = allocate_prop_two_stage(failing)
    assert outcome.stage is Stage.STAGE2


def test_prop_two_stage_success_is_proportional(unit_uniform):
    for seed in range(10):
        instance = generate(30, 45, Mode.GOODS, unit_uniform, seed)
        outcome = allocate_prop_two_stage(instance, 3.0)
        assert outcome.ok, outcome.result
        report = evaluate(instance, outcome.allocation)
        assert report.is_prop
        assert max(report.prop_shortfalls) <= 1e-12


def test_prop_two_stage_range():
    with pytest.raises(ValueError):
        allocate_prop_two_stage(Instance.from_values(np.full((2, 5), 0.5)))


def test_prop_linear_preconditions():
    with pytest.raises(ValueError, match="below r"):
        allocate_prop_linear(Instance.from_values(np.full((2, 20), 0.2)), 0.5)
    with pytest.raises(ValueError, match="mean"):
        allocate_prop_linear(Instance.from_values(np.full((2, 28), 0.2)), 0.4)


def test_prop_linear_complete_graph():
    specs = [DistributionSpec.uniform(0.0, 0.5)] * 30
    instance = Instance.from_values(np.full((2, 30), 0.95), item_specs=specs)
    outcome = allocate_prop_linear(instance, 0.5)
    assert outcome.ok
    sizes = sorted(len(bundle) for bundle in outcome.allocation.bundles)
    assert sizes == [15, 15]
    assert outcome.allocation.provenance is Provenance.PROP_LINEAR


def test_prop_linear_round_robin_leftovers():
    specs = [DistributionSpec.uniform(0.0, 0.5)] * 31
    instance = Instance.from_values(np.full((2, 31), 0.95), item_specs=specs)
    outcome = allocate_prop_linear(instance, 0.5)
    assert outcome.ok
    assert sorted(len(bundle) for bundle in outcome.allocation.bundles) == [15, 16]


def test_prop_linear_on_unit_uniform_items(unit_uniform):
    # Uniform[0, 1] items: every mean is 0.5, within the bound c = 0.5
    for seed in range(3):
        instance = generate(50, 700, Mode.GOODS, unit_uniform, seed)
        outcome = allocate_prop_linear(instance, 0.5, 2.5)
        assert outcome.ok, outcome.result
        assert is_prop(instance, outcome.allocation)


def test_prop_linear_infeasible():
    specs = [DistributionSpec.uniform(0.0, 0.5)] * 28
    values = np.full((2, 28), 0.95)
    values[1] = 0.0
    outcome = allocate_prop_linear(Instance.from_values(values, item_specs=specs), 0.5)
    assert outcome.stage is Stage.LEFT_SATURATED_X_MATCHING


def test_chores_ef_small_phases():
    values = np.zeros((4, 22))
    outcome = allocate_ef_small_chores(Instance.from_values(values, Mode.CHORES))
    assert outcome.ok
    assert sorted(len(bundle) for bundle in outcome.allocation.bundles) == [5, 5, 6, 6]
    assert outcome.allocation.provenance is Provenance.CHORES_EF_SMALL


def test_chores_ef_small_without_remainder():
    outcome = allocate_ef_small_chores(Instance.from_values(np.zeros((4, 20)), Mode.CHORES))
    assert outcome.ok
    assert all(len(bundle) == 5 for bundle in outcome.allocation.bundles)


def test_chores_ef_small_all_ones_is_infeasible():
    outcome = allocate_ef_small_chores(Instance.from_values(np.ones((100, 500)), Mode.CHORES))
    assert outcome.stage is Stage.PHASE1


def test_chores_ef_small_phase2_failure():
    values = np.zeros((4, 22))
    values[:, 21] = 1.0
    outcome = allocate_ef_small_chores(Instance.from_values(values, Mode.CHORES))
    assert outcome.stage is Stage.PHASE2


@pytest.mark.parametrize("n, m, mode, c, expected", [
    (10, 1000, Mode.GOODS, None, Algorithm.ARGMAX),
    (100, 500, Mode.GOODS, None, Algorithm.EF_SMALL),
    (100, 150, Mode.GOODS, None, Algorithm.PROP_TWO_STAGE),
    (100, 601, Mode.GOODS, 0.0, Algorithm.PROP_LINEAR),
    (100, 601, Mode.GOODS, None, Algorithm.ARGMAX),
    (100, 500, Mode.CHORES, None, Algorithm.CHORES_EF_SMALL),
    (10, 1000, Mode.CHORES, None, Algorithm.ARGMAX),
    (1, 1, Mode.GOODS, None, Algorithm.ARGMAX),
    (1, 2, Mode.GOODS, None, Algorithm.ARGMAX),
    (1, 2, Mode.CHORES, None, Algorithm.ARGMAX),
])
def test_choose_algorithm(n, m, mode, c, expected):
    assert choose_algorithm(n, m, mode, c) is expected


def test_run_algorithm_dispatch(hand_trace):
    outcome, log = run_algorithm(Algorithm.SAMPLING, hand_trace, s=2, seed=1)
    assert outcome.ok and log is not None
    outcome, log = run_algorithm("prop_two_stage", hand_trace)
    assert outcome.ok and log is None
    with pytest.raises(ValueError):
        run_algorithm(Algorithm.SAMPLING, hand_trace)
    with pytest.raises(ValueError):
        run_algorithm(Algorithm.CHORES_EF_SMALL, hand_trace)


def test_ef_outputs_are_proportional(unit_uniform):
    flat = Instance.from_values(np.full((10, 50), 1.0 - 1e-9))
    equal = allocate_ef_small(flat)
    assert equal.ok
    report = evaluate(flat, equal.allocation)
    assert report.is_ef and report.is_prop

    for seed in range(5):
        instance = generate(10, 50, Mode.GOODS, unit_uniform, seed)
        outcome = allocate_ef_small(instance, 3.0)
        assert outcome.ok, outcome.result
        report = evaluate(instance, outcome.allocation)
        assert report.is_prop or not report.is_ef
