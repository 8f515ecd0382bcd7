import json

import pytest
from pydantic import ValidationError
from typer.testing import CliRunner

from allocation_instance import Mode, load_instance
from allocators import Algorithm
from experiment_harness import (
    CacheConflictError,
    ExperimentConfig,
    ExperimentRunner,
    HarnessSettings,
    PlotMetric,
    TrialKey,
    TrialOutcome,
    TrialResult,
    aggregate,
    cache_path,
    emit_plot_data,
    fingerprint,
    load_config,
)
from fairness_metrics import MetricsReport
from main import app


@pytest.fixture
def small_config(tmp_path, unit_uniform):
    return ExperimentConfig(n=4, m_values=[8, 12], mixture=unit_uniform,
                            algorithms=[Algorithm.ARGMAX, Algorithm.SAMPLING, Algorithm.EF_SMALL],
                            s_values=[2, 4], trials=3, base_seed=5, output_dir=tmp_path / "results")


def _result(algorithm, m, s, trial, ratio, ok=True):
    metrics = MetricsReport(worst_envy_ratio=ratio, fraction_envious=0.5, social_welfare=1.0,
                            is_ef=False, is_prop=True) if ok else None
    return TrialResult(key=TrialKey(n=2, m=m, s=s, mixture="beta_uniform", algorithm=algorithm, trial=trial),
                       metrics=metrics, outcome=TrialOutcome(ok=ok), wall_time_ms=1.0, seed=trial,
                       fingerprint="abc")


def test_single_trial_run(tmp_path):
    config = ExperimentConfig(n=2, m_values=[3], mixture="beta_uniform", algorithms=[Algorithm.ARGMAX],
                              trials=1, output_dir=tmp_path)
    results = ExperimentRunner(config).run()
    assert len(results) == 1
    assert results[0].outcome.ok
    assert results[0].key.s is None
    assert cache_path(tmp_path, results[0].key).exists()


def test_rerun_loads_everything_from_cache(small_config):
    runner = ExperimentRunner(small_config)
    first = runner.run()
    assert runner.stats.computed == len(first) == 2 * 3 * 4
    second = runner.run()
    assert runner.stats.computed == 0
    assert runner.stats.cached == len(second)
    assert [r.model_dump() for r in first] == [r.model_dump() for r in second]


def test_results_are_sorted(small_config):
    results = ExperimentRunner(small_config).run()
    keys = [(r.key.m, r.key.algorithm.value, r.key.s or 0, r.key.trial) for r in results]
    assert keys == sorted(keys)


def test_deleted_trial_is_reproduced(small_config):
    results = ExperimentRunner(small_config).run()
    victim = next(r for r in results if r.key.algorithm is Algorithm.SAMPLING and r.key.trial == 1)
    cache_path(small_config.output_dir, victim.key).unlink()

    runner = ExperimentRunner(small_config)
    again = runner.run()
    assert runner.stats.computed == 1
    redone = next(r for r in again if r.key == victim.key)
    assert redone.metrics == victim.metrics
    assert redone.welfare_ratio == victim.welfare_ratio
    assert redone.seed == victim.seed


def test_sampling_results_carry_welfare_ratio(small_config):
    results = ExperimentRunner(small_config).run()
    for result in results:
        if result.key.algorithm is Algorithm.SAMPLING:
            assert 0.0 < result.welfare_ratio <= 1.0
            if result.key.s == small_config.n:
                assert result.welfare_ratio == 1.0
        else:
            assert result.welfare_ratio is None


def test_parallel_run_matches_serial(small_config, tmp_path):
    serial = ExperimentRunner(small_config).run()
    parallel_config = small_config.model_copy(update={"output_dir": tmp_path / "parallel"})
    parallel = ExperimentRunner(parallel_config, jobs=2).run()
    assert [(r.key, r.metrics, r.outcome) for r in serial] == [(r.key, r.metrics, r.outcome) for r in parallel]


def test_changed_config_conflicts_with_cache(small_config):
    ExperimentRunner(small_config).run()
    changed = small_config.model_copy(update={"base_seed": 6})
    assert fingerprint(changed) != fingerprint(small_config)
    with pytest.raises(CacheConflictError):
        ExperimentRunner(changed).run()


def test_cache_path_layout(tmp_path):
    key = TrialKey(n=10, m=50, s=None, mixture="beta_uniform", algorithm=Algorithm.ARGMAX, trial=3)
    assert cache_path(tmp_path, key) == tmp_path / "beta_uniform" / "argmax" / "n10_m50_sna_t3.json"
    sampled = key.model_copy(update={"s": 4, "algorithm": Algorithm.SAMPLING})
    assert cache_path(tmp_path, sampled).name == "n10_m50_s4_t3.json"


def test_plot_data_csv(tmp_path):
    results = [
        _result(Algorithm.SAMPLING, 20, 4, 0, 1.5),
        _result(Algorithm.SAMPLING, 20, 4, 1, 2.5),
        _result(Algorithm.ARGMAX, 20, None, 0, float("inf")),
        _result(Algorithm.ARGMAX, 10, None, 0, 1.0),
        _result(Algorithm.ARGMAX, 10, None, 1, 1.0, ok=False),
    ]
    path = emit_plot_data(results, PlotMetric.WORST_ENVY_RATIO, tmp_path / "plot.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines == [
        "m,algorithm,s,mean,stddev,trials",
        "10,argmax,na,1.0,0.0,1",
        "20,argmax,na,inf,nan,1",
        "20,sampling,4,2.0,0.5,2",
    ]


def test_success_rate_counts_infeasible_trials():
    results = [_result(Algorithm.EF_SMALL, 10, None, t, 1.0, ok=t != 0) for t in range(4)]
    table = aggregate(results, "success_rate")
    assert table["mean"].tolist() == [0.75]
    assert table["trials"].tolist() == [4]


def test_plot_data_needs_results(tmp_path):
    with pytest.raises(ValueError):
        emit_plot_data([], PlotMetric.FRACTION_ENVIOUS, tmp_path / "empty.csv")


def test_plot_data_is_byte_identical(small_config, tmp_path):
    results = ExperimentRunner(small_config).run()
    first = emit_plot_data(results, "fraction_envious", tmp_path / "a.csv").read_bytes()
    second = emit_plot_data(ExperimentRunner(small_config).run(), "fraction_envious", tmp_path / "b.csv")
    assert first == second.read_bytes()


@pytest.mark.parametrize("overrides, field", [
    ({"algorithms": ["ef_small"], "m_values": [10]}, "m_values"),
    ({"algorithms": ["sampling"]}, "s_values"),
    ({"algorithms": ["argmax"], "s_values": [2]}, "s_values"),
    ({"algorithms": ["sampling"], "s_values": [5]}, "s_values"),
    ({"algorithms": ["prop_linear"]}, "c"),
    ({"algorithms": ["prop_linear"], "c": 0.5}, "m_values"),
    ({"algorithms": ["prop_two_stage"], "m_values": [9]}, "m_values"),
    ({"algorithms": ["chores_ef_small"]}, "algorithms"),
    ({"algorithms": ["argmax", "argmax"]}, "algorithms"),
    ({"m_values": [8, 8]}, "m_values"),
])
def test_config_validation(tmp_path, overrides, field):
    payload = {"n": 4, "m_values": [8], "mixture": "beta_uniform", "algorithms": ["argmax"],
               "output_dir": str(tmp_path)}
    payload.update(overrides)
    with pytest.raises(ValidationError) as info:
        ExperimentConfig.model_validate(payload)
    assert field in str(info.value)


def test_load_config(tmp_path):
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps({"n": 3, "m_values": [6], "mode": "chores", "mixture": "normal_uniform",
                                "algorithms": ["chores_ef_small", "argmax"], "trials": 2}), encoding="utf-8")
    config = load_config(path)
    assert config.mode is Mode.CHORES
    assert config.sample_sizes(Algorithm.ARGMAX) == [None]


def test_settings_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("FAIRSIM_DEFAULT_TRIALS", "7")
    monkeypatch.setenv("FAIRSIM_OUTPUT_DIR", str(tmp_path))
    settings = HarnessSettings()
    assert settings.default_trials == 7
    assert settings.output_dir == tmp_path
    assert settings.log_factor == 1.1


cli = CliRunner()


def test_cli_gen_and_allocate(tmp_path):
    out = tmp_path / "instance.json"
    generated = cli.invoke(app, ["gen", "--n", "3", "--m", "7", "--mixture", "beta_uniform",
                                 "--seed", "11", "--out", str(out)])
    assert generated.exit_code == 0, generated.output
    assert load_instance(out).values.shape == (3, 7)

    allocated = cli.invoke(app, ["allocate", "--instance", str(out), "--algorithm", "argmax"])
    assert allocated.exit_code == 0, allocated.output
    payload = json.loads(allocated.stdout.strip().splitlines()[-1])
    assert set(payload) == {"worst_envy_ratio", "fraction_envious", "social_welfare", "is_ef", "is_prop"}


def test_cli_allocate_rejects_bad_algorithm(tmp_path):
    out = tmp_path / "instance.json"
    cli.invoke(app, ["gen", "--n", "2", "--m", "2", "--mixture", "beta_uniform", "--out", str(out)])
    result = cli.invoke(app, ["allocate", "--instance", str(out), "--algorithm", "sampling"])
    assert result.exit_code == 1


def test_cli_run_and_plotdata(tmp_path):
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"n": 3, "m_values": [6, 9], "mixture": "beta_uniform",
                                  "algorithms": ["argmax", "sampling"], "s_values": [1, 3],
                                  "trials": 2, "output_dir": str(tmp_path / "cache")}), encoding="utf-8")
    assert cli.invoke(app, ["run", "--config", str(config)]).exit_code == 0
    csv = tmp_path / "welfare.csv"
    result = cli.invoke(app, ["plotdata", "--config", str(config), "--metric", "welfare_ratio",
                              "--out", str(csv)])
    assert result.exit_code == 0, result.output
    lines = csv.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "m,algorithm,s,mean,stddev,trials"
    assert len(lines) == 1 + 2 * 2


def test_cli_run_rejects_invalid_config(tmp_path):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"n": 3, "m_values": [7], "mixture": "beta_uniform",
                                  "algorithms": ["ef_small"]}), encoding="utf-8")
    assert cli.invoke(app, ["run", "--config", str(config)]).exit_code == 1


def test_cli_verify_single_criterion():
    result = cli.invoke(app, ["verify", "--only", "1"])
    assert result.exit_code == 0, result.output


def test_cli_run_reports_unwritable_output_dir(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"n": 2, "m_values": [3], "mixture": "beta_uniform", "algorithms": ["argmax"],
                                  "trials": 1, "output_dir": str(blocker / "cache")}), encoding="utf-8")
    result = cli.invoke(app, ["run", "--config", str(config)])
    assert result.exit_code == 1
    assert "output_dir" in result.output


def test_cli_plotdata_reports_unwritable_out(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps({"n": 2, "m_values": [3], "mixture": "beta_uniform", "algorithms": ["argmax"],
                                  "trials": 1, "output_dir": str(tmp_path / "cache")}), encoding="utf-8")
    result = cli.invoke(app, ["plotdata", "--config", str(config), "--metric", "social_welfare",
                              "--out", str(blocker / "plot.csv")])
    assert result.exit_code == 1
    assert "--out" in result.output


def test_cli_allocate_single_agent_auto(tmp_path):
    out = tmp_path / "instance.json"
    cli.invoke(app, ["gen", "--n", "1", "--m", "2", "--mixture", "uniform_only", "--out", str(out)])
    result = cli.invoke(app, ["allocate", "--instance", str(out)])
    assert result.exit_code == 0, result.output
    payload = json.loads(result.stdout.strip().splitlines()[-1])
    assert payload["is_ef"] and payload["is_prop"]
