"""
FairSim command-line interface.

Seeded simulation of fair-division allocators on random instances with
per-item utility distributions: envy-free and proportional matching
allocators, welfare-maximising argmax, and online sampling.

Commands:
    - run      : Execute an experiment config against the result cache.
    - plotdata : Aggregate one metric of an experiment into a CSV.
    - verify   : Run the acceptance criteria and print pass/fail per criterion.
    - gen      : Dump one generated instance to a JSON file.
    - allocate : Allocate a dumped instance and print its metrics.

Exit codes:
    0 success, 1 validation error, 2 acceptance failure.
"""
import logging
import sys
from pathlib import Path
from typing import List, NoReturn, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

# --- Setup Project Path ---
root_dir = Path(__file__).parent
if str(root_dir) not in sys.path:
    sys.path.insert(0, str(root_dir))

from allocation_instance import Mode, generate, load_instance, save_instance  # noqa: E402
from allocators import Algorithm, choose_algorithm, run_algorithm  # noqa: E402
from experiment_harness import (  # noqa: E402
    AcceptanceOptions,
    CacheConflictError,
    ExperimentRunner,
    PlotMetric,
    emit_plot_data,
    get_settings,
    load_config,
    run_acceptance,
)
from fairness_metrics import evaluate  # noqa: E402
from utility_distributions import FamilyMixture, MixtureName  # noqa: E402

logger = logging.getLogger(__name__)

APP_VERSION = "1.0.0"
EXIT_INVALID, EXIT_ACCEPTANCE = 1, 2

app = typer.Typer(help="FairSim: fair-division simulation engine", add_completion=False)
console = Console()


def _fail(message: str, error: Exception) -> NoReturn:
    logger.error("%s: %s", message, error)
    console.print(f"[red]{message}:[/red] {error}")
    raise typer.Exit(code=EXIT_INVALID)


def _banner(title: str) -> None:
    logger.info("=" * 70)
    logger.info(title)
    logger.info("=" * 70)


@app.callback()
def configure(log_level: Optional[str] = typer.Option(None, "--log-level", help="Root logging level")):
    """Configure logging before any command runs."""
    level = (log_level or get_settings().log_level).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


@app.command()
def run(config: Path = typer.Option(..., "--config", exists=True, dir_okay=False, help="Experiment JSON"),
        jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Worker processes")):
    """Execute an experiment config; cached trials are loaded, not recomputed."""
    try:
        experiment = load_config(config)
        runner = ExperimentRunner(experiment, jobs or get_settings().jobs)
        _banner(f"FairSim {APP_VERSION}: running {config.name}")
        results = runner.run()
    except (ValidationError, ValueError, CacheConflictError) as error:
        _fail("Invalid experiment", error)
    except OSError as error:
        _fail("Cannot write output_dir", error)
    console.print(f"{len(results)} trial results: {runner.stats.computed} computed, "
                  f"{runner.stats.cached} loaded from {experiment.output_dir}")


@app.command()
def plotdata(config: Path = typer.Option(..., "--config", exists=True, dir_okay=False, help="Experiment JSON"),
             metric: PlotMetric = typer.Option(..., "--metric", help="Metric to aggregate"),
             out: Path = typer.Option(..., "--out", help="CSV destination")):
    """Write m,algorithm,s,mean,stddev,trials rows for one metric of an experiment."""
    try:
        experiment = load_config(config)
        results = ExperimentRunner(experiment, get_settings().jobs).run()
        path = emit_plot_data(results, metric, out)
    except (ValidationError, ValueError, CacheConflictError) as error:
        _fail("Cannot produce plot data", error)
    except OSError as error:
        _fail("Cannot write output_dir or --out", error)
    console.print(f"Plot data written to {path}")


def _parse_only(only: Optional[str]) -> Optional[List[int]]:
    if not only:
        return None
    try:
        return [int(part) for part in only.split(",") if part.strip()]
    except ValueError as error:
        raise typer.BadParameter(f"--only expects comma-separated criterion numbers: {error}")


@app.command()
def verify(log_factor: Optional[float] = typer.Option(None, "--log-factor", help="Threshold coefficient"),
           only: Optional[str] = typer.Option(None, "--only", help="Comma-separated criteria, e.g. 1,4,12")):
    """Run the acceptance criteria and print one row per criterion."""
    try:
        options = AcceptanceOptions(log_factor=log_factor or get_settings().log_factor)
        _banner(f"FairSim {APP_VERSION}: acceptance run (log factor {options.log_factor})")
        results = run_acceptance(_parse_only(only), options)
    except (ValidationError, ValueError) as error:
        _fail("Invalid verify options", error)

    table = Table(title="Acceptance criteria")
    for column in ("#", "Criterion", "Result", "Value", "Seconds", "Detail"):
        table.add_column(column)
    for result in results:
        verdict = "[green]PASS[/green]" if result.passed else "[red]FAIL[/red]"
        table.add_row(str(result.key), result.title, verdict, f"{result.value:.4f}",
                      f"{result.seconds:.1f}", result.detail)
    console.print(table)
    if not all(result.passed for result in results):
        raise typer.Exit(code=EXIT_ACCEPTANCE)


@app.command()
def gen(n: int = typer.Option(..., "--n", min=1), m: int = typer.Option(..., "--m", min=1),
        mode: Mode = typer.Option(Mode.GOODS, "--mode"),
        mixture: MixtureName = typer.Option(..., "--mixture"),
        seed: int = typer.Option(0, "--seed", min=0),
        out: Path = typer.Option(..., "--out", help="Instance JSON destination")):
    """Generate one instance and dump it."""
    try:
        instance = generate(n, m, mode, FamilyMixture(name=mixture), seed)
    except (ValidationError, ValueError) as error:
        _fail("Invalid instance parameters", error)
    try:
        save_instance(instance, out)
    except OSError as error:
        _fail("Cannot write --out", error)
    console.print(f"{mode.value} instance n={n} m={m} written to {out}")


@app.command()
def allocate(instance_path: Path = typer.Option(..., "--instance", exists=True, dir_okay=False),
             algorithm: str = typer.Option("auto", "--algorithm", help="Algorithm name or 'auto'"),
             s: Optional[int] = typer.Option(None, "--s", help="Sample size for sampling"),
             seed: int = typer.Option(0, "--seed", min=0, help="Sampling seed"),
             c: Optional[float] = typer.Option(None, "--c", help="Mean bound for prop_linear"),
             log_factor: Optional[float] = typer.Option(None, "--log-factor")):
    """Allocate a dumped instance and print its MetricsReport as JSON."""
    try:
        instance = load_instance(instance_path)
        if algorithm == "auto":
            name = choose_algorithm(instance.n, instance.m, instance.mode, c)
        else:
            name = Algorithm(algorithm)
        logger.info("Allocating %s with %s", instance_path, name.value)
        outcome, _ = run_algorithm(name, instance, s=s, seed=seed, c=c,
                                   log_factor=log_factor or get_settings().log_factor)
    except (ValidationError, ValueError) as error:
        _fail("Cannot allocate", error)
    if not outcome.ok:
        failure = outcome.result
        console.print(f"[yellow]{name.value} infeasible at {failure.stage.value}[/yellow]: "
                      f"matched {failure.matched} of {failure.required}")
        return
    typer.echo(evaluate(instance, outcome.allocation).model_dump_json())


if __name__ == "__main__":
    app()
