from .acceptance import CRITERIA, AcceptanceOptions, CriterionResult, run_acceptance, run_criterion
from .cache import CacheConflictError, TrialKey, TrialOutcome, TrialResult, cache_path, fingerprint
from .config import ExperimentConfig, load_config
from .plot_data import PlotMetric, aggregate, emit_plot_data
from .runner import ExperimentRunner, RunStats, run, run_unit, trial_seed
from .settings import HarnessSettings, get_settings
