from .argmax import allocate_argmax
from .dispatch import Algorithm, choose_algorithm, run_algorithm, supports_mode
from .ef_small import allocate_ef_small, allocate_ef_small_chores
from .outcome import AllocOutcome, InfeasibleOutcome, SampleLog, Stage
from .proportional import allocate_prop_linear, allocate_prop_two_stage
from .sampling import Regime, allocate_sampling, sample_size, sample_size_for_instance
from .thresholds import (
    DEFAULT_LOG_FACTOR,
    PROP_SLACK,
    Thresholds,
    chores_thresholds,
    goods_thresholds,
    item_alphas,
    proportional_r,
)
