from .oracle import (
    MAX_ASSIGNMENTS,
    MAX_LEFT_VERTICES,
    ExhaustiveReport,
    OracleSizeError,
    brute_max_matching,
    definitional_flags,
    exhaustive_scan,
    matching_rate,
)
