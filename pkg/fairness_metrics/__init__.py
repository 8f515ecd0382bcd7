from .metrics import (
    SLACK,
    ApproxChecks,
    MetricsReport,
    approx_checks,
    bundle_value_matrix,
    envy_matrix,
    evaluate,
    fraction_envious,
    is_ef,
    is_prop,
    social_welfare,
    welfare_ratio,
    worst_envy_ratio,
)
