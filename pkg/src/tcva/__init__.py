"""Temperature-controlled verdict aggregation for LLM-judge evaluation."""

from .aggregation import (
    AGGRESSIVE,
    CONSERVATIVE,
    DEFAULT,
    LINEAR,
    SCHEMES,
    EvaluationScore,
    TemperatureMapping,
    VerdictLevel,
    WeightScheme,
    aggregate,
    get_scheme,
    none_penalty_factor,
    power_mean,
    temperature_to_p,
    weight_of,
)
from .baselines import (
    AblationConfig,
    Variant,
    binary_fraction_score,
    collapse_to_binary,
    reaggregate_sweep,
    run_ablation,
    ternary_mean_score,
)
from .stats import (
    PairedScores,
    bootstrap_ci,
    kendall_tau,
    mae,
    paired_bootstrap_test,
    spearman_rho,
    stratified_sample,
)

__version__ = "0.1.0"
