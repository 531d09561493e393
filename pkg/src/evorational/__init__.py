"""Evolutionary rationality: lottery choice under selection-weighted fitness."""

__version__ = "0.1.0"

from .lottery import (  # noqa: E402
    FitnessParams,
    InvariantViolation,
    JointLottery,
    Lottery,
    ParseError,
    fitness,
    log_fitness_mean,
    mean,
    payoff_geometric_mean,
    taylor_log_fitness_mean,
    variance,
)
from .er_core import (  # noqa: E402
    ERVerdict,
    Verdict,
    WstarCurve,
    WstarResult,
    classify,
    classify_large_w_limit,
    classify_small_w_limit,
    critical_attention,
    growth_gap,
    sweep_wstar,
)

__all__ = [
    "ERVerdict",
    "FitnessParams",
    "InvariantViolation",
    "JointLottery",
    "Lottery",
    "ParseError",
    "Verdict",
    "WstarCurve",
    "WstarResult",
    "classify",
    "classify_large_w_limit",
    "classify_small_w_limit",
    "critical_attention",
    "fitness",
    "growth_gap",
    "log_fitness_mean",
    "mean",
    "payoff_geometric_mean",
    "sweep_wstar",
    "taylor_log_fitness_mean",
    "variance",
]
