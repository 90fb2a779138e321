"""Two-argument means, their parameter curves, and an auditor for inequalities between them."""

__version__ = "0.1.0"

from .means import (  # noqa: E402
    Alzer,
    Classical,
    DomainError,
    EvalResult,
    Lehmer,
    PositivePair,
    Power,
    WeightedPower,
    alzer_mean,
    classical_mean,
    evaluate,
    evaluate_many,
    lehmer_mean,
    log_eval,
    power_mean,
    weighted_power_mean,
)

__all__ = [
    "Alzer",
    "Classical",
    "DomainError",
    "EvalResult",
    "Lehmer",
    "PositivePair",
    "Power",
    "WeightedPower",
    "alzer_mean",
    "classical_mean",
    "evaluate",
    "evaluate_many",
    "lehmer_mean",
    "log_eval",
    "power_mean",
    "weighted_power_mean",
]
