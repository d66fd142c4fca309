from .adjustment import AdjustmentFit, TransformedOutcomes, fit_adjustment, transform_outcomes
from .analysis import (
    ArmFit,
    InferenceResult,
    adjusted_inference,
    analyze_cohort,
    efficiency_holds,
    fit_arms,
    unadjusted_inference,
)
from .wald import WaldSummary, critical_value, wald_summary

__all__ = [
    "AdjustmentFit",
    "ArmFit",
    "InferenceResult",
    "TransformedOutcomes",
    "WaldSummary",
    "adjusted_inference",
    "analyze_cohort",
    "critical_value",
    "efficiency_holds",
    "fit_adjustment",
    "fit_arms",
    "transform_outcomes",
    "unadjusted_inference",
    "wald_summary",
]
