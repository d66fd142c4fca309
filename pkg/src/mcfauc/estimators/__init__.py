from .arm import (
    ArmEstimators,
    arm_estimators,
    auc,
    auc_curve,
    auc_ratio_curve,
    check_horizon,
    kaplan_meier,
    mcf,
    rate_increments,
    rmst,
    terminal_hazard_increments,
)
from .influence import InfluenceSet, influence_auc, influence_rmst, jackknife_se
from .step import StepFunction

__all__ = [
    "ArmEstimators",
    "InfluenceSet",
    "StepFunction",
    "arm_estimators",
    "auc",
    "auc_curve",
    "auc_ratio_curve",
    "check_horizon",
    "influence_auc",
    "influence_rmst",
    "jackknife_se",
    "kaplan_meier",
    "mcf",
    "rate_increments",
    "rmst",
    "terminal_hazard_increments",
]
