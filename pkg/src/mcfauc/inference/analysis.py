"""
Unadjusted and covariate-adjusted Wald inference for the difference and the
log-ratio of per-arm areas (AUC under the MCF, or RMST).
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence

from ..estimators.arm import ArmEstimators, arm_estimators, auc, rmst
from ..estimators.influence import InfluenceSet, influence_auc, influence_rmst
from ..model.cohort import AnalysisConfig, CenteredCovariates, Cohort, center_covariates
from ..model.const import CONTROL, TREATED
from ..model.errors import DegenerateEstimateError
from .adjustment import TransformedOutcomes, fit_adjustment, transform_outcomes
from .wald import wald_summary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InferenceResult:
    """
    One test of one estimand. For the ratio, point and z are on the log scale
    while the confidence limits are on the ratio scale.
    """

    estimand: str
    adjusted: bool
    point: float
    se: float
    ci_lower: float
    ci_upper: float
    z: float
    p_value: float
    tau: float
    alpha: float
    n0: int
    n1: int
    endpoint: str = "auc"
    variance_unadjusted: Optional[float] = None
    variance_adjusted: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class ArmFit:
    arm: int
    estimators: ArmEstimators
    area: float
    influence: InfluenceSet


def fit_arms(cohort: Cohort, config: AnalysisConfig) -> Dict[int, ArmFit]:
    """Per-arm estimators, area at tau and influence values for the configured endpoint."""
    cohort.require_two_arms()
    tau = config.tau
    fits = {}
    for arm in (CONTROL, TREATED):
        data = cohort.event_data(arm)
        est = arm_estimators(data)
        if config.endpoint == "auc":
            area = auc(est, tau, config.followup_limit)
            influence = influence_auc(data, est, tau, arm=arm)
        else:
            area = rmst(est.survival, tau, est.max_followup, config.followup_limit)
            influence = influence_rmst(data, est.survival, tau, weight=config.rmst_weight, arm=arm)
        fits[arm] = ArmFit(arm=arm, estimators=est, area=area, influence=influence)
    logger.debug(
        f"{config.endpoint} at tau={tau:g}: treated {fits[TREATED].area:.6g}, control {fits[CONTROL].area:.6g}"
    )
    return fits


def _point(kind: str, fits: Dict[int, ArmFit]) -> float:
    u1, u0 = fits[TREATED].area, fits[CONTROL].area
    if kind == "difference":
        return u1 - u0
    if u0 <= 0 or u1 <= 0:
        raise DegenerateEstimateError(
            f"log-ratio undefined: area is zero in an arm (treated={u1:g}, control={u0:g})"
        )
    return math.log(u1 / u0)


def _outcomes(kind: str, cohort: Cohort, fits: Dict[int, ArmFit]) -> TransformedOutcomes:
    return transform_outcomes(
        kind,
        fits[CONTROL].influence,
        fits[TREATED].influence,
        fits[CONTROL].area,
        fits[TREATED].area,
        cohort.arms,
    )


def _result(
    kind: str,
    adjusted: bool,
    point: float,
    variance: float,
    config: AnalysisConfig,
    cohort: Cohort,
    variance_unadjusted: float,
    variance_adjusted: Optional[float] = None,
) -> InferenceResult:
    summary = wald_summary(point, variance, config.alpha, "exp" if kind == "ratio" else "identity")
    return InferenceResult(
        estimand=kind,
        adjusted=adjusted,
        point=summary.point,
        se=summary.se,
        ci_lower=summary.ci_lower,
        ci_upper=summary.ci_upper,
        z=summary.z,
        p_value=summary.p_value,
        tau=config.tau,
        alpha=config.alpha,
        n0=cohort.n0,
        n1=cohort.n1,
        endpoint=config.endpoint,
        variance_unadjusted=variance_unadjusted,
        variance_adjusted=variance_adjusted,
    )


def _unadjusted(kind: str, cohort: Cohort, config: AnalysisConfig, fits: Dict[int, ArmFit]) -> InferenceResult:
    point = _point(kind, fits)
    treated, control = fits[TREATED], fits[CONTROL]
    m1, m0 = treated.influence.second_moment(), control.influence.second_moment()
    n1, n0 = cohort.n1, cohort.n0
    if kind == "difference":
        variance = m1 / n1 + m0 / n0
    else:
        variance = m1 / (n1 * treated.area**2) + m0 / (n0 * control.area**2)
    sigma_l = _outcomes(kind, cohort, fits).unadjusted_variance()
    return _result(kind, False, point, variance, config, cohort, sigma_l)


def unadjusted_inference(cohort: Cohort, config: AnalysisConfig) -> List[InferenceResult]:
    fits = fit_arms(cohort, config)
    return [_unadjusted(kind, cohort, config, fits) for kind in config.estimands]


def _adjusted(
    kind: str,
    cohort: Cohort,
    config: AnalysisConfig,
    fits: Dict[int, ArmFit],
    covariates: CenteredCovariates,
) -> InferenceResult:
    point = _point(kind, fits)
    outcomes = _outcomes(kind, cohort, fits)
    scale = outcomes.point_scale
    n, n0, n1 = cohort.n, cohort.n0, cohort.n1
    sigma_l = outcomes.unadjusted_variance()

    p_used = len(covariates.usable)
    if min(n0, n1) < p_used + 2:
        logger.warning(
            f"Arm sizes n0={n0}, n1={n1} are too small to adjust for {p_used} covariate(s); "
            "reporting the unadjusted analysis."
        )
        return _result(kind, True, point, scale**2 * sigma_l / n, config, cohort, sigma_l, sigma_l)

    fit = fit_adjustment(outcomes, covariates)
    sigma_cl = sigma_l - fit.variance_reduction(n0, n1)
    if sigma_cl <= 0:
        raise DegenerateEstimateError(
            f"adjusted variance is not positive ({sigma_cl:.3g}); the covariates explain the influence values exactly"
        )
    adjusted_point = point - scale * fit.correction
    return _result(kind, True, adjusted_point, scale**2 * sigma_cl / n, config, cohort, sigma_l, sigma_cl)


def adjusted_inference(
    cohort: Cohort,
    config: AnalysisConfig,
    covariates: Optional[CenteredCovariates] = None,
) -> List[InferenceResult]:
    covariates = covariates if covariates is not None else center_covariates(cohort)
    fits = fit_arms(cohort, config)
    return [_adjusted(kind, cohort, config, fits, covariates) for kind in config.estimands]


def analyze_cohort(
    cohort: Cohort,
    config: AnalysisConfig,
    covariates: Optional[Sequence[str]] = None,
) -> List[InferenceResult]:
    """
    Unadjusted results for every requested estimand, followed by the adjusted
    ones when covariate names are given.
    """
    fits = fit_arms(cohort, config)
    results = [_unadjusted(kind, cohort, config, fits) for kind in config.estimands]
    if covariates:
        centered = center_covariates(cohort.select_covariates(covariates))
        results += [_adjusted(kind, cohort, config, fits, centered) for kind in config.estimands]
    return results


def efficiency_holds(result: InferenceResult) -> bool:
    """True when the adjusted variance does not exceed the unadjusted one."""
    if result.variance_adjusted is None or result.variance_unadjusted is None:
        return True
    return result.variance_adjusted <= result.variance_unadjusted * (1 + 1e-12)

