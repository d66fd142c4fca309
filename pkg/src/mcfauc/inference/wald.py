import math
from dataclasses import dataclass
from typing import Literal

from scipy import stats

from ..model.errors import DegenerateEstimateError

Scale = Literal["identity", "exp"]


@dataclass(frozen=True)
class WaldSummary:
    point: float
    se: float
    ci_lower: float
    ci_upper: float
    z: float
    p_value: float


def critical_value(alpha: float) -> float:
    """z_{alpha/2}, the upper alpha/2 standard normal quantile."""
    return float(stats.norm.isf(alpha / 2))


def wald_summary(point: float, variance: float, alpha: float, scale: Scale = "identity") -> WaldSummary:
    """
    Normal-theory test and interval for a point estimate with known variance.

    With scale="exp" the interval is built on the given (log) scale and then
    exponentiated; point, z and p stay on the log scale.
    """
    if not math.isfinite(variance) or variance <= 0:
        raise DegenerateEstimateError(f"variance must be positive and finite, got {variance!r}")
    if not math.isfinite(point):
        raise DegenerateEstimateError(f"point estimate must be finite, got {point!r}")
    se = math.sqrt(variance)
    half_width = critical_value(alpha) * se
    lower, upper = point - half_width, point + half_width
    if scale == "exp":
        lower, upper = math.exp(lower), math.exp(upper)
    elif scale != "identity":
        raise ValueError(f"unknown scale {scale!r}")
    z = point / se
    return WaldSummary(
        point=point,
        se=se,
        ci_lower=lower,
        ci_upper=upper,
        z=z,
        p_value=float(2 * stats.norm.sf(abs(z))),
    )
