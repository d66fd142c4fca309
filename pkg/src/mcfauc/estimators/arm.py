"""
Per-arm nonparametric estimators: Kaplan-Meier survival, Nelson-Aalen rate and
terminal-hazard increments, the mean cumulative function, and the areas under
the MCF and under the survival curve.

Every integral in the package uses the Kaplan-Meier left limit S(u-).
"""
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Tuple, Union

import numpy as np

from ..model.cohort import Cohort, EventData, SubjectRecord, as_event_data
from ..model.errors import HorizonError
from .step import StepFunction

Records = Union[Iterable[SubjectRecord], EventData, Cohort]


def _death_counts(data: EventData) -> Tuple[np.ndarray, np.ndarray]:
    deaths = data.followup[data.terminal == 1]
    return np.unique(deaths, return_counts=True)


def kaplan_meier(records: Records) -> StepFunction:
    """Product-limit estimate of P(D > u); identically 1 when nobody dies."""
    data = as_event_data(records)
    times, counts = _death_counts(data)
    at_risk = data.risk_count(times)
    levels = np.cumprod(1.0 - counts / at_risk)
    return StepFunction(times, levels, "cumulative", 1.0)


def rate_increments(records: Records) -> StepFunction:
    data = as_event_data(records)
    times, counts = np.unique(data.event_times, return_counts=True)
    at_risk = data.risk_count(times)
    assert np.all(at_risk > 0), "recurrent event observed with an empty risk set"
    return StepFunction(times, counts / at_risk, "increment", 0.0)


def terminal_hazard_increments(records: Records) -> StepFunction:
    data = as_event_data(records)
    times, counts = _death_counts(data)
    return StepFunction(times, counts / data.risk_count(times), "increment", 0.0)


def mcf(survival: StepFunction, rate: StepFunction) -> StepFunction:
    """mu(t) = sum over rate jumps u <= t of S(u-) dR(u), as a cumulative step function."""
    times = rate.jump_times
    jumps = survival.value_at_left(times) * rate.increments
    return StepFunction(times, np.cumsum(jumps), "cumulative", 0.0)


@dataclass(frozen=True, eq=False)
class ArmEstimators:
    survival: StepFunction
    rate: StepFunction
    mcf: StepFunction
    terminal_hazard: StepFunction
    data: EventData

    @property
    def n_arm(self) -> int:
        return self.data.n

    @property
    def max_followup(self) -> float:
        return self.data.max_followup

    def risk(self, u: Any) -> Any:
        return self.data.risk_count(u)


def arm_estimators(records: Records) -> ArmEstimators:
    data = as_event_data(records)
    survival = kaplan_meier(data)
    rate = rate_increments(data)
    return ArmEstimators(
        survival=survival,
        rate=rate,
        mcf=mcf(survival, rate),
        terminal_hazard=terminal_hazard_increments(data),
        data=data,
    )


def check_horizon(tau: float, max_followup: float, followup_limit: Optional[float] = None) -> None:
    """
    Raises HorizonError when tau lies past both the last observed follow-up
    and the planned follow-up limit, if any.
    """
    if tau < 0:
        raise ValueError(f"horizon must be nonnegative, got {tau}")
    reach = max_followup if followup_limit is None else max(max_followup, followup_limit)
    if tau > reach:
        raise HorizonError(
            f"horizon beyond observed risk: tau={tau:g} exceeds the maximum follow-up {reach:g}"
        )


def auc(arm: ArmEstimators, tau: float, followup_limit: Optional[float] = None) -> float:
    """U(tau) = sum over u_k <= tau of (tau - u_k) S(u_k-) dR(u_k)."""
    check_horizon(tau, arm.max_followup, followup_limit)
    times = arm.mcf.jump_times
    keep = times <= tau
    return float(np.sum((tau - times[keep]) * arm.mcf.increments[keep]))


def rmst(
    survival: StepFunction,
    tau: float,
    max_followup: Optional[float] = None,
    followup_limit: Optional[float] = None,
) -> float:
    """
    Area under the survival curve over [0, tau]. The horizon is only checked
    when the arm's maximum follow-up is supplied.
    """
    if max_followup is not None:
        check_horizon(tau, max_followup, followup_limit)
    elif tau < 0:
        raise ValueError(f"horizon must be nonnegative, got {tau}")
    return survival.integrate(0.0, tau)


def auc_curve(arm: ArmEstimators, grid: Any) -> np.ndarray:
    """
    U(t) for every t in grid, using U(t) = t mu(t) - sum over u_k <= t of u_k dmu(u_k).
    """
    grid = np.asarray(grid, dtype=float)
    times = arm.mcf.jump_times
    dmu = arm.mcf.increments
    mass = np.concatenate(([0.0], np.cumsum(dmu)))
    moment = np.concatenate(([0.0], np.cumsum(times * dmu)))
    k = np.searchsorted(times, grid, side="right")
    return grid * mass[k] - moment[k]


def auc_ratio_curve(arm1: ArmEstimators, arm0: ArmEstimators, grid: Any) -> np.ndarray:
    """U1(t) / U0(t) over grid, NaN wherever the control area is still zero."""
    treated = auc_curve(arm1, grid)
    control = auc_curve(arm0, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(control > 0, treated / np.where(control > 0, control, 1.0), np.nan)
