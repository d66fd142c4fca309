"""
Per-subject influence values for the area under the MCF and for the RMST.

For the AUC, psi_i = P_i - Q_i where P_i integrates the recurrent-event
martingale residual dM_i and Q_i the terminal-event residual dM_i^D. All
integrals are finite sums over the distinct observed times <= tau, with
P(T >= u) estimated by Y(u) / n_arm.
"""
import logging
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
import pandas as pd

from ..model.cohort import EventData, as_event_data
from ..model.errors import HorizonError
from .arm import ArmEstimators, Records, arm_estimators, auc, check_horizon, rmst, terminal_hazard_increments
from .step import StepFunction

logger = logging.getLogger(__name__)

RmstWeight = Literal["survival", "at_risk"]


@dataclass(frozen=True, eq=False)
class InfluenceSet:
    """Influence values of one arm, ordered as the arm's records."""

    arm: Optional[int]
    tau: float
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        if self.p.shape != self.q.shape:
            raise ValueError("P and Q must have one value per subject")

    @property
    def psi(self) -> np.ndarray:
        return self.p - self.q

    @property
    def n(self) -> int:
        return int(self.p.shape[0])

    def second_moment(self) -> float:
        """Within-arm mean of psi squared."""
        return float(np.mean(self.psi**2)) if self.n else 0.0

    def to_frame(self, ids: Optional[Sequence[str]] = None) -> pd.DataFrame:
        columns = {"arm": [self.arm] * self.n, "P": self.p, "Q": self.q, "psi": self.psi}
        if ids is not None:
            columns = {"id": list(ids), **columns}
        return pd.DataFrame(columns)


def _martingale_integral(
    data: EventData,
    jump_times: np.ndarray,
    weights: np.ndarray,
    increments: np.ndarray,
    observed: np.ndarray,
) -> np.ndarray:
    """
    sum over jump times u of weight(u) * (dN_i(u) - 1(T_i >= u) * increment(u)).

    observed[i] is the summed weight of subject i's own counting-process jumps;
    the compensator is accumulated up to each subject's follow-up time.
    """
    compensator = np.concatenate(([0.0], np.cumsum(weights * increments)))
    reach = np.searchsorted(jump_times, data.followup, side="right")
    return observed - compensator[reach]


def _check_matches(data: EventData, est: ArmEstimators) -> None:
    same = data is est.data or (
        data.n == est.n_arm
        and np.array_equal(data.followup, est.data.followup)
        and np.array_equal(data.terminal, est.data.terminal)
        and np.array_equal(data.event_times, est.data.event_times)
    )
    if not same:
        raise ValueError("estimators were not built from these records")


def influence_auc(records: Records, est: ArmEstimators, tau: float, arm: Optional[int] = None) -> InfluenceSet:
    data = as_event_data(records)
    _check_matches(data, est)
    n = data.n

    # Recurrent-event part over rate jumps u <= tau.
    u = est.rate.jump_times
    keep = u <= tau
    u = u[keep]
    d_rate = est.rate.increments[keep]
    d_mu = est.mcf.increments[keep]
    share_u = data.risk_count(u) / n
    w = (tau - u) * est.survival.value_at_left(u) / share_u

    own = data.event_times <= tau
    own_weight = w[np.searchsorted(u, data.event_times[own])]
    observed_p = np.bincount(data.event_owner[own], weights=own_weight, minlength=n)
    p = _martingale_integral(data, u, w, d_rate, observed_p)

    # Terminal-event part over death times d <= tau, inner weight on (d, tau].
    d = est.terminal_hazard.jump_times
    keep_d = d <= tau
    d = d[keep_d]
    d_hazard = est.terminal_hazard.increments[keep_d]
    exposure = (tau - u) * d_mu
    tail = np.concatenate(([0.0], np.cumsum(exposure)))
    inner = tail[-1] - tail[np.searchsorted(u, d, side="right")]
    v = inner / (data.risk_count(d) / n)

    dead = (data.terminal == 1) & (data.followup <= tau)
    observed_q = np.zeros(n)
    observed_q[dead] = v[np.searchsorted(d, data.followup[dead])]
    q = _martingale_integral(data, d, v, d_hazard, observed_q)

    return InfluenceSet(arm=arm, tau=tau, p=p, q=q)


def influence_rmst(
    records: Records,
    survival: StepFunction,
    tau: float,
    weight: RmstWeight = "survival",
    arm: Optional[int] = None,
) -> InfluenceSet:
    """
    psi_i = -sum over death times s <= tau of [integral of S over (s, tau]] dM_i^D(s) / S(s-).

    weight="at_risk" replaces S(s-) by Y(s)/n_arm. P is reported as zero and
    Q as -psi so both endpoints flow through the same downstream code.
    """
    data = as_event_data(records)
    n = data.n
    hazard = terminal_hazard_increments(data)
    s = hazard.jump_times
    keep = s <= tau
    s = s[keep]
    d_hazard = hazard.increments[keep]

    inner = survival.cumulative_integral(tau) - survival.cumulative_integral(s)
    if weight == "survival":
        denominator = survival.value_at_left(s)
        if np.any(denominator <= 0):
            vanished = float(s[np.argmax(denominator <= 0)])
            raise HorizonError(f"survival vanished before horizon: S({vanished:g}-) = 0 with tau={tau:g}")
    elif weight == "at_risk":
        denominator = data.risk_count(s) / n
    else:
        raise ValueError(f"unknown RMST influence weight {weight!r}")
    v = inner / denominator

    dead = (data.terminal == 1) & (data.followup <= tau)
    observed = np.zeros(n)
    observed[dead] = v[np.searchsorted(s, data.followup[dead])]
    q = _martingale_integral(data, s, v, d_hazard, observed)
    return InfluenceSet(arm=arm, tau=tau, p=np.zeros(n), q=q)


def _without(data: EventData, i: int) -> EventData:
    keep = np.ones(data.n, dtype=bool)
    keep[i] = False
    kept_events = data.event_owner != i
    owner = data.event_owner[kept_events]
    return EventData(
        data.followup[keep],
        data.terminal[keep],
        data.event_times[kept_events],
        owner - (owner > i),
    )


def jackknife_se(
    records: Records,
    tau: float,
    endpoint: str = "auc",
    followup_limit: Optional[float] = None,
) -> float:
    """Leave-one-out jackknife standard error of the arm's AUC (or RMST) at tau."""
    data = as_event_data(records)
    n = data.n
    if n < 2:
        raise ValueError("the jackknife needs at least two subjects")
    check_horizon(tau, data.max_followup, followup_limit)
    reach = max(data.max_followup, followup_limit or 0.0, tau)
    estimates = np.empty(n)
    for i in range(n):
        est = arm_estimators(_without(data, i))
        if endpoint == "auc":
            estimates[i] = auc(est, tau, followup_limit=reach)
        elif endpoint == "rmst":
            estimates[i] = rmst(est.survival, tau)
        else:
            raise ValueError(f"unknown endpoint {endpoint!r}")
    spread = estimates - estimates.mean()
    se = float(np.sqrt((n - 1) / n * np.sum(spread**2)))
    logger.debug(f"Jackknife SE over {n} leave-one-out fits: {se:.6g}")
    return se
