"""
Covariate adjustment of the AUC (or RMST) contrasts.

Influence values are rescaled per arm into transformed outcomes (P^k, Q^k),
each outcome is regressed on the pooled-centered covariates within each arm,
and the fitted covariate imbalance is removed from the point estimate.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import linalg

from ..estimators.influence import InfluenceSet
from ..model.cohort import CenteredCovariates
from ..model.const import CONTROL, TREATED
from ..model.errors import DegenerateEstimateError, SingularCovariatesError

logger = logging.getLogger(__name__)

# Relative threshold on the pivoted QR diagonal below which a covariate column
# is treated as a linear combination of the others.
RANK_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class TransformedOutcomes:
    """Per-subject (P^k, Q^k) over the pooled cohort, in cohort order."""

    kind: str
    p: np.ndarray
    q: np.ndarray
    arms: np.ndarray
    treated_scale: float
    control_scale: float

    @property
    def psi(self) -> np.ndarray:
        return self.p - self.q

    @property
    def n(self) -> int:
        return int(self.arms.shape[0])

    @property
    def n0(self) -> int:
        return int(np.sum(self.arms == CONTROL))

    @property
    def n1(self) -> int:
        return int(np.sum(self.arms == TREATED))

    @property
    def point_scale(self) -> float:
        """Factor turning the linearized statistic into the point-estimate scale."""
        if self.kind == "difference":
            return self.n / np.sqrt(self.n0 * self.n1)
        return self.n / (self.n0 * self.n1)

    def linearized_statistic(self) -> float:
        """(1/n) [sum over treated of psi^k - sum over control of psi^k]."""
        psi = self.psi
        return float((psi[self.arms == TREATED].sum() - psi[self.arms == CONTROL].sum()) / self.n)

    def unadjusted_variance(self) -> float:
        """sigma^2_L, the pooled mean of the squared transformed influence values."""
        return float(np.mean(self.psi**2))


def transform_outcomes(
    kind: str,
    influence0: InfluenceSet,
    influence1: InfluenceSet,
    u0: float,
    u1: float,
    arms: np.ndarray,
) -> TransformedOutcomes:
    arms = np.asarray(arms, dtype=int)
    n0, n1 = int(np.sum(arms == CONTROL)), int(np.sum(arms == TREATED))
    if n0 != influence0.n or n1 != influence1.n:
        raise ValueError("influence sets do not match the arm sizes")
    if kind == "difference":
        treated_scale, control_scale = np.sqrt(n0 / n1), np.sqrt(n1 / n0)
    elif kind == "ratio":
        if u0 <= 0 or u1 <= 0:
            raise DegenerateEstimateError(
                f"log-ratio undefined: area is zero in an arm (treated={u1:g}, control={u0:g})"
            )
        treated_scale, control_scale = n0 / u1, n1 / u0
    else:
        raise ValueError(f"unknown estimand {kind!r}")

    p = np.empty(arms.shape[0])
    q = np.empty(arms.shape[0])
    p[arms == TREATED] = treated_scale * influence1.p
    q[arms == TREATED] = treated_scale * influence1.q
    p[arms == CONTROL] = control_scale * influence0.p
    q[arms == CONTROL] = control_scale * influence0.q
    return TransformedOutcomes(
        kind=kind,
        p=p,
        q=q,
        arms=arms,
        treated_scale=float(treated_scale),
        control_scale=float(control_scale),
    )


@dataclass(frozen=True, eq=False)
class AdjustmentFit:
    beta_1p: np.ndarray
    beta_1q: np.ndarray
    beta_0p: np.ndarray
    beta_0q: np.ndarray
    sigma_x: np.ndarray
    correction: float
    columns: Tuple[str, ...]

    @property
    def b(self) -> np.ndarray:
        return self.beta_1p - self.beta_1q + self.beta_0p - self.beta_0q

    def variance_reduction(self, n0: int, n1: int) -> float:
        """(n0 n1 / n^2) b' Sigma_X b."""
        n = n0 + n1
        b = self.b
        return float(n0 * n1 / n**2 * (b @ self.sigma_x @ b))


def _collinear_columns(x: np.ndarray, names: Tuple[str, ...]) -> List[str]:
    """Names of the columns involved in a linear dependence, or [] at full rank."""
    if x.shape[1] == 0:
        return []
    _, r, pivot = linalg.qr(x, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(r))
    if diagonal.size == 0 or diagonal[0] == 0:
        return list(names)
    rank = int(np.sum(diagonal > RANK_RTOL * diagonal[0]))
    if rank == x.shape[1]:
        return []
    independent, dependent = pivot[:rank], pivot[rank:]
    coefficients, *_ = np.linalg.lstsq(x[:, independent], x[:, dependent], rcond=None)
    involved = set(dependent.tolist())
    for k, column in enumerate(independent):
        if np.any(np.abs(coefficients[k]) > RANK_RTOL):
            involved.add(int(column))
    return [names[k] for k in sorted(involved)]


def _arm_coefficients(x: np.ndarray, y: np.ndarray, arm: int, names: Tuple[str, ...]) -> np.ndarray:
    """Least squares without intercept, (X'X)^{-1} X'y, for the columns of y."""
    collinear = _collinear_columns(x, names)
    if collinear:
        raise SingularCovariatesError(
            f"covariates are collinear within arm {arm}: {', '.join(collinear)}",
            columns=collinear,
        )
    gram = x.T @ x
    return linalg.solve(gram, x.T @ y, assume_a="sym")


def adjustment_columns(covariates: CenteredCovariates, arms: np.ndarray) -> np.ndarray:
    """
    Indices of the covariate columns used for adjustment: nonzero pooled
    variance, and not constant within either arm.
    """
    keep = []
    for k in covariates.usable:
        column = covariates.matrix[:, k]
        flat = [arm for arm in (CONTROL, TREATED) if np.ptp(column[arms == arm]) == 0]
        if flat:
            logger.warning(
                f"Covariate '{covariates.names[k]}' is constant within arm {flat[0]} "
                "and is excluded from adjustment."
            )
            continue
        keep.append(int(k))
    return np.array(keep, dtype=int)


def fit_adjustment(outcomes: TransformedOutcomes, covariates: CenteredCovariates) -> AdjustmentFit:
    arms = outcomes.arms
    if covariates.matrix.shape[0] != arms.shape[0]:
        raise ValueError("covariates and outcomes cover different subjects")
    columns = adjustment_columns(covariates, arms)
    names = tuple(covariates.names[k] for k in columns)
    x = covariates.matrix[:, columns]
    n = outcomes.n

    betas = {}
    for arm in (TREATED, CONTROL):
        rows = arms == arm
        y = np.column_stack((outcomes.p[rows], outcomes.q[rows]))
        if x.shape[1] == 0:
            betas[arm] = np.zeros((0, 2))
        else:
            betas[arm] = _arm_coefficients(x[rows], y, arm, names)

    beta_1p, beta_1q = betas[TREATED][:, 0], betas[TREATED][:, 1]
    beta_0p, beta_0q = betas[CONTROL][:, 0], betas[CONTROL][:, 1]
    treated, control = arms == TREATED, arms == CONTROL
    correction = (
        np.sum(x[treated] @ (beta_1p - beta_1q)) - np.sum(x[control] @ (beta_0p - beta_0q))
    ) / n
    sigma_x = x.T @ x / n
    if not all(np.all(np.isfinite(beta)) for beta in (beta_1p, beta_1q, beta_0p, beta_0q)):
        raise DegenerateEstimateError("adjustment coefficients are not finite")
    return AdjustmentFit(
        beta_1p=beta_1p,
        beta_1q=beta_1q,
        beta_0p=beta_0p,
        beta_0q=beta_0q,
        sigma_x=sigma_x,
        correction=float(correction),
        columns=names,
    )
