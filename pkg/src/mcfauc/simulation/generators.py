"""
Synthetic trial generators.

Recurrent-event designs use three baseline covariates (one Bernoulli(0.5), two
N(0, sd 2)), death at 5 days plus an exponential waiting time, uniform
censoring on (1, 2) years and a 2-year follow-up cap. Cases 1-4 draw events
from an Andersen-Gill intensity 0.3 t exp(theta_case(t) j + X'eta) by
thinning; case 5 draws gap times. The RMST designs draw a single survival
time per subject.
"""
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ..model.errors import ScenarioError

BASELINE_RATE_SLOPE = 0.3
RECURRENT_ETA = 0.2
DEATH_XI = 0.1
DEATH_RATE = 0.05
DEATH_OFFSET = 5 / 365
CENSOR_RANGE = (1.0, 2.0)
FOLLOWUP_CAP = 2.0
GAP_SHIFT = -0.7
GAP_NOISE_MEAN = 0.25
RMST_ETA = 0.5
RMST_CENSOR_RANGE = (10.0, 40.0)

RECURRENT_CASES = (1, 2, 3, 4, 5)
RMST_CASES = (1, 2)

# theta_case(t) = theta * (a t^2 + b t + c), keyed by case.
_EFFECT_SHAPES: Dict[int, Tuple[float, float, float]] = {
    1: (0.0, 0.0, 1.0),
    2: (-0.25, 1.0, 0.0),
    3: (-1.0, 2.0, 0.0),
    4: (-0.25, 0.0, 1.0),
}


@dataclass(frozen=True, eq=False)
class DeathCensor:
    death: np.ndarray
    censor: np.ndarray
    followup: np.ndarray
    terminal: np.ndarray


def gen_baseline(n: int, rng: np.random.Generator) -> np.ndarray:
    """(n, 3) matrix: X1 ~ Bernoulli(0.5), X2 and X3 ~ N(0, sd 2)."""
    x1 = rng.binomial(1, 0.5, size=n).astype(float)
    rest = rng.normal(0.0, 2.0, size=(n, 2))
    return np.column_stack((x1, rest))


def gen_rmst_baseline(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((n, 3))


def gen_death_censor(covariates: np.ndarray, rng: np.random.Generator) -> DeathCensor:
    covariates = np.atleast_2d(covariates)
    n = covariates.shape[0]
    rate = DEATH_RATE * np.exp(covariates @ np.full(covariates.shape[1], DEATH_XI))
    death = DEATH_OFFSET + rng.exponential(1.0 / rate, size=n)
    censor = rng.uniform(*CENSOR_RANGE, size=n)
    end = np.minimum(censor, FOLLOWUP_CAP)
    return DeathCensor(
        death=death,
        censor=censor,
        followup=np.minimum(death, end),
        terminal=(death <= end).astype(int),
    )


def effect_shape(case: int, theta: float) -> Tuple[float, float, float]:
    """Coefficients (a, b, c) with theta_case(t) = a t^2 + b t + c."""
    if case not in _EFFECT_SHAPES:
        raise ScenarioError(f"intensity case must be one of 1-4, got {case}")
    a, b, c = _EFFECT_SHAPES[case]
    return a * theta, b * theta, c * theta


def intensity(
    t: np.ndarray,
    case: int,
    theta: float,
    arm: np.ndarray,
    linear: np.ndarray,
) -> np.ndarray:
    """0.3 t exp(theta_case(t) * arm + linear), elementwise."""
    a, b, c = effect_shape(case, theta)
    return BASELINE_RATE_SLOPE * t * np.exp((a * t**2 + b * t + c) * arm + linear)


def intensity_bound(
    case: int,
    theta: float,
    arm: np.ndarray,
    linear: np.ndarray,
    followup: np.ndarray,
) -> np.ndarray:
    """
    Exact maximum of the intensity over [0, followup] per subject.

    The log-intensity derivative vanishes where 2 a j t^2 + b j t + 1 = 0, so
    the maximum sits at followup or at one of those roots inside (0, followup).
    """
    a, b, _ = effect_shape(case, theta)
    quad = 2 * a * arm
    slope = b * arm
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = slope**2 - 4 * quad
        sqrt_disc = np.sqrt(np.where(disc >= 0, disc, np.nan))
        linear_root = np.where(slope != 0, -1.0 / slope, np.nan)
        root_1 = np.where(quad != 0, (-slope + sqrt_disc) / (2 * quad), linear_root)
        root_2 = np.where(quad != 0, (-slope - sqrt_disc) / (2 * quad), np.nan)
    candidates = [followup]
    for root in (root_1, root_2):
        inside = np.isfinite(root) & (root > 0) & (root < followup)
        candidates.append(np.where(inside, root, 0.0))
    values = [intensity(t, case, theta, arm, linear) for t in candidates]
    return np.max(values, axis=0)


def _split_by_owner(times: np.ndarray, owner: np.ndarray, n: int) -> List[np.ndarray]:
    order = np.lexsort((times, owner))
    times, owner = times[order], owner[order]
    bounds = np.searchsorted(owner, np.arange(n + 1), side="left")
    return [times[bounds[i]:bounds[i + 1]] for i in range(n)]


def gen_recurrent(
    case: int,
    theta: float,
    arm: np.ndarray,
    covariates: np.ndarray,
    followup: np.ndarray,
    rng: np.random.Generator,
) -> List[np.ndarray]:
    """
    Recurrent events on (0, followup] by thinning a homogeneous Poisson
    process whose rate is the per-subject intensity bound.
    """
    arm = np.atleast_1d(np.asarray(arm, dtype=float))
    covariates = np.atleast_2d(covariates)
    followup = np.atleast_1d(np.asarray(followup, dtype=float))
    n = followup.shape[0]
    linear = covariates @ np.full(covariates.shape[1], RECURRENT_ETA)
    bound = intensity_bound(case, theta, arm, linear, followup)

    counts = rng.poisson(bound * followup)
    owner = np.repeat(np.arange(n), counts)
    times = rng.random(owner.shape[0]) * followup[owner]
    accept = rng.random(owner.shape[0]) * bound[owner] < intensity(
        times, case, theta, arm[owner], linear[owner]
    )
    return _split_by_owner(times[accept], owner[accept], n)


def gen_recurrent_inversion(
    theta: float,
    arm: np.ndarray,
    covariates: np.ndarray,
    followup: np.ndarray,
    rng: np.random.Generator,
) -> List[np.ndarray]:
    """
    Case 1 events by inverting the cumulative intensity 0.15 t^2 exp(theta j + X'eta).
    """
    arm = np.atleast_1d(np.asarray(arm, dtype=float))
    covariates = np.atleast_2d(covariates)
    followup = np.atleast_1d(np.asarray(followup, dtype=float))
    scale = BASELINE_RATE_SLOPE / 2 * np.exp(theta * arm + covariates @ np.full(covariates.shape[1], RECURRENT_ETA))
    events = []
    for i in range(followup.shape[0]):
        horizon = scale[i] * followup[i] ** 2
        arrivals: List[float] = []
        total = rng.exponential()
        while total <= horizon:
            arrivals.append(total)
            total += rng.exponential()
        events.append(np.sqrt(np.array(arrivals) / scale[i]))
    return events


def gen_recurrent_gap(
    theta: float,
    arm: np.ndarray,
    covariates: np.ndarray,
    followup: np.ndarray,
    rng: np.random.Generator,
) -> List[np.ndarray]:
    """
    Case 5: gap times exp(-theta j + X'eta - 0.7) + Exponential(mean 0.25),
    accumulated while the running total stays below followup.
    """
    arm = np.atleast_1d(np.asarray(arm, dtype=float))
    covariates = np.atleast_2d(covariates)
    followup = np.atleast_1d(np.asarray(followup, dtype=float))
    n = followup.shape[0]
    if n == 0:
        return []
    floor = np.exp(-theta * arm + covariates @ np.full(covariates.shape[1], RECURRENT_ETA) + GAP_SHIFT)

    clock = np.zeros(n)
    active = np.arange(n)
    times, owners = [], []
    while active.size:
        clock[active] += floor[active] + rng.exponential(GAP_NOISE_MEAN, size=active.size)
        alive = clock[active] < followup[active]
        active = active[alive]
        times.append(clock[active].copy())
        owners.append(active)
    return _split_by_owner(np.concatenate(times), np.concatenate(owners), n)


def gen_rmst_case(
    case: int,
    theta: float,
    arm: np.ndarray,
    covariates: np.ndarray,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Death and censoring times for the RMST designs: case 1 is exponential with
    hazard log(2) exp(-theta j + eta'X), case 2 is exp(theta j + eta'X) plus a
    standard exponential. Censoring is Uniform(10, 40) in both.
    """
    arm = np.atleast_1d(np.asarray(arm, dtype=float))
    covariates = np.atleast_2d(covariates)
    n = arm.shape[0]
    linear = covariates @ np.full(covariates.shape[1], RMST_ETA)
    if case == 1:
        rate = np.log(2.0) * np.exp(-theta * arm + linear)
        death = rng.exponential(1.0 / rate, size=n)
    elif case == 2:
        death = np.exp(theta * arm + linear) + rng.exponential(1.0, size=n)
    else:
        raise ScenarioError(f"RMST case must be 1 or 2, got {case}")
    censor = rng.uniform(*RMST_CENSOR_RANGE, size=n)
    return death, censor
