"""
Subject-level recurrent-event data: records, cohorts, centered covariates and
analysis settings.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields
from functools import cached_property
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .const import (
    CONTROL,
    DEFAULT_ALPHA,
    ENDPOINTS,
    ESTIMAND_CHOICES,
    ESTIMANDS,
    RMST_WEIGHTS,
    TREATED,
)
from .errors import AnalysisConfigError, CohortValidationError, NoCovariatesError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubjectRecord:
    """One subject: arm, follow-up, terminal status, recurrent events and covariates."""

    id: str
    arm: int
    followup: float
    terminal: int
    events: Tuple[float, ...] = ()
    covariates: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "events", tuple(float(t) for t in self.events))
        object.__setattr__(self, "covariates", tuple(float(x) for x in self.covariates))
        self.validate()

    def validate(self) -> None:
        prefix = f"subject '{self.id}'"
        if self.arm not in (CONTROL, TREATED):
            raise CohortValidationError(f"{prefix}: arm must be 0 or 1, got {self.arm!r}")
        if self.terminal not in (0, 1):
            raise CohortValidationError(f"{prefix}: terminal must be 0 or 1, got {self.terminal!r}")
        if not math.isfinite(self.followup) or self.followup < 0:
            raise CohortValidationError(
                f"{prefix}: followup must be a nonnegative finite number, got {self.followup!r}"
            )
        previous = -math.inf
        for t in self.events:
            if not math.isfinite(t) or t < 0:
                raise CohortValidationError(f"{prefix}: event time must be nonnegative, got {t!r}")
            if t > self.followup:
                raise CohortValidationError(f"{prefix}: event after follow-up ({t} > {self.followup})")
            if t <= previous:
                raise CohortValidationError(f"{prefix}: event times must be strictly increasing")
            previous = t
        if self.terminal == 1 and self.events and self.events[-1] == self.followup:
            raise CohortValidationError(
                f"{prefix}: recurrent event tied with the terminal event at {self.followup}"
            )
        if not all(math.isfinite(x) for x in self.covariates):
            raise CohortValidationError(f"{prefix}: covariates must be finite numbers")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "arm": self.arm,
            "followup": self.followup,
            "terminal": self.terminal,
            "events": list(self.events),
            "covariates": list(self.covariates),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SubjectRecord":
        """
        Constructs a SubjectRecord from a dictionary, ignoring unknown fields.
        """
        known_field_names = {f.name for f in fields(cls)}
        filtered_data = {k: v for k, v in data.items() if k in known_field_names}
        return cls(**filtered_data)


@dataclass(frozen=True, eq=False)
class EventData:
    """
    Array view of a set of subjects, the form every estimator works on.

    event_owner[k] is the row (0-based, in subject order) owning event_times[k].
    """

    followup: np.ndarray
    terminal: np.ndarray
    event_times: np.ndarray
    event_owner: np.ndarray
    sorted_followup: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "sorted_followup", np.sort(self.followup))

    @classmethod
    def from_records(cls, records: Iterable[SubjectRecord]) -> "EventData":
        records = tuple(records)
        followup = np.array([r.followup for r in records], dtype=float)
        terminal = np.array([r.terminal for r in records], dtype=int)
        counts = [len(r.events) for r in records]
        event_times = np.array([t for r in records for t in r.events], dtype=float)
        event_owner = np.repeat(np.arange(len(records)), counts)
        return cls(followup, terminal, event_times, event_owner)

    @property
    def n(self) -> int:
        return int(self.followup.shape[0])

    @property
    def max_followup(self) -> float:
        return float(self.sorted_followup[-1]) if self.n else 0.0

    def risk_count(self, u: Any) -> Any:
        """Y(u) = #{i : T_i >= u}, vectorized over u."""
        return self.n - np.searchsorted(self.sorted_followup, u, side="left")


def as_event_data(records: "Iterable[SubjectRecord] | EventData | Cohort") -> EventData:
    if isinstance(records, EventData):
        return records
    if isinstance(records, Cohort):
        return records.event_data()
    return EventData.from_records(records)


@dataclass(frozen=True)
class Cohort:
    """A validated set of subjects sharing one covariate layout."""

    subjects: Tuple[SubjectRecord, ...]
    covariate_names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        subjects = tuple(self.subjects)
        object.__setattr__(self, "subjects", subjects)
        p = len(subjects[0].covariates) if subjects else len(self.covariate_names)
        names = tuple(self.covariate_names) or tuple(f"x{k + 1}" for k in range(p))
        object.__setattr__(self, "covariate_names", names)
        if len(names) != p:
            raise CohortValidationError(
                f"{len(names)} covariate names given for {p} covariate columns"
            )
        seen = set()
        for record in subjects:
            if record.id in seen:
                raise CohortValidationError(f"duplicate id '{record.id}'")
            seen.add(record.id)
            if len(record.covariates) != p:
                raise CohortValidationError(
                    f"subject '{record.id}' has {len(record.covariates)} covariates, expected {p}"
                )

    @property
    def p(self) -> int:
        return len(self.covariate_names)

    @property
    def n(self) -> int:
        return len(self.subjects)

    @property
    def n0(self) -> int:
        return int(np.sum(self.arms == CONTROL))

    @property
    def n1(self) -> int:
        return int(np.sum(self.arms == TREATED))

    @cached_property
    def arms(self) -> np.ndarray:
        return np.array([r.arm for r in self.subjects], dtype=int)

    @cached_property
    def covariate_matrix(self) -> np.ndarray:
        if not self.subjects:
            return np.zeros((0, self.p))
        return np.array([r.covariates for r in self.subjects], dtype=float).reshape(self.n, self.p)

    def records(self, arm: Optional[int] = None) -> Tuple[SubjectRecord, ...]:
        if arm is None:
            return self.subjects
        return tuple(r for r in self.subjects if r.arm == arm)

    def arm(self, arm: int) -> "Cohort":
        return Cohort(self.records(arm), self.covariate_names)

    @cached_property
    def _event_data_cache(self) -> Dict[Optional[int], EventData]:
        return {}

    def event_data(self, arm: Optional[int] = None) -> EventData:
        cache = self._event_data_cache
        if arm not in cache:
            cache[arm] = EventData.from_records(self.records(arm))
        return cache[arm]

    def require_two_arms(self) -> None:
        if self.n0 == 0 or self.n1 == 0:
            raise CohortValidationError(
                f"both arms must be nonempty (n0={self.n0}, n1={self.n1})"
            )

    def select_covariates(self, names: Sequence[str]) -> "Cohort":
        """Returns a cohort keeping only the named covariate columns, in the given order."""
        index = {name: k for k, name in enumerate(self.covariate_names)}
        missing = [name for name in names if name not in index]
        if missing:
            raise CohortValidationError(
                f"unknown covariate(s): {', '.join(missing)}; available: {', '.join(self.covariate_names) or 'none'}"
            )
        columns = [index[name] for name in names]
        subjects = tuple(
            SubjectRecord(
                id=r.id,
                arm=r.arm,
                followup=r.followup,
                terminal=r.terminal,
                events=r.events,
                covariates=tuple(r.covariates[k] for k in columns),
            )
            for r in self.subjects
        )
        return Cohort(subjects, tuple(names))

    @classmethod
    def from_arrays(
        cls,
        arm: Sequence[int],
        followup: Sequence[float],
        terminal: Sequence[int],
        events: Sequence[Sequence[float]],
        covariates: Optional[np.ndarray] = None,
        covariate_names: Sequence[str] = (),
    ) -> "Cohort":
        n = len(arm)
        matrix = np.zeros((n, 0)) if covariates is None else np.asarray(covariates, dtype=float)
        subjects = tuple(
            SubjectRecord(
                id=f"s{i}",
                arm=int(arm[i]),
                followup=float(followup[i]),
                terminal=int(terminal[i]),
                events=tuple(events[i]),
                covariates=tuple(matrix[i]),
            )
            for i in range(n)
        )
        return cls(subjects, tuple(covariate_names))


@dataclass(frozen=True, eq=False)
class CenteredCovariates:
    """Covariates centered at the pooled sample mean, X_i = X*_i - X-bar."""

    matrix: np.ndarray
    means: np.ndarray
    names: Tuple[str, ...]
    degenerate: np.ndarray

    @property
    def usable(self) -> np.ndarray:
        """Indices of the columns with nonzero pooled variance."""
        return np.flatnonzero(~self.degenerate)

    def reconstruct(self) -> np.ndarray:
        return self.matrix + self.means


def center_covariates(cohort: Cohort) -> CenteredCovariates:
    if cohort.p == 0:
        raise NoCovariatesError("no covariates to adjust for")
    raw = cohort.covariate_matrix
    means = raw.mean(axis=0)
    degenerate = np.ptp(raw, axis=0) == 0
    for k in np.flatnonzero(degenerate):
        logger.warning(
            f"Covariate '{cohort.covariate_names[k]}' has zero variance and is excluded from adjustment."
        )
    return CenteredCovariates(
        matrix=raw - means,
        means=means,
        names=cohort.covariate_names,
        degenerate=degenerate,
    )


def risk_set_count(records: "Iterable[SubjectRecord] | EventData", u: float) -> int:
    """Number of subjects still at risk at u, i.e. with followup >= u."""
    return int(as_event_data(records).risk_count(u))


@dataclass(frozen=True)
class AnalysisConfig:
    """
    tau is the horizon. followup_limit is the planned maximum follow-up: when
    set, horizons up to it are accepted even if the last observed follow-up
    time in an arm falls short of it.
    """

    tau: float
    alpha: float = DEFAULT_ALPHA
    estimand: str = "both"
    endpoint: str = "auc"
    followup_limit: Optional[float] = None
    rmst_weight: str = "survival"

    def __post_init__(self) -> None:
        if not math.isfinite(self.tau) or self.tau <= 0:
            raise AnalysisConfigError(f"tau must be positive, got {self.tau!r}")
        if self.followup_limit is not None and not self.followup_limit > 0:
            raise AnalysisConfigError(
                f"followup_limit must be positive, got {self.followup_limit!r}"
            )
        if not 0 < self.alpha < 1:
            raise AnalysisConfigError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.estimand not in ESTIMAND_CHOICES:
            raise AnalysisConfigError(
                f"estimand must be one of {', '.join(ESTIMAND_CHOICES)}, got {self.estimand!r}"
            )
        if self.endpoint not in ENDPOINTS:
            raise AnalysisConfigError(
                f"endpoint must be one of {', '.join(ENDPOINTS)}, got {self.endpoint!r}"
            )
        if self.rmst_weight not in RMST_WEIGHTS:
            raise AnalysisConfigError(
                f"rmst_weight must be one of {', '.join(RMST_WEIGHTS)}, got {self.rmst_weight!r}"
            )

    @property
    def estimands(self) -> Tuple[str, ...]:
        return ESTIMANDS if self.estimand == "both" else (self.estimand,)
