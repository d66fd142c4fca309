from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np

from mcfauc.model.cohort import Cohort, SubjectRecord
from mcfauc.model.ingest import write_cohort
from mcfauc.simulation.scenario import ScenarioSpec, simulate_trial
from mcfauc.utils.rng import replicate_rng

SUBJECTS_HEADER = "id,arm,followup,terminal"
EVENTS_HEADER = "id,time"


def record(
    id: str,
    arm: int = 0,
    followup: float = 2.0,
    terminal: int = 0,
    events: Sequence[float] = (),
    covariates: Sequence[float] = (),
) -> SubjectRecord:
    return SubjectRecord(
        id=id,
        arm=arm,
        followup=followup,
        terminal=terminal,
        events=tuple(events),
        covariates=tuple(covariates),
    )


def hand_cohort() -> Cohort:
    """
    Control: A (event at 1), B (no events). Treated: C (events at 0.5, 1.5),
    D (event at 1). Everybody censored at 2.
    """
    return Cohort(
        (
            record("A", 0, events=(1.0,)),
            record("B", 0),
            record("C", 1, events=(0.5, 1.5)),
            record("D", 1, events=(1.0,)),
        )
    )


def simulated_cohort(
    case: int = 1,
    theta: float = 0.0,
    n: int = 400,
    seed: int = 0,
    scheme: str = "simple",
    endpoint: str = "auc",
) -> Cohort:
    spec = ScenarioSpec(endpoint=endpoint, case=case, theta=theta, n=n, scheme=scheme, replicates=1)
    return simulate_trial(spec, replicate_rng(seed, 0))


def swap_arms(cohort: Cohort) -> Cohort:
    return Cohort(
        tuple(
            SubjectRecord(
                id=r.id,
                arm=1 - r.arm,
                followup=r.followup,
                terminal=r.terminal,
                events=r.events,
                covariates=r.covariates,
            )
            for r in cohort.subjects
        ),
        cohort.covariate_names,
    )


def mirrored_cohort(records: Sequence[SubjectRecord]) -> Cohort:
    """Each record once as control and once, relabeled, as treated."""
    subjects = []
    for r in records:
        for arm in (0, 1):
            subjects.append(
                SubjectRecord(
                    id=f"{r.id}-{arm}",
                    arm=arm,
                    followup=r.followup,
                    terminal=r.terminal,
                    events=r.events,
                    covariates=r.covariates,
                )
            )
    return Cohort(tuple(subjects))


def write_text_files(
    tmp_path: Path,
    subjects: Sequence[str],
    events: Sequence[str],
    covariates: Optional[Sequence[str]] = None,
) -> Dict[str, Path]:
    """Writes raw CSV rows under the standard headers."""
    header = SUBJECTS_HEADER + "".join(f",{name}" for name in covariates or ())
    subjects_path = tmp_path / "subjects.csv"
    events_path = tmp_path / "events.csv"
    subjects_path.write_text("\n".join([header, *subjects]) + "\n")
    events_path.write_text("\n".join([EVENTS_HEADER, *events]) + "\n")
    return {"subjects": subjects_path, "events": events_path}


def write_cohort_files(cohort: Cohort, tmp_path: Path) -> Dict[str, Path]:
    subjects_path = tmp_path / "subjects.csv"
    events_path = tmp_path / "events.csv"
    write_cohort(cohort, subjects_path, events_path)
    return {"subjects": subjects_path, "events": events_path}


def event_loss_oracle(records: Sequence[SubjectRecord], tau: float) -> float:
    """Mean over subjects of the summed (tau - t)+ over their event times."""
    return float(np.mean([sum(max(tau - t, 0.0) for t in r.events) for r in records]))


def with_covariates(cohort: Cohort, matrix: np.ndarray, names: Sequence[str]) -> Cohort:
    """Same subjects and outcomes with a replaced covariate matrix."""
    return Cohort(
        tuple(
            SubjectRecord(
                id=r.id,
                arm=r.arm,
                followup=r.followup,
                terminal=r.terminal,
                events=r.events,
                covariates=tuple(row),
            )
            for r, row in zip(cohort.subjects, np.asarray(matrix, dtype=float))
        ),
        tuple(names),
    )
