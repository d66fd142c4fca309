"""
Reading and writing cohorts as two comma-separated files:

    subjects: id,arm,followup,terminal[,x1,...,xp]
    events:   id,time

Row numbers in error messages count data rows from 1 (the header is not counted).
"""
import math
from collections import defaultdict
from pathlib import Path
from typing import IO, Dict, List, Tuple, Union

import pandas as pd

from .cohort import Cohort, SubjectRecord
from .const import EVENT_COLUMNS, SUBJECT_COLUMNS
from .errors import CohortValidationError

Source = Union[str, Path, IO[str]]


def _read_table(source: Source, label: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(
            source,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise CohortValidationError(f"could not parse file: {e}", source=label) from e
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def _text(value: object) -> str:
    return value.strip() if isinstance(value, str) else ""


def _number(value: str, column: str, row: int, label: str) -> float:
    text = _text(value)
    if not text:
        raise CohortValidationError(f"missing value in column '{column}'", row=row, source=label)
    try:
        number = float(text)
    except ValueError:
        raise CohortValidationError(
            f"non-numeric value '{text}' in column '{column}'", row=row, source=label
        ) from None
    if not math.isfinite(number):
        raise CohortValidationError(
            f"non-finite value '{text}' in column '{column}'", row=row, source=label
        )
    return number


def _indicator(value: str, column: str, row: int, label: str) -> int:
    number = _number(value, column, row, label)
    if number not in (0.0, 1.0):
        raise CohortValidationError(
            f"{column} must be 0 or 1, got '{_text(value)}'", row=row, source=label
        )
    return int(number)


def ingest_cohort(subjects_file: Source, events_file: Source) -> Cohort:
    """
    Parses and validates the subjects and events tables into a Cohort.

    Raises:
        CohortValidationError: naming the offending file and data row.
    """
    subjects = _read_table(subjects_file, "subjects")
    if tuple(subjects.columns[: len(SUBJECT_COLUMNS)]) != SUBJECT_COLUMNS:
        raise CohortValidationError(
            f"header must start with {','.join(SUBJECT_COLUMNS)}, got {','.join(subjects.columns)}",
            source="subjects",
        )
    covariate_names = tuple(subjects.columns[len(SUBJECT_COLUMNS):])

    rows: Dict[str, Tuple[int, int, float, int, Tuple[float, ...]]] = {}
    for row, values in enumerate(subjects.itertuples(index=False, name=None), start=1):
        subject_id = _text(values[0])
        if not subject_id:
            raise CohortValidationError("missing id", row=row, source="subjects")
        if subject_id in rows:
            raise CohortValidationError(f"duplicate id '{subject_id}'", row=row, source="subjects")
        arm = _indicator(values[1], "arm", row, "subjects")
        followup = _number(values[2], "followup", row, "subjects")
        if followup < 0:
            raise CohortValidationError("followup must be nonnegative", row=row, source="subjects")
        terminal = _indicator(values[3], "terminal", row, "subjects")
        covariates = tuple(
            _number(value, name, row, "subjects")
            for name, value in zip(covariate_names, values[len(SUBJECT_COLUMNS):])
        )
        rows[subject_id] = (row, arm, followup, terminal, covariates)

    events = _read_table(events_file, "events")
    if tuple(events.columns) != EVENT_COLUMNS:
        raise CohortValidationError(
            f"header must be {','.join(EVENT_COLUMNS)}, got {','.join(events.columns)}",
            source="events",
        )
    grouped: Dict[str, List[Tuple[float, int]]] = defaultdict(list)
    for row, (raw_id, raw_time) in enumerate(events.itertuples(index=False, name=None), start=1):
        subject_id = _text(raw_id)
        if subject_id not in rows:
            raise CohortValidationError(f"unknown id '{subject_id}'", row=row, source="events")
        time = _number(raw_time, "time", row, "events")
        _, _, followup, terminal, _ = rows[subject_id]
        if time < 0:
            raise CohortValidationError("event time must be nonnegative", row=row, source="events")
        if time > followup:
            raise CohortValidationError(
                f"event after follow-up ({time} > {followup}) for id '{subject_id}'",
                row=row,
                source="events",
            )
        if terminal == 1 and time == followup:
            raise CohortValidationError(
                f"recurrent event tied with the terminal event for id '{subject_id}'",
                row=row,
                source="events",
            )
        grouped[subject_id].append((time, row))

    records = []
    for subject_id, (row, arm, followup, terminal, covariates) in rows.items():
        times = sorted(grouped.get(subject_id, []))
        for (previous, _), (current, event_row) in zip(times, times[1:]):
            if current == previous:
                raise CohortValidationError(
                    f"duplicate event time {current} for id '{subject_id}'",
                    row=event_row,
                    source="events",
                )
        try:
            records.append(
                SubjectRecord(
                    id=subject_id,
                    arm=arm,
                    followup=followup,
                    terminal=terminal,
                    events=tuple(t for t, _ in times),
                    covariates=covariates,
                )
            )
        except CohortValidationError as e:
            raise CohortValidationError(e.message, row=row, source="subjects") from e
    return Cohort(tuple(records), covariate_names)


def write_cohort(cohort: Cohort, subjects_file: Source, events_file: Source) -> None:
    """Writes the cohort in the ingest format; floats keep full precision."""
    subjects = pd.DataFrame(
        [
            [r.id, r.arm, r.followup, r.terminal, *r.covariates]
            for r in cohort.subjects
        ],
        columns=[*SUBJECT_COLUMNS, *cohort.covariate_names],
    )
    events = pd.DataFrame(
        [[r.id, t] for r in cohort.subjects for t in r.events],
        columns=list(EVENT_COLUMNS),
    )
    subjects.to_csv(subjects_file, index=False)
    events.to_csv(events_file, index=False)
