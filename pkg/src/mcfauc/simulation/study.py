"""
Replicated simulation studies and their Monte Carlo summaries.
"""
import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..inference.analysis import InferenceResult, analyze_cohort, efficiency_holds
from ..inference.wald import critical_value
from ..model.const import ESTIMANDS
from ..model.errors import McfAucError, StudyAbortedError
from ..utils.rng import replicate_rng
from .scenario import ScenarioSpec, simulate_trial

logger = logging.getLogger(__name__)

DEFAULT_MAX_FAILURE_RATE = 0.01

SUMMARY_COLUMNS = [
    "endpoint",
    "case",
    "scheme",
    "theta",
    "n",
    "estimand",
    "analysis",
    "Est",
    "Est_SE",
    "Bias",
    "Bias_SE",
    "Mean",
    "Median",
    "MC",
    "CP",
    "Power",
    "replicates",
]


@dataclass(frozen=True)
class ReplicateRecord:
    index: int
    results: Sequence[InferenceResult] = ()
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def to_rows(self) -> List[Dict[str, Any]]:
        if self.failed:
            return [{"replicate": self.index, "error": self.error}]
        return [{"replicate": self.index, **r.to_dict(), "error": None} for r in self.results]


@dataclass(frozen=True)
class SummaryCell:
    estimand: str
    analysis: str
    est: float
    est_se: float
    bias: float
    bias_se: float
    mean_se: float
    median_se: float
    mc_sd: float
    cp: float
    power: float
    replicates: int


@dataclass
class SummaryTable:
    spec: ScenarioSpec
    cells: List[SummaryCell]
    failures: List[str] = field(default_factory=list)
    efficiency_violations: int = 0
    records: List[ReplicateRecord] = field(default_factory=list, repr=False)

    def cell(self, estimand: str, analysis: str) -> SummaryCell:
        for cell in self.cells:
            if cell.estimand == estimand and cell.analysis == analysis:
                return cell
        raise KeyError(f"no {analysis} {estimand} cell")

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "endpoint": self.spec.endpoint,
                "case": self.spec.case,
                "scheme": self.spec.scheme,
                "theta": self.spec.theta,
                "n": self.spec.n,
                "estimand": c.estimand,
                "analysis": c.analysis,
                "Est": c.est,
                "Est_SE": c.est_se,
                "Bias": c.bias,
                "Bias_SE": c.bias_se,
                "Mean": c.mean_se,
                "Median": c.median_se,
                "MC": c.mc_sd,
                "CP": c.cp,
                "Power": c.power,
                "replicates": c.replicates,
            }
            for c in self.cells
        ]
        return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.spec.to_dict(),
            "cells": [dataclasses.asdict(c) for c in self.cells],
            "failures": len(self.failures),
            "failure_messages": list(self.failures),
            "efficiency_violations": self.efficiency_violations,
        }

    def replicate_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row for record in self.records for row in record.to_rows()])


def run_replicate(spec: ScenarioSpec, index: int) -> ReplicateRecord:
    """Simulates and analyzes replicate `index`; library errors mark it failed."""
    rng = replicate_rng(spec.base_seed, index)
    try:
        cohort = simulate_trial(spec, rng)
        results = analyze_cohort(cohort, spec.analysis_config(), covariates=cohort.covariate_names)
    except McfAucError as e:
        logger.warning(f"Replicate {index} failed: {type(e).__name__}: {e}")
        return ReplicateRecord(index=index, error=f"{type(e).__name__}: {e}")
    return ReplicateRecord(index=index, results=tuple(results))


def _summarize_cell(
    estimand: str,
    adjusted: bool,
    records: Sequence[ReplicateRecord],
    alpha: float,
) -> SummaryCell:
    def pick(flag: bool) -> List[InferenceResult]:
        return [
            next(r for r in record.results if r.estimand == estimand and r.adjusted == flag)
            for record in records
        ]

    reference = np.array([r.point for r in pick(False)])
    chosen = pick(adjusted)
    points = np.array([r.point for r in chosen])
    ses = np.array([r.se for r in chosen])
    lower = np.array([r.ci_lower for r in chosen])
    upper = np.array([r.ci_upper for r in chosen])
    z = np.array([r.z for r in chosen])
    reps = points.shape[0]

    est = float(reference.mean())
    target = np.exp(est) if estimand == "ratio" else est
    mc_sd = float(points.std(ddof=1)) if reps > 1 else 0.0
    return SummaryCell(
        estimand=estimand,
        analysis="adjusted" if adjusted else "unadjusted",
        est=est,
        est_se=float(reference.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0,
        bias=float(points.mean() - est),
        bias_se=mc_sd / float(np.sqrt(reps)),
        mean_se=float(ses.mean()),
        median_se=float(np.median(ses)),
        mc_sd=mc_sd,
        cp=float(100 * np.mean((lower <= target) & (target <= upper))),
        power=float(100 * np.mean(np.abs(z) > critical_value(alpha))),
        replicates=reps,
    )


def summarize(spec: ScenarioSpec, records: Sequence[ReplicateRecord]) -> SummaryTable:
    succeeded = [r for r in records if not r.failed]
    failures = [f"replicate {r.index}: {r.error}" for r in records if r.failed]
    cells = [
        _summarize_cell(estimand, adjusted, succeeded, spec.alpha)
        for estimand in ESTIMANDS
        for adjusted in (False, True)
    ]
    violations = sum(1 for record in succeeded for r in record.results if not efficiency_holds(r))
    if violations:
        logger.warning(f"{violations} adjusted result(s) reported a larger variance than the unadjusted analysis.")
    return SummaryTable(
        spec=spec,
        cells=cells,
        failures=failures,
        efficiency_violations=violations,
        records=list(records),
    )


def run_study(
    spec: ScenarioSpec,
    threads: int = 1,
    max_failure_rate: float = DEFAULT_MAX_FAILURE_RATE,
    on_replicate: Optional[Callable[[ReplicateRecord], None]] = None,
) -> SummaryTable:
    """
    Runs every replicate of the scenario and aggregates them.

    Replicate i always uses the stream derived from (base_seed, i), and
    results are collected in index order, so the table does not depend on
    the number of threads.

    Raises:
        StudyAbortedError: when more than max_failure_rate of the replicates fail.
    """
    work = partial(run_replicate, spec)
    indices = range(spec.replicates)
    records: List[ReplicateRecord] = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for record in pool.map(work, indices):
                records.append(record)
                if on_replicate:
                    on_replicate(record)
    else:
        for index in indices:
            record = work(index)
            records.append(record)
            if on_replicate:
                on_replicate(record)

    failures = [r for r in records if r.failed]
    if len(failures) > max_failure_rate * spec.replicates or len(failures) == len(records):
        messages = [f"replicate {r.index}: {r.error}" for r in failures]
        raise StudyAbortedError(
            f"{len(failures)} of {spec.replicates} replicates failed (first: {messages[0]})",
            failures=messages,
        )
    if failures:
        logger.warning(f"Excluded {len(failures)} failed replicate(s) from the summary.")
    return summarize(spec, records)


def power_curve(
    spec: ScenarioSpec,
    thetas: Sequence[float],
    threads: int = 1,
    max_failure_rate: float = DEFAULT_MAX_FAILURE_RATE,
    on_replicate: Optional[Callable[[ReplicateRecord], None]] = None,
) -> List[SummaryTable]:
    """One study per theta, sharing the scenario's seed."""
    return [
        run_study(
            dataclasses.replace(spec, theta=float(theta)),
            threads=threads,
            max_failure_rate=max_failure_rate,
            on_replicate=on_replicate,
        )
        for theta in thetas
    ]


def tables_to_frame(tables: Sequence[SummaryTable]) -> pd.DataFrame:
    return pd.concat([table.to_frame() for table in tables], ignore_index=True)
