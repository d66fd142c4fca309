import logging
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from ...estimators.arm import auc_ratio_curve
from ...inference.analysis import ArmFit, analyze_cohort, fit_arms
from ...model.cohort import AnalysisConfig, Cohort
from ...model.const import CONTROL, TREATED
from ...model.ingest import ingest_cohort
from ..config import Configuration
from ..utils import parse_names, render_csv, render_json, write_output

logger = logging.getLogger(__name__)


def _curve_frame(fits: Dict[int, ArmFit], tau: float) -> pd.DataFrame:
    frames = []
    for arm, fit in fits.items():
        for name, step in (("survival", fit.estimators.survival), ("mcf", fit.estimators.mcf)):
            frame = step.to_frame()
            frame.insert(0, "arm", arm)
            frame.insert(0, "curve", name)
            frames.append(frame)
    jumps = np.concatenate([fit.estimators.mcf.jump_times for fit in fits.values()])
    grid = np.unique(np.concatenate((jumps[jumps <= tau], [tau])))
    ratio = pd.DataFrame(
        {
            "curve": "auc_ratio",
            "arm": None,
            "time": grid,
            "value": auc_ratio_curve(fits[TREATED].estimators, fits[CONTROL].estimators, grid),
        }
    )
    return pd.concat(frames + [ratio], ignore_index=True)


def _influence_frame(cohort: Cohort, fits: Dict[int, ArmFit]) -> pd.DataFrame:
    frames = [
        fit.influence.to_frame(ids=[r.id for r in cohort.records(arm)])
        for arm, fit in fits.items()
    ]
    return pd.concat(frames, ignore_index=True)


def analyze_files(
    configuration: Configuration,
    subjects: Path,
    events: Path,
    tau: float,
    covariates: Optional[str] = None,
    alpha: Optional[float] = None,
    estimand: str = "both",
    endpoint: str = "auc",
    followup_limit: Optional[float] = None,
    output_format: Optional[str] = None,
    output: str = "-",
    digits: Optional[int] = None,
    curves: Optional[Path] = None,
    dump_influence: Optional[Path] = None,
) -> None:
    """Runs the analysis of one cohort and writes the results."""
    config = AnalysisConfig(
        tau=tau,
        alpha=alpha if alpha is not None else configuration.alpha,
        estimand=estimand,
        endpoint=endpoint,
        followup_limit=followup_limit,
    )
    output_format = output_format or configuration.output_format
    digits = digits if digits is not None else configuration.digits
    names: Optional[List[str]] = parse_names(covariates)

    cohort = ingest_cohort(subjects, events)
    logger.info(f"Loaded {cohort.n} subjects (n0={cohort.n0}, n1={cohort.n1}, p={cohort.p}).")
    results = analyze_cohort(cohort, config, names)

    if curves or dump_influence:
        fits = fit_arms(cohort, config)
        if curves:
            _curve_frame(fits, config.tau).to_csv(curves, index=False)
            logger.info(f"Wrote step-function curves to {curves}.")
        if dump_influence:
            _influence_frame(cohort, fits).to_csv(dump_influence, index=False)
            logger.info(f"Wrote influence values to {dump_influence}.")

    rows = [r.to_dict() for r in results]
    if output_format == "csv":
        text = render_csv(rows, digits)
    else:
        payload = {
            "config": {
                "subjects": str(subjects),
                "events": str(events),
                "tau": config.tau,
                "alpha": config.alpha,
                "estimand": config.estimand,
                "endpoint": config.endpoint,
                "covariates": names or [],
                "followup_limit": config.followup_limit,
            },
            "results": rows,
        }
        text = render_json(payload, digits)
    write_output(text, output)
