import logging
from pathlib import Path
from typing import Any, List, Optional

import pandas as pd
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from ...model.errors import ScenarioError
from ...simulation.scenario import ScenarioSpec, load_scenario
from ...simulation.study import SummaryTable, power_curve, run_study, tables_to_frame
from ...utils.numbers import parse_float_list
from ..config import Configuration
from ..utils import render_csv, render_json, stderr_console, write_output

logger = logging.getLogger(__name__)


def _progress() -> Progress:
    return Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=stderr_console(),
        transient=True,
    )


def simulate_study(
    configuration: Configuration,
    scenario: Optional[Path] = None,
    threads: Optional[int] = None,
    dump_replicates: Optional[Path] = None,
    output_format: Optional[str] = None,
    output: str = "-",
    digits: Optional[int] = None,
    power_grid: Optional[str] = None,
    **overrides: Any,
) -> None:
    """
    Runs a simulation study. Scenario values come from the built-in defaults,
    then the scenario file, then the explicit flags in `overrides`.
    """
    if scenario:
        spec = load_scenario(scenario)
    else:
        spec = ScenarioSpec(alpha=configuration.alpha, block_size=configuration.block_size)
    spec = spec.with_overrides(**overrides)
    try:
        thetas = parse_float_list(power_grid) if power_grid else list(spec.thetas)
    except ValueError as e:
        raise ScenarioError(f"--power-grid: {e}") from e
    threads = threads or configuration.threads
    output_format = output_format or configuration.output_format
    digits = digits if digits is not None else configuration.digits

    logger.info(
        f"Simulating {spec.endpoint} case {spec.case} ({spec.scheme}, n={spec.n}) "
        f"with {spec.replicates} replicates on {threads} thread(s)."
    )
    studies = len(thetas) if thetas else 1
    with _progress() as progress:
        task = progress.add_task("replicates", total=spec.replicates * studies)

        def advance(_record) -> None:
            progress.advance(task)

        if thetas:
            tables: List[SummaryTable] = power_curve(
                spec, thetas, threads, configuration.max_failure_rate, on_replicate=advance
            )
        else:
            tables = [run_study(spec, threads, configuration.max_failure_rate, on_replicate=advance)]

    if dump_replicates:
        frames = []
        for table in tables:
            frame = table.replicate_frame()
            frame.insert(0, "theta", table.spec.theta)
            frames.append(frame)
        pd.concat(frames, ignore_index=True).to_csv(dump_replicates, index=False)
        logger.info(f"Wrote per-replicate results to {dump_replicates}.")

    if output_format == "csv":
        text = render_csv(tables_to_frame(tables).to_dict(orient="records"), digits)
    elif len(tables) == 1:
        text = render_json(tables[0].to_dict(), digits)
    else:
        text = render_json({"power_curve": [table.to_dict() for table in tables]}, digits)
    write_output(text, output)
