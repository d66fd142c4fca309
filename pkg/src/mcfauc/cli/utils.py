import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import click
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler

from ..model.errors import (
    AnalysisConfigError,
    CohortValidationError,
    ConfigurationError,
    DegenerateEstimateError,
    HorizonError,
    ScenarioError,
    SingularCovariatesError,
    StudyAbortedError,
)
from ..utils.numbers import round_record, round_value

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

_EXIT_CODES = (
    ((ScenarioError, AnalysisConfigError, ConfigurationError), EXIT_USAGE),
    ((CohortValidationError, OSError), EXIT_DATA),
    ((HorizonError, DegenerateEstimateError, SingularCovariatesError, StudyAbortedError), EXIT_NUMERICAL),
)


def exit_code_for(error: BaseException) -> int:
    """
    Exit class of an error: 1 for usage, 2 for input data and file access,
    3 for numerical failures and anything else raised while computing.
    """
    if isinstance(error, click.ClickException):
        return EXIT_USAGE
    for classes, code in _EXIT_CODES:
        if isinstance(error, classes):
            return code
    return EXIT_NUMERICAL


def error_line(error: BaseException, code: int) -> str:
    """error[<code>] <ExceptionName>: <message>, on one line."""
    message = error.format_message() if isinstance(error, click.ClickException) else str(error)
    message = " ".join(message.split())
    return f"error[{code}] {type(error).__name__}: {message}"


def stderr_console() -> Console:
    return Console(stderr=True)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=stderr_console(), show_path=False)],
        force=True,
    )


def parse_names(text: Optional[str]) -> Optional[List[str]]:
    """Splits a comma-separated list of names, dropping blanks."""
    if text is None:
        return None
    names = [part.strip() for part in text.split(",") if part.strip()]
    if not names:
        raise click.BadParameter("expected a comma-separated list of names", param_hint="--covariates")
    return names


def render_json(payload: Dict[str, Any], digits: Optional[int]) -> str:
    def walk(value: Any) -> Any:
        if isinstance(value, dict):
            return {k: walk(v) for k, v in value.items()}
        if isinstance(value, list):
            return [walk(v) for v in value]
        return round_value(value, digits)

    return json.dumps(walk(payload), indent=2) + "\n"


def render_csv(rows: List[Dict[str, Any]], digits: Optional[int]) -> str:
    frame = pd.DataFrame([round_record(row, digits) for row in rows])
    return frame.to_csv(index=False)


def write_output(text: str, output: Union[str, Path]) -> None:
    """Writes results to the path, or to stdout for '-'."""
    if str(output) == "-":
        click.echo(text, nl=False)
        return
    with open(output, "w", encoding="utf-8", newline="") as f:
        f.write(text)
