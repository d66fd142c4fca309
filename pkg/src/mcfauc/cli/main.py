import logging
import sys
from pathlib import Path
from typing import Optional

import click

from ..model.errors import McfAucError
from . import handlers
from .config import LOG_LEVELS, get_default_config_path, load_config
from .utils import EXIT_OK, configure_logging, error_line, exit_code_for

logger = logging.getLogger(__name__)


class ExitCodeGroup(click.Group):
    """
    Maps every failure to one exit code and a single `error[<code>] ...` line
    on stderr: 1 for usage, 2 for input data and file access, 3 for numerical
    problems and any other error raised while computing.
    """

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        if not standalone_mode:
            return super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.exceptions.Abort as e:
            click.echo(error_line(e, 1), err=True)
            sys.exit(1)
        except Exception as e:
            if not isinstance(e, (McfAucError, click.ClickException, OSError)):
                logger.debug("Unexpected error", exc_info=True)
            code = exit_code_for(e)
            click.echo(error_line(e, code), err=True)
            sys.exit(code)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


@click.group(cls=ExitCodeGroup)
@click.option(
    "--config",
    "config_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Path to the mcfctl config file.",
)
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Logging verbosity on stderr (defaults to the config file, then WARNING).",
)
@click.pass_context
def main(ctx, config_path: Optional[Path], log_level: Optional[str]) -> None:
    """Covariate-adjusted inference for the area under the mean cumulative function."""
    ctx.ensure_object(dict)
    configuration = load_config(config_path if config_path else get_default_config_path())
    configure_logging(log_level or configuration.log_level)
    ctx.obj["CONFIG"] = configuration


@main.command(help="Analyze a two-arm cohort.")
@click.option("--subjects", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True, help="Subjects table: id,arm,followup,terminal[,x1..xp].")
@click.option("--events", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True, help="Recurrent events table: id,time.")
@click.option("--tau", type=float, required=True, help="Horizon of the area.")
@click.option("--covariates", type=str, default=None, help="Comma-separated covariate columns to adjust for.")
@click.option("--alpha", type=float, default=None, help="Significance level (default 0.05).")
@click.option("--estimand", type=click.Choice(["difference", "ratio", "both"]), default="both", show_default=True)
@click.option("--endpoint", type=click.Choice(["auc", "rmst"]), default="auc", show_default=True)
@click.option("--followup-limit", type=float, default=None, help="Planned maximum follow-up; horizons up to it are accepted.")
@click.option("--format", "output_format", type=click.Choice(["json", "csv"]), default=None, help="Output format (default json).")
@click.option("--output", type=str, default="-", show_default=True, help="Output path, '-' for stdout.")
@click.option("--digits", type=click.IntRange(min=0), default=None, help="Round reported numbers to this many decimals.")
@click.option("--curves", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write survival, MCF and AUC-ratio curves as CSV.")
@click.option("--dump-influence", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write per-subject influence values as CSV.")
@click.pass_context
def analyze(
    ctx,
    subjects: Path,
    events: Path,
    tau: float,
    covariates: Optional[str],
    alpha: Optional[float],
    estimand: str,
    endpoint: str,
    followup_limit: Optional[float],
    output_format: Optional[str],
    output: str,
    digits: Optional[int],
    curves: Optional[Path],
    dump_influence: Optional[Path],
) -> None:
    """Analyze a two-arm cohort."""
    handlers.analyze_files(
        configuration=ctx.obj["CONFIG"],
        subjects=subjects,
        events=events,
        tau=tau,
        covariates=covariates,
        alpha=alpha,
        estimand=estimand,
        endpoint=endpoint,
        followup_limit=followup_limit,
        output_format=output_format,
        output=output,
        digits=digits,
        curves=curves,
        dump_influence=dump_influence,
    )


@main.command(help="Run a replicated simulation study.")
@click.option("--scenario", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="YAML scenario file; flags override its values.")
@click.option("--endpoint", type=click.Choice(["auc", "rmst"]), default=None)
@click.option("--case", "case", type=int, default=None, help="Design case (1-5 for auc, 1-2 for rmst).")
@click.option("--theta", type=float, default=None, help="Treatment effect parameter.")
@click.option("--n", "n", type=int, default=None, help="Subjects per trial.")
@click.option("--scheme", type=click.Choice(["simple", "spb"]), default=None)
@click.option("--reps", "replicates", type=int, default=None, help="Number of replicates.")
@click.option("--seed", "base_seed", type=int, default=None, help="Base seed of the replicate streams.")
@click.option("--tau", type=float, default=None, help="Horizon (default 2 for auc, 5 for rmst).")
@click.option("--alpha", type=float, default=None)
@click.option("--block-size", type=int, default=None, help="Permuted block size for spb.")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker threads for replicates.")
@click.option("--power-grid", type=str, default=None, help="Comma-separated theta values; one summary per value.")
@click.option("--dump-replicates", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write per-replicate results as CSV.")
@click.option("--format", "output_format", type=click.Choice(["json", "csv"]), default=None)
@click.option("--output", type=str, default="-", show_default=True)
@click.option("--digits", type=click.IntRange(min=0), default=None)
@click.pass_context
def simulate(
    ctx,
    scenario: Optional[Path],
    threads: Optional[int],
    power_grid: Optional[str],
    dump_replicates: Optional[Path],
    output_format: Optional[str],
    output: str,
    digits: Optional[int],
    **overrides,
) -> None:
    """Run a replicated simulation study."""
    handlers.simulate_study(
        configuration=ctx.obj["CONFIG"],
        scenario=scenario,
        threads=threads,
        dump_replicates=dump_replicates,
        output_format=output_format,
        output=output,
        digits=digits,
        power_grid=power_grid,
        **overrides,
    )


if __name__ == "__main__":
    main()
