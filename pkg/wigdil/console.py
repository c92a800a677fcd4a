import os
import sys
import typer
import warnings
import functools

from typing import Optional
from pathlib import Path

from wigdil.log import WigDilLogger
from wigdil.display import format_deviation_table
from wigdil.functions import resolve_threads
from wigdil.parse_config import Params, read_scenario
from wigdil.scenario import (
    run_scenario,
    fig1_preset,
    write_csv,
    check_scenario
)
from wigdil.constants import CONFIG_ENV

from wigdil import (
    __version__,
    WigDilError,
    WigDilWarning,
    InvalidPath
)

app_main = typer.Typer(add_completion = False)

## parse package config; stdout is reserved for data, so nothing is printed when unset
CONFIG = os.environ.get(CONFIG_ENV) or None
try:
    params = Params(CONFIG)
except InvalidPath as e:
    warnings.warn(f"{e.message} Running without package config.", WigDilWarning)
    params = Params(None)

logger = WigDilLogger()

## argument parsing functions
def positive_callback(val):
    """
    Callback that checks if float or integer value is greater than zero.

    Raises
    ------
    typer.BadParameter
        If value is not positive
    """
    if val is None or val > 0:
        return val
    else:
        raise typer.BadParameter( f"Invalid value: {val}. Positive value required." )

def non_negative_callback(val):
    """
    Callback that checks if float or integer value is greater than or equal to zero.

    Raises
    ------
    typer.BadParameter
        If value is negative
    """
    if val is None or val >= 0:
        return val
    else:
        raise typer.BadParameter( f"Invalid value: {val}. Non-negative value required." )

def version_callback(val: bool):
    if val:
        typer.echo(f"wigdil {__version__}")
        raise typer.Exit()

def exit_on_error(f):
    '''
    Print WigDilError messages to stderr and exit with the error's code
    (2 config, 3 physics, 4 invariant violation).
    '''
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except WigDilError as e:
            e.print_message()
            logger.fplain(f"{e.prefix}: {e.message}")
            raise typer.Exit(code = e.exit_code)
    return wrapper

def setup(quiet: bool, log: Optional[Path], threads: Optional[int], verb: str) -> int:
    logger.quiet(quiet)
    if log is not None:
        logger.update_filename(str(log))
    logger.args(["raw", sys.argv])
    threads = resolve_threads(threads)
    logger.header(verb)
    logger.args(["threads", [params.threads.format_log(threads)]])
    return threads

def emit(result, output: Optional[Path]):
    if output is None:
        write_csv(result, sys.stdout)
    else:
        with open(output, 'w', encoding = "utf-8", newline = '') as f:
            write_csv(result, f)
        logger.info(f"Table written to {output}")
    return

@app_main.callback()
def main(version: Optional[bool] = typer.Option(None, *params.version.names, callback = version_callback,
                                                is_eager = True, help = "print version and exit")):
    """
    Wigner-entropy production of a bosonic mode under an exact dilation.
    """
    return

@app_main.command("run")
@exit_on_error
def run(config: Path = typer.Argument(..., help = params.config.help()),
        output: Optional[Path] = typer.Option(*params.output(), **params.output.options),
        threads: Optional[int] = typer.Option(*params.threads(), **params.threads.options,
                                              callback = non_negative_callback),
        quiet: bool = typer.Option(*params.quiet(), **params.quiet.options),
        log: Optional[Path] = typer.Option(*params.log(), **params.log.options)):
    """
    Run a scenario and write its CSV table.
    """
    threads = setup(quiet, log, threads, "run")
    s = read_scenario(str(config), params = params)
    logger.args(["scenario", [f"\n{s.describe()}"]])
    result = run_scenario(s, threads = threads, quiet = quiet)
    emit(result, output if output is not None else s.output.path)
    logger.plain(result.witnesses.summary())
    return

@app_main.command("fig1")
@exit_on_error
def fig1(N: float = typer.Option(*params.N(), **params.N.options, callback = non_negative_callback),
         n_points: int = typer.Option(*params.n_points(), **params.n_points.options,
                                      callback = positive_callback),
         ancilla: bool = typer.Option(*params.ancilla(), **params.ancilla.options),
         output: Optional[Path] = typer.Option(*params.output(), **params.output.options),
         threads: Optional[int] = typer.Option(*params.threads(), **params.threads.options,
                                               callback = non_negative_callback),
         quiet: bool = typer.Option(*params.quiet(), **params.quiet.options),
         log: Optional[Path] = typer.Option(*params.log(), **params.log.options)):
    """
    Thermal state in a TIM bath (κ = 1, κt up to 4): the three-term decomposition with integrated columns.
    """
    threads = setup(quiet, log, threads, "fig1")
    logger.args(["fig1", [params.N.format_log(N), params.n_points.format_log(n_points)]])
    result = run_scenario(fig1_preset(N, n_points = n_points, ancilla = ancilla), threads = threads, quiet = quiet)
    emit(result, output)
    return

@app_main.command("check")
@exit_on_error
def check(config: Path = typer.Argument(..., help = params.config.help()),
          threads: Optional[int] = typer.Option(*params.threads(), **params.threads.options,
                                                callback = non_negative_callback),
          quiet: bool = typer.Option(*params.quiet(), **params.quiet.options),
          log: Optional[Path] = typer.Option(*params.log(), **params.log.options)):
    """
    Run the identity and oracle suite on a scenario and print the maximum deviations.
    """
    threads = setup(quiet, log, threads, "check")
    s = read_scenario(str(config), params = params)
    logger.args(["scenario", [f"\n{s.describe()}"]])
    report = check_scenario(s, threads = threads, quiet = quiet)
    format_deviation_table(report.rows(), file = sys.stdout)
    if report.relation is not None:
        print(f"ancilla relation at t = {report.relation.t:.6g}:"
              f" prefactor signs {'consistent' if report.relation.prefactor_signs_ok else 'inconsistent'}",
              file = sys.stdout)
    for kind, t in report.misaligned:
        logger.warning(f"{kind} witness event at t = {t:.6g} lies outside every Γ-negative interval")
    logger.plain(report.witnesses.summary())
    report.raise_on_failure()
    return

def app():
    try:
        app_main()
    except SystemExit as e:
        logger.close()
        if e.code != 0: ## click exits with 0 upon success; catch and ignore
            raise e
    return
