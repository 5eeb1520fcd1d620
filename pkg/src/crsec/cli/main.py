"""Main CLI interface for crsec."""

import asyncio
import sys
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import click
import typer
from rich.console import Console
from rich.table import Table

from ..channel.model import ChannelStats
from ..sca.schemes import SchemeId
from ..utils.exceptions import CrsecError
from ..utils.logging import setup_logging
from .commands import check_command, gen_channels_command, montecarlo_command, solve_command
from .config import load_config, save_example_config

app = typer.Typer(
    name="crsec",
    help="Secrecy sum rate optimization for cooperative rate-splitting",
    rich_markup_mode="rich",
    no_args_is_help=True,
)
console = Console(stderr=True)


class SchemeChoice(str, Enum):
    crs = "crs"
    nrs = "nrs"
    mulp = "mulp"
    cnoma = "cnoma"


ConfigOption = typer.Option(None, "--config", "-c", help="Configuration file path")
VerboseOption = typer.Option(False, "--verbose", "-v", help="Enable verbose logging (or set CRS_VERBOSE=1)")
DebugOption = typer.Option(False, "--debug", help="Enable debug logging")
LogFileOption = typer.Option(None, "--log-file", help="Also write the full debug log to this file")
JsonLogsOption = typer.Option(False, "--json-logs", help="Emit log records as JSON lines")


def _fail(e: Exception, debug: bool) -> None:
    console.print(f"[red]Error: {e}[/red]")
    if debug:
        console.print_exception()
    raise typer.Exit(1)


@app.command()
def solve(
    channels: Path = typer.Option(..., "--channels", help="Channel file (JSON)"),
    pt: float = typer.Option(..., "--pt", help="Transmit power budget P_T (linear)"),
    pr: Optional[float] = typer.Option(None, "--pr", help="Relay power P_R (defaults to P_T)"),
    eps: Optional[float] = typer.Option(None, "--eps", help="SCA convergence tolerance"),
    scheme: SchemeChoice = typer.Option(
        SchemeChoice.crs, "--scheme", case_sensitive=False, help="Transmission scheme"
    ),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Solution file to write"),
    config: Optional[Path] = ConfigOption,
    verbose: bool = VerboseOption,
    debug: bool = DebugOption,
    log_file: Optional[Path] = LogFileOption,
    json_logs: bool = JsonLogsOption,
):
    """Maximize the secrecy sum rate of one scheme on one channel."""
    try:
        setup_logging(verbose=verbose, debug=debug, log_file=log_file, json_format=json_logs)
        cfg = load_config(config_file=config, eps=eps)
        solve_command(cfg, channels, pt, pr, SchemeId.parse(scheme.value), out)
    except CrsecError as e:
        _fail(e, debug)
    except KeyboardInterrupt:
        console.print("\n[yellow]Solve interrupted by user[/yellow]")
        raise typer.Exit(130)


@app.command()
def montecarlo(
    trials: Optional[int] = typer.Option(None, "--trials", help="Channel realizations per SNR point"),
    snr: Optional[str] = typer.Option(None, "--snr", help='SNR grid in dB, "start:step:stop" or a comma list'),
    nt: Optional[int] = typer.Option(None, "--nt", help="Transmit antennas"),
    sigma_h1: Optional[float] = typer.Option(None, "--sigma-h1", help="Variance of the S->U1 channel"),
    sigma_h2: Optional[float] = typer.Option(None, "--sigma-h2", help="Variance of the S->U2 channel"),
    schemes: Optional[str] = typer.Option(None, "--schemes", help="Comma list of schemes"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    eps: Optional[float] = typer.Option(None, "--eps", help="SCA convergence tolerance"),
    workers: Optional[int] = typer.Option(None, "--workers", help="Concurrent trial workers"),
    warm_start: Optional[bool] = typer.Option(
        None, "--warm-start/--no-warm-start", help="Warm-start CRS from the baselines"
    ),
    record_timing: Optional[bool] = typer.Option(
        None, "--record-timing/--no-record-timing", help="Write solver time (off gives byte-stable CSV)"
    ),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="CSV file to write"),
    config: Optional[Path] = ConfigOption,
    verbose: bool = VerboseOption,
    debug: bool = DebugOption,
    log_file: Optional[Path] = LogFileOption,
    json_logs: bool = JsonLogsOption,
):
    """Average secrecy sum rate versus SNR over random channels."""
    try:
        setup_logging(verbose=verbose, debug=debug, log_file=log_file, json_format=json_logs)
        cfg = load_config(
            config_file=config,
            trials=trials,
            snr=snr,
            nt=nt,
            sigma_h1=sigma_h1,
            sigma_h2=sigma_h2,
            schemes=schemes,
            seed=seed,
            eps=eps,
            workers=workers,
            warm_start=warm_start,
            record_timing=record_timing,
            out=out,
        )
        asyncio.run(montecarlo_command(cfg))
    except CrsecError as e:
        _fail(e, debug)
    except KeyboardInterrupt:
        console.print("\n[yellow]Monte Carlo interrupted by user[/yellow]")
        raise typer.Exit(130)


@app.command("gen-channels")
def gen_channels(
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed (default 0)"),
    nt: Optional[int] = typer.Option(None, "--nt", help="Transmit antennas (default 2)"),
    trial: int = typer.Option(0, "--trial", help="Trial index within the seed"),
    sigma_h1: Optional[float] = typer.Option(None, "--sigma-h1", help="Variance of the S->U1 channel"),
    sigma_h2: Optional[float] = typer.Option(None, "--sigma-h2", help="Variance of the S->U2 channel"),
    out: Path = typer.Option(..., "--out", "-o", help="Channel file to write"),
    config: Optional[Path] = ConfigOption,
    verbose: bool = VerboseOption,
    debug: bool = DebugOption,
    log_file: Optional[Path] = LogFileOption,
    json_logs: bool = JsonLogsOption,
):
    """Draw a Rayleigh channel realization and save it as JSON."""
    try:
        setup_logging(verbose=verbose, debug=debug, log_file=log_file, json_format=json_logs)
        cfg = load_config(config_file=config, seed=seed, nt=nt, sigma_h1=sigma_h1, sigma_h2=sigma_h2)
        mc = cfg["montecarlo"]
        stats = ChannelStats(
            h1=mc["sigma_h1"], h2=mc["sigma_h2"], g1=mc["sigma_g1"], h3=mc["sigma_h3"], g2=mc["sigma_g2"]
        )
        gen_channels_command(int(mc["seed"]), int(mc["n_t"]), stats, out, trial=trial)
    except CrsecError as e:
        _fail(e, debug)


@app.command()
def check(
    global_audit: bool = typer.Option(
        False, "--global-audit", help="Also compare CRS against a restricted design grid (slow)"
    ),
    verbose: bool = VerboseOption,
    debug: bool = DebugOption,
    log_file: Optional[Path] = LogFileOption,
    json_logs: bool = JsonLogsOption,
):
    """Run the surrogate, gradient and solver invariant suites."""
    try:
        setup_logging(verbose=verbose, debug=debug, log_file=log_file, json_format=json_logs)
    except CrsecError as e:
        _fail(e, debug)
    if not check_command(global_audit):
        raise typer.Exit(1)


@app.command("init-config")
def init_config(
    out: Path = typer.Option(Path("crsec.yaml"), "--out", "-o", help="Where to write the example configuration"),
    force: bool = typer.Option(False, "--force", help="Overwrite an existing file"),
):
    """Write a commented example configuration file."""
    if out.exists() and not force:
        console.print(f"[red]Error: {out} already exists (use --force to overwrite)[/red]")
        raise typer.Exit(1)
    try:
        save_example_config(out)
    except CrsecError as e:
        _fail(e, False)
    console.print(f"[green]Example configuration written to {out}[/green]")


@app.command()
def version():
    """Show version information."""
    from .. import __author__, __version__

    table = Table(show_header=False, box=None)
    table.add_column(style="bold cyan")
    table.add_column()

    table.add_row("crsec", f"v{__version__}")
    table.add_row("Author", __author__)
    table.add_row("Python", "3.11+")

    Console().print(table)


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code: 0 ok, 1 runtime failure, 2 usage error."""
    try:
        rv = app(args=list(argv) if argv is not None else None, standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return 2
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        return 130
    return rv if isinstance(rv, int) else 0


def run() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    run()
