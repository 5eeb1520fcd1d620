"""CLI command implementations for crsec."""

import dataclasses
from pathlib import Path
from typing import Any, Dict, List, Optional

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from ..bench.checks import CheckResult, run_checks
from ..bench.montecarlo import MonteCarloReport, run_montecarlo
from ..channel.model import ChannelStats, PowerBudget, generate_channel_set
from ..sca.driver import Solution
from ..sca.schemes import SCHEME_ORDER, SchemeId, solve_scheme
from ..storage.channel_file import channel_fingerprint, file_fingerprint, load_channel_set, save_channel_set
from ..storage.solution_file import save_solution
from ..utils.logging import get_logger
from .config import build_montecarlo_config, build_sca_config

console = Console()
logger = get_logger(__name__)


def solve_command(
    config: Dict[str, Any],
    channels: Path,
    p_t: float,
    p_r: Optional[float],
    scheme: SchemeId,
    out: Optional[Path],
) -> Solution:
    """Solve one scheme on one channel file; CRS warm-starts from every baseline."""
    cs = load_channel_set(channels)
    fingerprint = file_fingerprint(channels)
    pb = PowerBudget(p_t=p_t, p_r=p_r if p_r is not None else p_t)
    sca = build_sca_config(config)
    logger.info(f"Solving {scheme.value} on channel {fingerprint} (P_T={pb.p_t:g}, P_R={pb.p_r:g})")

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=console,
        transient=True,
    ) as progress:
        warm: List[Solution] = []
        if scheme is SchemeId.CRS:
            for baseline in SCHEME_ORDER[1:]:
                task = progress.add_task(f"Solving {baseline.value} baseline...", total=None)
                warm.append(solve_scheme(baseline, cs, pb, sca))
                progress.remove_task(task)
        task = progress.add_task(f"Solving {scheme.value}...", total=None)
        solution = dataclasses.replace(solve_scheme(scheme, cs, pb, sca, warm), channel_fingerprint=fingerprint)
        progress.update(task, description="Solve completed!")

    _display_solution(solution)
    if out is not None:
        save_solution(solution, out)
        console.print(f"\n[bold]Solution written to:[/bold] {out}")
    return solution


async def montecarlo_command(config: Dict[str, Any]) -> MonteCarloReport:
    """Run the Monte-Carlo experiment with a progress bar."""
    cfg = build_montecarlo_config(config)
    total = cfg.trials * len(cfg.snr_grid_db)

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        console=console,
    ) as progress:
        task = progress.add_task("Running trials...", total=total)
        report = await run_montecarlo(cfg, on_cell=lambda snr, trial: progress.advance(task))
        progress.update(task, description="Monte Carlo completed!")

    _display_summary(report)
    if report.csv_path is not None:
        console.print(f"\n[bold]Records:[/bold] {report.csv_path}")
        console.print(f"[bold]Summary:[/bold] {report.summary_path}")
    return report


def gen_channels_command(seed: int, n_t: int, stats: ChannelStats, out: Path, trial: int = 0) -> Path:
    """Draw one channel realization and save it."""
    cs = generate_channel_set(seed, n_t, stats, trial=trial)
    save_channel_set(cs, out)
    console.print(f"[green]Channel {channel_fingerprint(cs)} written to {out}[/green]")
    return out


def check_command(include_audit: bool = False) -> bool:
    """Run the invariant suites; True when all pass."""
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=console,
        transient=True,
    ) as progress:
        progress.add_task("Running invariant suites...", total=None)
        results = run_checks(include_audit)
    _display_checks(results)
    return all(r.passed for r in results)


def _display_solution(solution: Solution) -> None:
    """Display a solution in a formatted table."""
    table = Table(title=f"{solution.scheme} Solution", show_header=True, header_style="bold magenta")
    table.add_column("Metric", style="cyan", no_wrap=True)
    table.add_column("Value", justify="right", style="green")

    rates = solution.rates
    table.add_row("Secrecy Sum Rate", f"{solution.ssr:.6f} bits/use")
    table.add_row("Case", solution.case_id.label if solution.case_id else "none")
    table.add_row("Status", solution.status)
    table.add_row("Theta", f"{solution.design.theta:.6f}")
    table.add_row("Transmit Power", f"{solution.design.power():.4f} / {solution.budget.p_t:g}")
    table.add_row("Common Secrecy", f"{rates.r_c_sec:.6f}")
    table.add_row("Private 1 Secrecy", f"{rates.r_p1_sec:.6f}")
    table.add_row("Private 2 Secrecy", f"{rates.r_p2_sec:.6f}")
    table.add_row("Outer Iterations", str(solution.iterations))
    table.add_row("Solver Time", _format_duration(solution.solver_ms / 1000.0))

    console.print("\n")
    console.print(table)


def _display_summary(report: MonteCarloReport) -> None:
    """Display mean SSR per SNR and scheme."""
    schemes = [s for s in SCHEME_ORDER if any(r.scheme is s for r in report.summary)]
    table = Table(title="Mean Secrecy Sum Rate (bits/use)", show_header=True, header_style="bold magenta")
    table.add_column("SNR (dB)", style="cyan", justify="right")
    for scheme in schemes:
        table.add_column(scheme.value, justify="right", style="green")

    for snr in sorted({r.snr_db for r in report.summary}):
        cells = []
        for scheme in schemes:
            row = next((r for r in report.summary if r.snr_db == snr and r.scheme is scheme), None)
            cells.append(f"{row.mean_ssr:.3f} ± {row.stderr:.3f}" if row else "-")
        table.add_row(f"{snr:g}", *cells)

    console.print("\n")
    console.print(table)


def _display_checks(results: List[CheckResult]) -> None:
    table = Table(title="Invariant Checks", show_header=True, header_style="bold magenta")
    table.add_column("Suite", style="cyan", no_wrap=True)
    table.add_column("Result", justify="center")
    table.add_column("Detail")
    table.add_column("Time", justify="right")
    for r in results:
        verdict = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(r.name, verdict, r.detail, _format_duration(r.seconds))
    console.print(table)


def _format_duration(seconds: float) -> str:
    """Format duration in human readable format."""
    if seconds < 1:
        return f"{1000 * seconds:.1f}ms"
    if seconds < 60:
        return f"{seconds:.1f}s"
    minutes = int(seconds // 60)
    return f"{minutes}m {seconds - 60 * minutes:.0f}s"
