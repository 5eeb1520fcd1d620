"""Monte-Carlo secrecy sum rate experiment over an SNR grid.

Every (snr, trial) cell draws its channel from (seed, trial) alone, so all schemes
and all SNR points of a trial see the same realization. Cells run on worker threads
behind an asyncio semaphore; records are sorted before writing, which keeps the
CSV independent of scheduling.
"""

import asyncio
import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..channel.model import ChannelSet, ChannelStats, generate_channel_set, power_budget_from_snr
from ..sca.driver import ScaConfig, Solution
from ..sca.schemes import SCHEME_ORDER, SchemeId, solve_scheme
from ..storage.channel_file import channel_fingerprint
from ..utils.exceptions import ConfigError, CrsecError, StorageError
from ..utils.logging import get_logger

logger = get_logger(__name__)

CSV_HEADER = ("snr_db", "scheme", "trial", "ssr_bits", "theta", "case", "iters", "solve_ms", "status")
SUMMARY_HEADER = ("snr_db", "scheme", "mean_ssr", "stderr", "trials")
DEFAULT_SNR_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = 100
    snr_grid_db: Tuple[float, ...] = DEFAULT_SNR_GRID
    n_t: int = 2
    stats: ChannelStats = field(default_factory=ChannelStats)
    schemes: Tuple[SchemeId, ...] = SCHEME_ORDER
    seed: int = 0
    epsilon: float = 1e-3
    output: Optional[Path] = None
    workers: int = 4
    warm_start: bool = True
    record_timing: bool = True
    sca: ScaConfig = field(default_factory=ScaConfig)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.snr_grid_db:
            raise ConfigError("snr_grid_db must not be empty")
        if not all(math.isfinite(s) for s in self.snr_grid_db):
            raise ConfigError("snr_grid_db values must be finite")
        if not self.schemes:
            raise ConfigError("schemes must not be empty")
        if self.n_t < 2:
            raise ConfigError(f"n_t must be >= 2, got {self.n_t}")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")

    def sca_config(self) -> ScaConfig:
        return replace(self.sca, epsilon=self.epsilon)

    def ordered_schemes(self) -> List[SchemeId]:
        return [s for s in SCHEME_ORDER if s in self.schemes]


@dataclass(frozen=True)
class TrialRecord:
    snr_db: float
    scheme: SchemeId
    trial: int
    ssr_bits: float
    theta: float
    case: str
    iters: int
    solve_ms: float
    status: str
    channel_fingerprint: str = ""

    def sort_key(self) -> Tuple[float, int, int]:
        return (self.snr_db, self.trial, SCHEME_ORDER.index(self.scheme))

    def row(self, record_timing: bool = True) -> List[str]:
        return [
            f"{self.snr_db:g}",
            self.scheme.value,
            str(self.trial),
            repr(float(self.ssr_bits)),
            repr(float(self.theta)),
            self.case,
            str(self.iters),
            f"{self.solve_ms:.3f}" if record_timing else "0",
            self.status,
        ]


@dataclass(frozen=True)
class SummaryRow:
    snr_db: float
    scheme: SchemeId
    mean_ssr: float
    stderr: float
    trials: int

    def row(self) -> List[str]:
        return [
            f"{self.snr_db:g}",
            self.scheme.value,
            repr(self.mean_ssr),
            repr(self.stderr),
            str(self.trials),
        ]


@dataclass
class MonteCarloReport:
    records: List[TrialRecord]
    summary: List[SummaryRow]
    csv_path: Optional[Path] = None
    summary_path: Optional[Path] = None

    def mean(self, snr_db: float, scheme: SchemeId) -> float:
        for row in self.summary:
            if row.snr_db == snr_db and row.scheme is scheme:
                return row.mean_ssr
        raise KeyError((snr_db, scheme))


def _record(snr_db: float, trial: int, scheme: SchemeId, sol: Solution, fingerprint: str) -> TrialRecord:
    return TrialRecord(
        snr_db=snr_db,
        scheme=scheme,
        trial=trial,
        ssr_bits=sol.ssr,
        theta=sol.design.theta,
        case=sol.case_id.label if sol.case_id else "none",
        iters=sol.iterations,
        solve_ms=sol.solver_ms,
        status=sol.status,
        channel_fingerprint=fingerprint,
    )


def solve_cell(cfg: MonteCarloConfig, cs: ChannelSet, snr_db: float, trial: int) -> List[TrialRecord]:
    """All schemes on one channel at one SNR; baselines first so CRS can warm-start."""
    pb = power_budget_from_snr(snr_db)
    sca = cfg.sca_config()
    fingerprint = channel_fingerprint(cs)
    logger.debug(f"snr={snr_db:g} trial={trial} channel={fingerprint}")

    solved: Dict[SchemeId, Solution] = {}
    records: List[TrialRecord] = []
    order = [s for s in cfg.ordered_schemes() if s is not SchemeId.CRS]
    if SchemeId.CRS in cfg.schemes:
        order.append(SchemeId.CRS)

    for scheme in order:
        warm = list(solved.values()) if scheme is SchemeId.CRS and cfg.warm_start else None
        try:
            sol = solve_scheme(scheme, cs, pb, sca, warm)
        except (CrsecError, np.linalg.LinAlgError, ValueError, ArithmeticError) as e:
            logger.warning(f"snr={snr_db:g} trial={trial} {scheme.value}: {type(e).__name__}: {e}")
            records.append(TrialRecord(snr_db, scheme, trial, 0.0, 1.0, "none", 0, 0.0, "degraded", fingerprint))
            continue
        solved[scheme] = sol
        records.append(_record(snr_db, trial, scheme, sol, fingerprint))
    return records


def summarize(records: Sequence[TrialRecord]) -> List[SummaryRow]:
    """Mean SSR and standard error per (snr, scheme)."""
    groups: Dict[Tuple[float, SchemeId], List[float]] = {}
    for rec in records:
        groups.setdefault((rec.snr_db, rec.scheme), []).append(rec.ssr_bits)

    rows = []
    for (snr, scheme), values in sorted(groups.items(), key=lambda kv: (kv[0][0], SCHEME_ORDER.index(kv[0][1]))):
        arr = np.array(values)
        stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        rows.append(SummaryRow(snr, scheme, float(arr.mean()), stderr, int(arr.size)))
    return rows


def summary_path_for(path: Path) -> Path:
    return path.with_name(f"{path.stem}.summary.csv")


def write_csv(records: Sequence[TrialRecord], path: Path, record_timing: bool = True) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for rec in records:
                writer.writerow(rec.row(record_timing))
    except OSError as e:
        raise StorageError(f"Failed to write results {path}: {e}") from e
    return path


def write_summary(rows: Sequence[SummaryRow], path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SUMMARY_HEADER)
            for row in rows:
                writer.writerow(row.row())
    except OSError as e:
        raise StorageError(f"Failed to write summary {path}: {e}") from e
    return path


async def run_montecarlo(
    cfg: MonteCarloConfig,
    on_cell: Optional[Callable[[float, int], None]] = None,
) -> MonteCarloReport:
    """Run the experiment and write the CSV and summary when ``cfg.output`` is set."""
    channels = {
        trial: generate_channel_set(cfg.seed, cfg.n_t, cfg.stats, trial=trial)
        for trial in range(cfg.trials)
    }
    semaphore = asyncio.Semaphore(cfg.workers)
    logger.info(
        f"Monte Carlo: {cfg.trials} trials x {len(cfg.snr_grid_db)} SNR points x "
        f"{len(cfg.schemes)} schemes on {cfg.workers} workers"
    )

    async def run_cell(snr_db: float, trial: int) -> List[TrialRecord]:
        async with semaphore:
            records = await asyncio.to_thread(solve_cell, cfg, channels[trial], snr_db, trial)
        if on_cell:
            on_cell(snr_db, trial)
        return records

    tasks = [run_cell(snr, trial) for snr in cfg.snr_grid_db for trial in range(cfg.trials)]
    cells = await asyncio.gather(*tasks)

    records = sorted((rec for cell in cells for rec in cell), key=TrialRecord.sort_key)
    report = MonteCarloReport(records=records, summary=summarize(records))

    if cfg.output is not None:
        out = Path(cfg.output)
        report.csv_path = write_csv(records, out, cfg.record_timing)
        report.summary_path = write_summary(report.summary, summary_path_for(out))
        logger.info(f"Wrote {len(records)} records -> {out}")
    return report
