"""Logging configuration for crsec."""

import json
import logging
import os
import threading
from pathlib import Path
from typing import Any, Dict, Optional

from rich.console import Console
from rich.logging import RichHandler

from .exceptions import StorageError

_loggers: Dict[str, logging.Logger] = {}
_console = Console(stderr=True)

VERBOSE_ENV = "CRS_VERBOSE"


def verbose_from_env(default: bool = False) -> bool:
    """Return the verbosity forced by CRS_VERBOSE, or the default."""
    value = os.environ.get(VERBOSE_ENV)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


def setup_logging(
    verbose: bool = False,
    debug: bool = False,
    log_file: Optional[Path] = None,
    json_format: bool = False,
) -> None:
    """Setup logging configuration for crsec."""
    verbose = verbose_from_env(verbose)

    if debug:
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    else:
        level = logging.WARNING

    root_logger = logging.getLogger()
    for handler in root_logger.handlers:
        handler.close()
    root_logger.handlers.clear()

    console_handler = RichHandler(
        console=_console,
        show_path=debug,
        show_time=True,
        rich_tracebacks=True,
        markup=False,
    )
    console_handler.setLevel(level)

    if json_format:
        console_formatter: logging.Formatter = JSONFormatter()
    else:
        console_formatter = logging.Formatter(fmt="%(message)s", datefmt="[%X]")

    console_handler.setFormatter(console_formatter)
    root_logger.addHandler(console_handler)

    if log_file:
        try:
            log_file.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file, mode="a", encoding="utf-8")
        except OSError as e:
            raise StorageError(f"Cannot open log file {log_file}: {e}") from e
        file_handler.setLevel(logging.DEBUG)

        file_formatter = JSONFormatter() if json_format else logging.Formatter(
            fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
        file_handler.setFormatter(file_formatter)
        root_logger.addHandler(file_handler)

    root_logger.setLevel(logging.DEBUG)

    # Numerical stack is quiet unless something is wrong
    logging.getLogger("numpy").setLevel(logging.WARNING)
    logging.getLogger("scipy").setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """Get or create a logger instance."""
    if name not in _loggers:
        _loggers[name] = logging.getLogger(name)
    return _loggers[name]


class JSONFormatter(logging.Formatter):
    """JSON log formatter for structured logging."""

    _reserved = {
        "name", "msg", "args", "levelname", "levelno", "pathname",
        "filename", "module", "lineno", "funcName", "created", "msecs",
        "relativeCreated", "thread", "threadName", "processName",
        "process", "getMessage", "exc_info", "exc_text", "stack_info",
        "taskName",
    }

    def format(self, record: logging.LogRecord) -> str:
        """Format log record as JSON."""
        log_data: Dict[str, Any] = {
            "timestamp": self.formatTime(record, self.datefmt),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        for key, value in record.__dict__.items():
            if key not in self._reserved:
                log_data[key] = value

        return json.dumps(log_data, default=str, ensure_ascii=False)


class ScaStatsLogger:
    """Counters for SCA runs, shared by the case workers of one solve."""

    def __init__(self, logger: logging.Logger):
        self.logger = logger
        self._lock = threading.Lock()
        self.stats: Dict[str, Any] = {
            "cases_solved": 0,
            "cases_skipped": 0,
            "cases_degraded": 0,
            "outer_iterations": 0,
            "solver_calls": 0,
            "restorations": 0,
            "solver_seconds": 0.0,
        }

    def log_solver_call(self, label: str, seconds: float, status: str) -> None:
        """Record one convex subproblem solve."""
        with self._lock:
            self.stats["solver_calls"] += 1
            self.stats["outer_iterations"] += 1
            self.stats["solver_seconds"] += seconds
        self.logger.debug(f"{label}: subproblem {status} in {1000 * seconds:.1f} ms")

    def log_restoration(self, label: str, steps: int) -> None:
        """Record a feasibility restoration run."""
        with self._lock:
            self.stats["restorations"] += 1
        self.logger.debug(f"{label}: restoration finished after {steps} steps")

    def log_case_solved(self, label: str, ssr: float, iterations: int) -> None:
        """Record a finished case."""
        with self._lock:
            self.stats["cases_solved"] += 1
        self.logger.debug(f"{label}: SSR {ssr:.6f} bits after {iterations} iterations")

    def log_case_skipped(self, label: str, reason: str) -> None:
        """Record a case skipped as infeasible."""
        with self._lock:
            self.stats["cases_skipped"] += 1
        self.logger.info(f"{label}: skipped ({reason})")

    def log_case_degraded(self, label: str, reason: str) -> None:
        """Record a case that stopped on a solver failure."""
        with self._lock:
            self.stats["cases_degraded"] += 1
        self.logger.warning(f"{label}: degraded ({reason})")

    def get_stats(self) -> Dict[str, Any]:
        """Get current statistics."""
        with self._lock:
            return self.stats.copy()
