"""Log-barrier interior-point solver."""

from .barrier import SolverConfig, SolverResult, SolverStatus, solve

__all__ = ["SolverConfig", "SolverResult", "SolverStatus", "solve"]
