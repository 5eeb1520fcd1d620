"""Successive convex approximation driver and transmission schemes."""

from .driver import ScaConfig, Solution, solve_ssr
from .schemes import SCHEME_ORDER, SchemeId, solve_scheme

__all__ = ["SCHEME_ORDER", "ScaConfig", "SchemeId", "Solution", "solve_scheme", "solve_ssr"]
