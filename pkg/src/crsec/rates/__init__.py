"""Exact rate evaluation."""

from .engine import (
    PrecoderDesign,
    RateBundle,
    SinrBundle,
    achievable_rates,
    compute_sinrs,
    secrecy_sum_rate,
)

__all__ = [
    "PrecoderDesign",
    "RateBundle",
    "SinrBundle",
    "achievable_rates",
    "compute_sinrs",
    "secrecy_sum_rate",
]
