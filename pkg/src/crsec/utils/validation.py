"""Input validation utilities for crsec."""

import math
from typing import Any, List, Sequence

import numpy as np

from .exceptions import DomainError, InvalidDimensionError, ValidationError


def ensure_positive(value: float, name: str) -> float:
    """Return value as float, raising DomainError unless it is finite and > 0."""
    try:
        value = float(value)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name} must be a real number, got {value!r}") from e
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be positive, got {value}")
    return value


def ensure_theta(theta: float) -> float:
    """Validate a time-slot fraction in (0, 1]."""
    theta = float(theta)
    if not (0.0 < theta <= 1.0):
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    return theta


def ensure_complex_vector(values: Any, length: int, name: str) -> np.ndarray:
    """Convert to a read-only complex vector of the given length."""
    arr = np.array(values, dtype=complex).reshape(-1)
    if arr.shape[0] != length:
        raise InvalidDimensionError(
            f"{name} has length {arr.shape[0]}, expected {length}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def parse_complex_pair(value: Any, name: str) -> complex:
    """Parse a [re, im] pair."""
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise ValidationError(f"{name} must be a [re, im] pair, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def complex_to_pair(value: complex) -> List[float]:
    """Serialize a complex number as [re, im]."""
    return [float(value.real), float(value.imag)]


def parse_snr_grid(spec: str) -> List[float]:
    """Parse "start:step:stop" (inclusive) or a comma list into SNR values in dB."""
    spec = spec.strip()
    if not spec:
        raise ValidationError("SNR grid is empty")

    try:
        if ":" in spec:
            parts = [float(p) for p in spec.split(":")]
            if len(parts) != 3:
                raise ValidationError(f"SNR grid must be start:step:stop, got {spec!r}")
            start, step, stop = parts
            if step <= 0 or stop < start:
                raise ValidationError(f"SNR grid {spec!r} does not advance")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            grid = [start + k * step for k in range(count)]
        else:
            grid = [float(p) for p in spec.split(",") if p.strip()]
    except ValueError as e:
        raise ValidationError(f"Invalid SNR grid {spec!r}: {e}") from e

    if not grid or not all(math.isfinite(v) for v in grid):
        raise ValidationError(f"SNR grid {spec!r} must contain finite values")
    return grid


def parse_name_list(spec: Sequence[str] | str) -> List[str]:
    """Split a comma list (or a list of comma lists) into lower-case names."""
    items = [spec] if isinstance(spec, str) else list(spec)
    names: List[str] = []
    for item in items:
        names.extend(part.strip().lower() for part in item.split(",") if part.strip())
    return names
