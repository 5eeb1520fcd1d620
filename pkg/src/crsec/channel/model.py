"""Channel realizations, noise variances and power budgets."""

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..utils.exceptions import InvalidDimensionError, ValidationError
from ..utils.logging import get_logger
from ..utils.validation import ensure_complex_vector, ensure_positive

logger = get_logger(__name__)


@dataclass(frozen=True)
class NoiseVariances:
    """Noise variances at U1, U2 (direct phase), U2 (relay phase), E (both phases)."""

    u1: float = 1.0
    u2: float = 1.0
    u3: float = 1.0
    e1: float = 1.0
    e2: float = 1.0

    def __post_init__(self) -> None:
        for f in dataclasses.fields(self):
            object.__setattr__(
                self, f.name, ensure_positive(getattr(self, f.name), f"sigma2.{f.name}")
            )

    def minimum(self) -> float:
        return min(self.u1, self.u2, self.u3, self.e1, self.e2)


@dataclass(frozen=True)
class ChannelStats:
    """Per-link variances of the complex Gaussian channel entries."""

    h1: float = 1.0
    h2: float = 1.0
    g1: float = 1.0
    h3: float = 1.0
    g2: float = 1.0

    def __post_init__(self) -> None:
        for f in dataclasses.fields(self):
            object.__setattr__(
                self, f.name, ensure_positive(getattr(self, f.name), f"sigma_{f.name}^2")
            )


@dataclass(frozen=True)
class PowerBudget:
    """Transmit power at S and relay power at U1 (linear scale)."""

    p_t: float
    p_r: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p_t", ensure_positive(self.p_t, "p_t"))
        object.__setattr__(self, "p_r", ensure_positive(self.p_r, "p_r"))


def power_budget_from_snr(snr_db: float) -> PowerBudget:
    """Unit-noise SNR mapping: P_T = P_R = 10^(snr/10)."""
    power = 10.0 ** (float(snr_db) / 10.0)
    return PowerBudget(p_t=power, p_r=power)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """One channel realization.

    h1, h2 and g1 are the S->U1, S->U2 and S->E vectors; h3 and g2 are the scalar
    U1->U2 and U1->E links used during the relay phase.
    """

    n_t: int
    h1: np.ndarray
    h2: np.ndarray
    g1: np.ndarray
    h3: complex
    g2: complex
    sigma2: NoiseVariances = field(default_factory=NoiseVariances)

    def __post_init__(self) -> None:
        if int(self.n_t) != self.n_t or self.n_t < 2:
            raise InvalidDimensionError(f"n_t must be an integer >= 2, got {self.n_t}")
        object.__setattr__(self, "n_t", int(self.n_t))
        for name in ("h1", "h2", "g1"):
            object.__setattr__(
                self, name, ensure_complex_vector(getattr(self, name), self.n_t, name)
            )
        object.__setattr__(self, "h3", complex(self.h3))
        object.__setattr__(self, "g2", complex(self.g2))
        if not isinstance(self.sigma2, NoiseVariances):
            raise ValidationError("sigma2 must be a NoiseVariances value")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChannelSet):
            return NotImplemented
        return (
            self.n_t == other.n_t
            and np.array_equal(self.h1, other.h1)
            and np.array_equal(self.h2, other.h2)
            and np.array_equal(self.g1, other.g1)
            and self.h3 == other.h3
            and self.g2 == other.g2
            and self.sigma2 == other.sigma2
        )

    __hash__ = None  # type: ignore[assignment]

    def eavesdropper_free(self) -> "ChannelSet":
        """Copy with both eavesdropper links zeroed."""
        return dataclasses.replace(self, g1=np.zeros(self.n_t, dtype=complex), g2=0j)

    def max_gain(self) -> float:
        """Largest squared channel norm over all five links."""
        return float(max(
            np.vdot(self.h1, self.h1).real,
            np.vdot(self.h2, self.h2).real,
            np.vdot(self.g1, self.g1).real,
            abs(self.h3) ** 2,
            abs(self.g2) ** 2,
        ))


def channel_rng(master_seed: int, trial: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (master seed, trial index)."""
    if master_seed < 0 or trial < 0:
        raise ValidationError("seed and trial index must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([master_seed, trial])))


def _complex_gaussian(rng: np.random.Generator, variance: float, size: int) -> np.ndarray:
    x = rng.standard_normal(size)
    y = rng.standard_normal(size)
    return (x + 1j * y) * math.sqrt(variance / 2.0)


def generate_channel_set(
    seed: int,
    n_t: int,
    stats: ChannelStats,
    *,
    trial: int = 0,
    noise: Optional[NoiseVariances] = None,
) -> ChannelSet:
    """Draw one i.i.d. Rayleigh realization and enforce the user ordering."""
    if n_t < 2:
        raise InvalidDimensionError(f"n_t must be >= 2, got {n_t}")

    rng = channel_rng(seed, trial)
    cs = ChannelSet(
        n_t=n_t,
        h1=_complex_gaussian(rng, stats.h1, n_t),
        h2=_complex_gaussian(rng, stats.h2, n_t),
        g1=_complex_gaussian(rng, stats.g1, n_t),
        h3=complex(_complex_gaussian(rng, stats.h3, 1)[0]),
        g2=complex(_complex_gaussian(rng, stats.g2, 1)[0]),
        sigma2=noise or NoiseVariances(),
    )
    return order_users(cs)


def order_users(cs: ChannelSet) -> ChannelSet:
    """Relabel users so that U1 has the stronger direct channel."""
    if np.linalg.norm(cs.h1) >= np.linalg.norm(cs.h2):
        return cs

    logger.debug("Swapping users so that ||h1|| >= ||h2||")
    sigma2 = dataclasses.replace(cs.sigma2, u1=cs.sigma2.u2, u2=cs.sigma2.u1)
    return dataclasses.replace(cs, h1=cs.h2, h2=cs.h1, sigma2=sigma2)
