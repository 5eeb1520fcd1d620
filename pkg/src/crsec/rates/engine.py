"""Exact SINR, rate and secrecy-rate evaluation.

Every optimizer output is scored here; nothing in this module is approximated.
Rates are in bits per channel use (log base 2).
"""

import dataclasses
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from ..channel.model import ChannelSet, PowerBudget
from ..utils.exceptions import InvalidDimensionError
from ..utils.validation import ensure_complex_vector, ensure_theta


@dataclass(frozen=True, eq=False)
class PrecoderDesign:
    """Precoder columns [p_c, p_1, p_2] and the direct-phase fraction theta."""

    p_c: np.ndarray
    p_1: np.ndarray
    p_2: np.ndarray
    theta: float = 1.0

    def __post_init__(self) -> None:
        n_t = np.asarray(self.p_c).reshape(-1).shape[0]
        for name in ("p_c", "p_1", "p_2"):
            object.__setattr__(
                self, name, ensure_complex_vector(getattr(self, name), n_t, name)
            )
        object.__setattr__(self, "theta", ensure_theta(self.theta))

    @property
    def n_t(self) -> int:
        return int(self.p_c.shape[0])

    @classmethod
    def zero(cls, n_t: int, theta: float = 1.0) -> "PrecoderDesign":
        z = np.zeros(n_t, dtype=complex)
        return cls(p_c=z, p_1=z, p_2=z, theta=theta)

    def columns(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.p_c, self.p_1, self.p_2

    def power(self) -> float:
        """Total transmit power ||p_c||^2 + ||p_1||^2 + ||p_2||^2."""
        return float(sum(np.vdot(p, p).real for p in self.columns()))

    def scaled(self, factor: float) -> "PrecoderDesign":
        return dataclasses.replace(
            self, p_c=self.p_c * factor, p_1=self.p_1 * factor, p_2=self.p_2 * factor
        )

    def with_phase(self, phi: float) -> "PrecoderDesign":
        """Rotate every column by the common phase e^{i phi}."""
        return self.scaled(np.exp(1j * phi))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrecoderDesign):
            return NotImplemented
        return (
            self.theta == other.theta
            and np.array_equal(self.p_c, other.p_c)
            and np.array_equal(self.p_1, other.p_1)
            and np.array_equal(self.p_2, other.p_2)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class SinrBundle:
    """All SINRs of one design.

    gc1/gc2 common stream at U1/U2, gp1/gp2 private streams, gc2_p2 the relayed
    common stream at U2, gce1/gce2 the common stream at E in each phase, and
    g1e/g2e the private streams at E.
    """

    gc1: float
    gc2: float
    gp1: float
    gp2: float
    gc2_p2: float
    gce1: float
    gce2: float
    g1e: float
    g2e: float


@dataclass(frozen=True)
class RateBundle:
    """Achievable rates, eavesdropper rates and the secrecy sum rate."""

    r_c1: float
    r_c2: float
    r_c: float
    r_p1: float
    r_p2: float
    c_ce: float
    c_1e: float
    c_2e: float
    r_c_sec: float
    r_p1_sec: float
    r_p2_sec: float
    total: float
    r_c2_relay: float = 0.0
    c_ce_relay: float = 0.0

    def as_dict(self) -> Dict[str, float]:
        return dataclasses.asdict(self)


def _gain(h: np.ndarray, p: np.ndarray) -> float:
    """|h^H p|^2."""
    return float(abs(np.vdot(h, p)) ** 2)


def _check_dimensions(d: PrecoderDesign, cs: ChannelSet) -> None:
    if d.n_t != cs.n_t:
        raise InvalidDimensionError(
            f"design has {d.n_t} antennas but channel set has {cs.n_t}"
        )


def compute_sinrs(d: PrecoderDesign, cs: ChannelSet, pb: PowerBudget) -> SinrBundle:
    """Evaluate every SINR of the two-phase transmission."""
    _check_dimensions(d, cs)
    s = cs.sigma2

    h1c, h11, h12 = (_gain(cs.h1, p) for p in d.columns())
    h2c, h21, h22 = (_gain(cs.h2, p) for p in d.columns())
    ec, e1, e2 = (_gain(cs.g1, p) for p in d.columns())

    return SinrBundle(
        gc1=h1c / (h11 + h12 + s.u1),
        gc2=h2c / (h21 + h22 + s.u2),
        gp1=h11 / (h12 + s.u1),
        gp2=h22 / (h21 + s.u2),
        gc2_p2=pb.p_r * abs(cs.h3) ** 2 / s.u3,
        gce1=ec / (e1 + e2 + s.e1),
        gce2=pb.p_r * abs(cs.g2) ** 2 / s.e2,
        g1e=e1 / (ec + e2 + s.e1),
        g2e=e2 / (ec + e1 + s.e1),
    )


def achievable_rates(
    d: PrecoderDesign,
    cs: ChannelSet,
    pb: PowerBudget,
    sinrs: Optional[SinrBundle] = None,
) -> RateBundle:
    """Rates of every stream at the users and at the eavesdropper."""
    g = sinrs if sinrs is not None else compute_sinrs(d, cs, pb)
    theta = d.theta
    relay = 1.0 - theta

    r_c2_relay = relay * np.log2(1.0 + g.gc2_p2)
    c_ce_relay = relay * np.log2(1.0 + g.gce2)

    r_c1 = theta * np.log2(1.0 + g.gc1)
    r_c2 = theta * np.log2(1.0 + g.gc2) + r_c2_relay
    r_c = min(r_c1, r_c2)
    r_p1 = theta * np.log2(1.0 + g.gp1)
    r_p2 = theta * np.log2(1.0 + g.gp2)
    c_ce = theta * np.log2(1.0 + g.gce1) + c_ce_relay
    c_1e = theta * np.log2(1.0 + g.g1e)
    c_2e = theta * np.log2(1.0 + g.g2e)

    r_c_sec = max(r_c - c_ce, 0.0)
    r_p1_sec = max(r_p1 - c_1e, 0.0)
    r_p2_sec = max(r_p2 - c_2e, 0.0)

    return RateBundle(
        r_c1=float(r_c1),
        r_c2=float(r_c2),
        r_c=float(r_c),
        r_p1=float(r_p1),
        r_p2=float(r_p2),
        c_ce=float(c_ce),
        c_1e=float(c_1e),
        c_2e=float(c_2e),
        r_c_sec=float(r_c_sec),
        r_p1_sec=float(r_p1_sec),
        r_p2_sec=float(r_p2_sec),
        total=float(r_c_sec + r_p1_sec + r_p2_sec),
        r_c2_relay=float(r_c2_relay),
        c_ce_relay=float(c_ce_relay),
    )


def secrecy_sum_rate(d: PrecoderDesign, cs: ChannelSet, pb: PowerBudget) -> float:
    """Total secrecy sum rate in bits per channel use."""
    return achievable_rates(d, cs, pb).total
