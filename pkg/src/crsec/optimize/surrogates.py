"""First-order surrogates for the nonconvex rate terms.

Each surrogate bounds its target from one side and touches it at the expansion
point:

    phi_lb(theta, beta)      <= theta * beta
    theta_ub(theta, beta)    >= theta * beta
    psi_lb(p, rho)           <= |h^H p|^2 / rho
    omega_lb(pa, pb)         <= |g^H pa|^2 + |g^H pb|^2
    gamma_tangent(beta)      <= 2^beta

The scalar evaluators broadcast over leading axes. The ``*_bundle`` builders expose
the same functions as coefficient bundles over real variables, which is what the
program assembler stamps into constraint blocks. Complex vectors enter the bundles
realified: p of length n becomes [Re p, Im p] of length 2n, and h^H p becomes the
2 x 2n real map returned by :func:`hermitian_map`.
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ..utils.exceptions import DomainError

LN2 = float(np.log(2.0))


@dataclass(frozen=True, eq=False)
class ExpansionPoint:
    """Previous-iterate values the surrogates are linearized around."""

    theta0: float
    p_c: np.ndarray
    p_1: np.ndarray
    p_2: np.ndarray
    beta0: Dict[str, float] = field(default_factory=dict)
    rho0: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (0.0 < self.theta0 <= 1.0):
            raise DomainError(f"theta0 must lie in (0, 1], got {self.theta0}")
        for name, value in self.rho0.items():
            if value <= 0:
                raise DomainError(f"rho0[{name}] must be positive, got {value}")

    def column(self, name: str) -> np.ndarray:
        return {"p_c": self.p_c, "p_1": self.p_1, "p_2": self.p_2}[name]


def realify(p: np.ndarray) -> np.ndarray:
    """[Re p, Im p] along the last axis."""
    p = np.asarray(p, dtype=complex)
    return np.concatenate([p.real, p.imag], axis=-1)


def hermitian_map(h: np.ndarray) -> np.ndarray:
    """Real 2 x 2n matrix A with A @ realify(p) = [Re h^H p, Im h^H p]."""
    h = np.asarray(h, dtype=complex).reshape(-1)
    return np.vstack([
        np.concatenate([h.real, h.imag]),
        np.concatenate([-h.imag, h.real]),
    ])


def _inner(h: np.ndarray, p: np.ndarray) -> np.ndarray:
    """h^H p over the last axis."""
    return np.sum(np.conj(h) * p, axis=-1)


# Scalar evaluators

def phi_lb(theta, beta, at: Tuple[float, float]):
    """Concave minorant of theta * beta."""
    theta0, beta0 = at
    s0 = theta0 + beta0
    return 0.5 * s0 * (theta + beta) - 0.25 * s0 ** 2 - 0.25 * (theta - beta) ** 2


def theta_ub(theta, beta, at: Tuple[float, float]):
    """Convex majorant of theta * beta."""
    theta0, beta0 = at
    d0 = theta0 - beta0
    return 0.25 * (theta + beta) ** 2 + 0.25 * d0 ** 2 - 0.5 * d0 * (theta - beta)


def psi_lb(p, h, rho, at):
    """Affine minorant of |h^H p|^2 / rho."""
    p0, rho0 = at
    rho0 = np.asarray(rho0, dtype=float)
    if np.any(rho0 <= 0):
        raise DomainError("rho0 must be positive")
    a0 = _inner(h, np.asarray(p0, dtype=complex))
    a = _inner(h, np.asarray(p, dtype=complex))
    return 2.0 * np.real(np.conj(a0) * a) / rho0 - np.abs(a0) ** 2 * rho / rho0 ** 2


def omega_lb(pa, pb, g, at):
    """Affine minorant of |g^H pa|^2 + |g^H pb|^2."""
    pa0, pb0 = at
    a0 = _inner(g, np.asarray(pa0, dtype=complex))
    b0 = _inner(g, np.asarray(pb0, dtype=complex))
    a = _inner(g, np.asarray(pa, dtype=complex))
    b = _inner(g, np.asarray(pb, dtype=complex))
    return (
        2.0 * np.real(np.conj(a0) * a + np.conj(b0) * b)
        - np.abs(a0) ** 2
        - np.abs(b0) ** 2
    )


def gamma_tangent(beta, at: float):
    """Tangent of 2^beta at beta0."""
    return 2.0 ** at * (1.0 + LN2 * (beta - at))


# Coefficient bundles

@dataclass(frozen=True, eq=False)
class AffineSurrogate:
    """constant + linear . z"""

    constant: float
    linear: np.ndarray

    def value(self, z: np.ndarray):
        return self.constant + np.asarray(z) @ self.linear

    def gradient(self, z: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.linear, np.shape(z)).copy()


@dataclass(frozen=True, eq=False)
class QuadraticSurrogate:
    """constant + linear . z + sign * ||quad_rows @ z||^2"""

    constant: float
    linear: np.ndarray
    quad_rows: np.ndarray
    sign: float

    def value(self, z: np.ndarray):
        z = np.asarray(z)
        r = z @ self.quad_rows.T
        return self.constant + z @ self.linear + self.sign * np.sum(r * r, axis=-1)

    def gradient(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z)
        return self.linear + 2.0 * self.sign * (z @ self.quad_rows.T) @ self.quad_rows


def phi_bundle(at: Tuple[float, float]) -> QuadraticSurrogate:
    """phi_lb over z = (theta, beta)."""
    s0 = at[0] + at[1]
    return QuadraticSurrogate(
        constant=-0.25 * s0 ** 2,
        linear=np.array([0.5 * s0, 0.5 * s0]),
        quad_rows=np.array([[0.5, -0.5]]),
        sign=-1.0,
    )


def theta_bundle(at: Tuple[float, float]) -> QuadraticSurrogate:
    """theta_ub over z = (theta, beta)."""
    d0 = at[0] - at[1]
    return QuadraticSurrogate(
        constant=0.25 * d0 ** 2,
        linear=np.array([-0.5 * d0, 0.5 * d0]),
        quad_rows=np.array([[0.5, 0.5]]),
        sign=1.0,
    )


def psi_bundle(h: np.ndarray, p0: np.ndarray, rho0: float) -> AffineSurrogate:
    """psi_lb over z = (realify(p), rho)."""
    if rho0 <= 0:
        raise DomainError(f"rho0 must be positive, got {rho0}")
    A = hermitian_map(h)
    u0 = A @ realify(p0)
    return AffineSurrogate(
        constant=0.0,
        linear=np.concatenate([2.0 * A.T @ u0 / rho0, [-(u0 @ u0) / rho0 ** 2]]),
    )


def omega_bundle(g: np.ndarray, pa0: np.ndarray, pb0: np.ndarray) -> AffineSurrogate:
    """omega_lb over z = (realify(pa), realify(pb))."""
    A = hermitian_map(g)
    ua = A @ realify(pa0)
    ub = A @ realify(pb0)
    return AffineSurrogate(
        constant=-(ua @ ua) - (ub @ ub),
        linear=np.concatenate([2.0 * A.T @ ua, 2.0 * A.T @ ub]),
    )


def gamma_bundle(beta0: float) -> AffineSurrogate:
    """gamma_tangent over z = (beta,)."""
    scale = 2.0 ** beta0
    return AffineSurrogate(
        constant=scale * (1.0 - LN2 * beta0),
        linear=np.array([scale * LN2]),
    )
