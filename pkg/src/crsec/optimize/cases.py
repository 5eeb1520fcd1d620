"""Per-case convex subproblems and original-constraint residuals.

The secrecy sum rate has a [.]+ clamp on each private term. Fixing the sign of
R_pk - C_ke for both users splits the problem into four cases; inside a case the
clamp disappears and each rate or leak is replaced by an auxiliary chain

    rate side (lower bounds):  gamma >= rho,  2^beta <= 1 + rho,  alpha <= theta*beta
    leak side (upper bounds):  gamma <= rho,  2^beta >= 1 + rho,  alpha >= theta*beta

whose nonconvex links are convexified with the surrogates of
:mod:`crsec.optimize.surrogates`. A user whose private rate sits below its leak
swaps the roles: its rate gets the upper chain and its leak the lower chain.
"""

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..channel.model import ChannelSet, PowerBudget
from ..rates.engine import PrecoderDesign, achievable_rates, compute_sinrs
from ..utils.exceptions import DomainError, InvalidDimensionError, ValidationError
from ..utils.logging import get_logger
from .program import (
    AffineBlock,
    ConstraintBlock,
    ConvexProgram,
    ExponentialBlock,
    LinearForm,
    PowerBallBlock,
    QuadOverLinearBlock,
    QuadraticBlock,
    VariableLayout,
)
from .surrogates import (
    ExpansionPoint,
    gamma_bundle,
    hermitian_map,
    omega_bundle,
    phi_bundle,
    psi_bundle,
    realify,
    theta_bundle,
)

logger = get_logger(__name__)

THETA_MIN = 1e-3
RHO_MIN = 1e-9

PRIVATE_AUX = ("p1", "p2", "1e", "2e")
COMMON_AUX = ("c1", "c2", "ce")
P1, P2, E1, E2 = range(4)
C1, C2, CE = range(3)


class CaseId(Enum):
    """Sign pattern of (R_p1 - C_1e, R_p2 - C_2e); True means >= 0."""

    CASE1 = 1
    CASE2 = 2
    CASE3 = 3
    CASE4 = 4

    @property
    def label(self) -> str:
        return f"Case{self.value}"

    @property
    def signs(self) -> Tuple[bool, bool]:
        return {
            1: (True, True),
            2: (True, False),
            3: (False, True),
            4: (False, False),
        }[self.value]

    @classmethod
    def from_signs(cls, user1: bool, user2: bool) -> "CaseId":
        for case in cls:
            if case.signs == (user1, user2):
                return case
        raise ValueError("unreachable")

    @classmethod
    def parse(cls, text: str) -> "CaseId":
        key = text.strip().lower().removeprefix("case")
        try:
            return cls(int(key))
        except ValueError as e:
            raise ValidationError(f"Unknown case {text!r}") from e


@dataclass(frozen=True)
class SchemeShape:
    """Which streams and which time split a scheme optimizes over."""

    name: str
    theta_fixed: Optional[float] = None
    common: bool = True
    private2: bool = True

    def cases(self) -> Tuple[CaseId, ...]:
        """Distinct case patterns; without private stream 2 its sign is moot."""
        if not self.private2:
            return (CaseId.CASE1, CaseId.CASE3)
        return tuple(CaseId)

    def streams(self) -> Tuple[str, ...]:
        names = ["p_c"] if self.common else []
        names.append("p_1")
        if self.private2:
            names.append("p_2")
        return tuple(names)

    def aux_names(self) -> Tuple[str, ...]:
        names = ["p1", "1e"]
        if self.private2:
            names += ["p2", "2e"]
        if self.common:
            names += list(COMMON_AUX)
        return tuple(names)


CRS_SHAPE = SchemeShape("CRS")
NRS_SHAPE = SchemeShape("NRS", theta_fixed=1.0)
MULP_SHAPE = SchemeShape("MULP", theta_fixed=1.0, common=False)
CNOMA_SHAPE = SchemeShape("CNOMA", private2=False)


def _vector(values: Sequence[float], size: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape[0] != size:
        raise InvalidDimensionError(f"{name} must have {size} entries, got {arr.shape[0]}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScaIterate:
    """Design plus auxiliary rate (alpha), exponent (beta) and SINR (rho) values.

    alpha_p/beta_p/rho_p are ordered (p1, p2, 1e, 2e); alpha_c/beta_c/rho_c are
    ordered (c1, c2, ce).
    """

    design: PrecoderDesign
    alpha_p: np.ndarray
    alpha_c: np.ndarray
    beta_p: np.ndarray
    beta_c: np.ndarray
    rho_p: np.ndarray
    rho_c: np.ndarray
    t_c: Optional[float] = None
    slack: Optional[float] = None
    restoration_steps: int = 0

    def __post_init__(self) -> None:
        for name in ("alpha_p", "beta_p", "rho_p"):
            object.__setattr__(self, name, _vector(getattr(self, name), 4, name))
        for name in ("alpha_c", "beta_c", "rho_c"):
            object.__setattr__(self, name, _vector(getattr(self, name), 3, name))

    def aux(self, family: str, name: str) -> float:
        """Value of alpha/beta/rho for an auxiliary name like "p1" or "ce"."""
        if name in PRIVATE_AUX:
            return float(getattr(self, f"{family}_p")[PRIVATE_AUX.index(name)])
        return float(getattr(self, f"{family}_c")[COMMON_AUX.index(name)])

    def epigraph(self) -> float:
        if self.t_c is not None:
            return float(self.t_c)
        return float(min(self.alpha_c[C1], self.alpha_c[C2]))

    def expansion_point(self, names: Iterable[str] = PRIVATE_AUX + COMMON_AUX) -> ExpansionPoint:
        names = tuple(names)
        return ExpansionPoint(
            theta0=self.design.theta,
            p_c=self.design.p_c,
            p_1=self.design.p_1,
            p_2=self.design.p_2,
            beta0={name: self.aux("beta", name) for name in names},
            rho0={name: self.aux("rho", name) for name in names},
        )


@dataclass(frozen=True)
class CaseResiduals:
    """Signed slacks of the original case constraints (>= 0 means satisfied)."""

    values: Dict[str, float]

    def minimum(self) -> float:
        return min(self.values.values())

    def as_array(self) -> np.ndarray:
        return np.array(list(self.values.values()))

    def feasible(self, tol: float = 1e-6) -> bool:
        return self.minimum() >= -tol


def build_layout(n_t: int, shape: SchemeShape = CRS_SHAPE, restoration: bool = False) -> VariableLayout:
    """Variable layout: precoders, theta, t_c, then alpha, beta and rho blocks."""
    entries: List[Tuple[str, int]] = [(name, 2 * n_t) for name in shape.streams()]
    if shape.theta_fixed is None:
        entries.append(("theta", 1))
    if shape.common:
        entries.append(("t_c", 1))
    ordered = [name for name in PRIVATE_AUX + COMMON_AUX if name in shape.aux_names()]
    for family in ("alpha", "beta", "rho"):
        entries += [(f"{family}_{name}", 1) for name in ordered]
    if restoration:
        entries.append(("slack", 1))
    fixed = {} if shape.theta_fixed is None else {"theta": shape.theta_fixed}
    return VariableLayout(entries, fixed=fixed)


def pack(it: ScaIterate, layout: VariableLayout) -> np.ndarray:
    """Flatten an iterate into a layout's variable vector."""
    x = layout.zeros()
    d = it.design
    columns = {"p_c": d.p_c, "p_1": d.p_1, "p_2": d.p_2}
    for name, sl in layout:
        if name in columns:
            x[sl] = realify(columns[name])
        elif name == "theta":
            x[sl] = d.theta
        elif name == "t_c":
            x[sl] = it.epigraph()
        elif name == "slack":
            x[sl] = it.slack if it.slack is not None else 0.0
        else:
            family, aux = name.split("_", 1)
            x[sl] = it.aux(family, aux)
    return x


def unpack(x: np.ndarray, layout: VariableLayout, n_t: int) -> ScaIterate:
    """Rebuild an iterate; streams and auxiliaries absent from the layout are 0."""

    def column(name: str) -> np.ndarray:
        if not layout.has_free(name):
            return np.zeros(n_t, dtype=complex)
        v = x[layout.slot(name)]
        return v[:n_t] + 1j * v[n_t:]

    def scalar(name: str, default: float = 0.0) -> float:
        if layout.has_free(name):
            return float(x[layout.slot(name)][0])
        return float(layout.fixed.get(name, default))

    theta = min(max(scalar("theta", 1.0), np.nextafter(0.0, 1.0)), 1.0)
    design = PrecoderDesign(
        p_c=column("p_c"), p_1=column("p_1"), p_2=column("p_2"), theta=theta
    )
    return ScaIterate(
        design=design,
        alpha_p=[scalar(f"alpha_{n}") for n in PRIVATE_AUX],
        alpha_c=[scalar(f"alpha_{n}") for n in COMMON_AUX],
        beta_p=[scalar(f"beta_{n}") for n in PRIVATE_AUX],
        beta_c=[scalar(f"beta_{n}") for n in COMMON_AUX],
        rho_p=[scalar(f"rho_{n}") for n in PRIVATE_AUX],
        rho_c=[scalar(f"rho_{n}") for n in COMMON_AUX],
        t_c=scalar("t_c") if layout.has_free("t_c") else None,
        slack=scalar("slack") if layout.has_free("slack") else None,
    )


class _ProgramBuilder:
    """Collects constraint blocks for one assembled subproblem."""

    def __init__(self, layout: VariableLayout, at: ScaIterate, theta_min: float):
        self.layout = layout
        self.at = at
        self.theta0 = at.design.theta
        self.theta_min = theta_min
        self.blocks: List[ConstraintBlock] = []
        self.columns = {"p_c": at.design.p_c, "p_1": at.design.p_1, "p_2": at.design.p_2}

    # primitives

    def affine(self, label: str, form: LinearForm) -> None:
        if form.is_constant():
            if form.const < 0:
                return
            logger.debug(f"{label}: constant constraint {form.const:+g} <= 0")
        self.blocks.append(AffineBlock(label=label, a=form.coef, b=form.const))

    def quadratic(
        self, label: str, rows: Sequence[Tuple[np.ndarray, LinearForm]], form: LinearForm
    ) -> None:
        """sum_j ||R_j z_j||^2 style: each row pair (vector over z, forms) -> residual."""
        if not rows:
            self.affine(label, form)
            return
        M = np.vstack([r for r, _ in rows])
        c = np.concatenate([np.atleast_1d(off) for _, off in rows])
        self.blocks.append(QuadraticBlock(label=label, M=M, c=c, a=form.coef, b=form.const))

    def stream_rows(self, h: np.ndarray, names: Iterable[str]) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Residual rows whose squared norm is sum |h^H p_name|^2."""
        A = hermitian_map(h)
        return [
            (A @ self.layout.selector(name), np.zeros(2))
            for name in names
            if self.layout.has_free(name)
        ]

    # surrogate stamps

    def theta_form(self) -> LinearForm:
        return self.layout.var("theta")

    def product_rows(self, quad_rows: np.ndarray, beta: LinearForm) -> List[Tuple[np.ndarray, np.ndarray]]:
        theta = self.theta_form()
        M = np.outer(quad_rows[:, 0], theta.coef) + np.outer(quad_rows[:, 1], beta.coef)
        c = quad_rows[:, 0] * theta.const + quad_rows[:, 1] * beta.const
        return [(M, c)]

    def product_lower(self, label: str, alpha: LinearForm, aux: str) -> None:
        """alpha <= theta * beta_aux, through the phi minorant."""
        beta = self.layout.var(f"beta_{aux}")
        theta = self.theta_form()
        if theta.is_constant():
            self.affine(label, alpha - beta * theta.const)
            return
        bundle = phi_bundle((self.theta0, self.at.aux("beta", aux)))
        lin = theta * float(bundle.linear[0]) + beta * float(bundle.linear[1])
        self.quadratic(label, self.product_rows(bundle.quad_rows, beta), alpha - lin - bundle.constant)

    def product_upper(self, label: str, alpha: LinearForm, aux: str) -> None:
        """theta * beta_aux <= alpha, through the theta majorant."""
        beta = self.layout.var(f"beta_{aux}")
        theta = self.theta_form()
        if theta.is_constant():
            self.affine(label, beta * theta.const - alpha)
            return
        bundle = theta_bundle((self.theta0, self.at.aux("beta", aux)))
        lin = theta * float(bundle.linear[0]) + beta * float(bundle.linear[1])
        self.quadratic(label, self.product_rows(bundle.quad_rows, beta), lin + bundle.constant - alpha)

    def psi_form(self, h: np.ndarray, stream: str, aux: str) -> LinearForm:
        rho0 = self.at.aux("rho", aux)
        bundle = psi_bundle(h, self.columns[stream], rho0)
        lin_p, lin_rho = bundle.linear[:-1], float(bundle.linear[-1])
        return LinearForm(lin_p @ self.layout.selector(stream)) + self.layout.var(f"rho_{aux}") * lin_rho

    def omega_form(self, g: np.ndarray, streams: Iterable[str]) -> LinearForm:
        form = LinearForm(self.layout.zeros())
        for name in streams:
            if not self.layout.has_free(name):
                continue
            p0 = self.columns[name]
            bundle = omega_bundle(g, p0, np.zeros_like(p0))
            half = bundle.linear[: 2 * p0.shape[0]]
            form = form + LinearForm(half @ self.layout.selector(name), float(bundle.constant))
        return form

    def sinr_lower(
        self, label: str, h: np.ndarray, signal: str, interferers: Sequence[str], sigma2: float, aux: str
    ) -> None:
        """rho_aux <= SINR via the DC form sum|h^H p_i|^2 + sigma2 - psi <= 0."""
        self.quadratic(
            label,
            self.stream_rows(h, interferers),
            LinearForm(self.layout.zeros(), sigma2) - self.psi_form(h, signal, aux),
        )

    def sinr_upper(
        self, label: str, h: np.ndarray, signal: str, interferers: Sequence[str], sigma2: float, aux: str
    ) -> None:
        """SINR <= rho_aux via |h^H p|^2 / rho - omega - sigma2 <= 0."""
        (M, c), = self.stream_rows(h, [signal])
        rho = self.layout.var(f"rho_{aux}")
        form = -self.omega_form(h, interferers) - sigma2
        self.blocks.append(
            QuadOverLinearBlock(label=label, M=M, c=c, d=rho.coef, e=rho.const, a=form.coef, b=form.const)
        )

    def exp_upper(self, label: str, aux: str) -> None:
        """2^beta <= 1 + rho (kept exact)."""
        beta = self.layout.var(f"beta_{aux}")
        form = -(self.layout.var(f"rho_{aux}") + 1.0)
        self.blocks.append(ExponentialBlock(label=label, d=beta.coef, e=beta.const, a=form.coef, b=form.const))

    def exp_lower(self, label: str, aux: str) -> None:
        """1 + rho <= 2^beta, through the tangent of 2^beta."""
        beta = self.layout.var(f"beta_{aux}")
        tangent = gamma_bundle(self.at.aux("beta", aux))
        self.affine(label, self.layout.var(f"rho_{aux}") + 1.0 - beta * float(tangent.linear[0]) - tangent.constant)


def _check_iterate(at: ScaIterate, cs: ChannelSet, shape: SchemeShape) -> None:
    if at.design.n_t != cs.n_t:
        raise InvalidDimensionError(
            f"iterate has {at.design.n_t} antennas but channel set has {cs.n_t}"
        )
    for name in shape.aux_names():
        rho = at.aux("rho", name)
        if not rho > 0:
            raise DomainError(f"rho_{name} must be positive at the expansion point, got {rho}")


def assemble(
    case: CaseId,
    at: ScaIterate,
    cs: ChannelSet,
    pb: PowerBudget,
    *,
    shape: SchemeShape = CRS_SHAPE,
    restoration: bool = False,
    theta_min: float = THETA_MIN,
    rho_min: float = RHO_MIN,
) -> ConvexProgram:
    """Linearize the case around ``at`` into a convex program.

    With ``restoration`` the case-sign and secrecy-ordering constraints are relaxed
    by a shared slack s and the objective becomes maximize -s.
    """
    _check_iterate(at, cs, shape)
    layout = build_layout(cs.n_t, shape, restoration)
    b = _ProgramBuilder(layout, at, theta_min)
    var = layout.var
    s2 = cs.sigma2
    theta = b.theta_form()
    zero = LinearForm(layout.zeros())
    slack = var("slack") if restoration else zero

    sinrs = compute_sinrs(at.design, cs, pb)
    relay_rate = float(np.log2(1.0 + sinrs.gc2_p2))
    relay_leak = float(np.log2(1.0 + sinrs.gce2))
    relay_share = 1.0 - theta

    if shape.common:
        b.affine("epigraph_c1", var("t_c") - var("alpha_c1"))
        b.affine("epigraph_c2", var("t_c") - var("alpha_c2"))
        b.product_lower("rate_c1", var("alpha_c1"), "c1")
        b.product_lower("rate_c2", var("alpha_c2") - relay_share * relay_rate, "c2")
        private = [name for name in ("p_1", "p_2") if layout.has_free(name)]
        b.sinr_lower("sinr_c1", cs.h1, "p_c", private, s2.u1, "c1")
        b.sinr_lower("sinr_c2", cs.h2, "p_c", private, s2.u2, "c2")
        b.exp_upper("exp_c1", "c1")
        b.exp_upper("exp_c2", "c2")
        b.product_upper("leak_ce", var("alpha_ce") - relay_share * relay_leak, "ce")
        b.sinr_upper("sinr_ce", cs.g1, "p_c", private, s2.e1, "ce")
        b.exp_lower("exp_ce", "ce")
        b.affine("order_c1", var("alpha_ce") - var("alpha_c1") - slack)
        b.affine("order_c2", var("alpha_ce") - var("alpha_c2") - slack)

    users = [(1, cs.h1, s2.u1)]
    if shape.private2:
        users.append((2, cs.h2, s2.u2))
    for k, h, sigma2 in users:
        own, other = f"p_{k}", f"p_{3 - k}"
        rate, leak = f"p{k}", f"{k}e"
        at_eve = [name for name in ("p_c", other) if layout.has_free(name)]
        at_user = [other] if layout.has_free(other) else []
        if case.signs[k - 1]:
            b.product_lower(f"rate_p{k}", var(f"alpha_{rate}"), rate)
            b.sinr_lower(f"sinr_p{k}", h, own, at_user, sigma2, rate)
            b.exp_upper(f"exp_p{k}", rate)
            b.product_upper(f"leak_{k}e", var(f"alpha_{leak}"), leak)
            b.sinr_upper(f"sinr_{k}e", cs.g1, own, at_eve, s2.e1, leak)
            b.exp_lower(f"exp_{k}e", leak)
            b.affine(f"sign_{k}", var(f"alpha_{leak}") - var(f"alpha_{rate}") - slack)
        else:
            b.product_upper(f"rate_p{k}", var(f"alpha_{rate}"), rate)
            b.sinr_upper(f"sinr_p{k}", h, own, at_user, sigma2, rate)
            b.exp_lower(f"exp_p{k}", rate)
            b.product_lower(f"leak_{k}e", var(f"alpha_{leak}"), leak)
            b.sinr_lower(f"sinr_{k}e", cs.g1, own, at_eve, s2.e1, leak)
            b.exp_upper(f"exp_{k}e", leak)
            b.affine(f"sign_{k}", var(f"alpha_{rate}") - var(f"alpha_{leak}") - slack)

    for name in shape.aux_names():
        b.affine(f"rho_min_{name}", rho_min - var(f"rho_{name}"))
    if shape.theta_fixed is None:
        b.affine("theta_min", theta_min - theta)
        b.affine("theta_max", theta - 1.0)
    selector = np.vstack([layout.selector(name) for name in shape.streams()])
    b.blocks.append(PowerBallBlock.ball("power", selector, pb.p_t))

    if restoration:
        b.affine("slack_floor", -slack - 1.0)
        if shape.common:
            b.affine("epigraph_floor", (at.epigraph() - 1.0) - var("t_c"))
        objective = -slack.coef
    else:
        objective = layout.zeros()
        if shape.common:
            objective = objective + var("t_c").coef - var("alpha_ce").coef
        for k, _, _ in users:
            if case.signs[k - 1]:
                objective = objective + var(f"alpha_p{k}").coef - var(f"alpha_{k}e").coef

    label = f"{shape.name}-{case.label}" + ("-restoration" if restoration else "")
    return ConvexProgram(
        layout=layout,
        objective=objective,
        blocks=tuple(b.blocks),
        label=label,
        meta={
            "theta0": repr(at.design.theta),
            "p_t": repr(pb.p_t),
            "p_r": repr(pb.p_r),
        },
    )


def original_case_residuals(
    case: CaseId,
    x: ScaIterate,
    cs: ChannelSet,
    pb: PowerBudget,
    *,
    shape: SchemeShape = CRS_SHAPE,
) -> CaseResiduals:
    """Slacks of R_c >= C_ce, the power ball, 0 < theta <= 1 and the case signs."""
    rates = achievable_rates(x.design, cs, pb)
    values = {
        "secrecy_order": rates.r_c - rates.c_ce,
        "power": pb.p_t - x.design.power(),
        "theta_lower": x.design.theta,
        "theta_upper": 1.0 - x.design.theta,
    }
    pairs = [(rates.r_p1, rates.c_1e), (rates.r_p2, rates.c_2e)]
    for k, (rate, leak) in enumerate(pairs, start=1):
        if k == 2 and not shape.private2:
            continue
        values[f"sign_{k}"] = rate - leak if case.signs[k - 1] else leak - rate
    return CaseResiduals(values)


def classify_case(design: PrecoderDesign, cs: ChannelSet, pb: PowerBudget) -> CaseId:
    """Case whose sign pattern the true rates of ``design`` satisfy."""
    rates = achievable_rates(design, cs, pb)
    return CaseId.from_signs(rates.r_p1 >= rates.c_1e, rates.r_p2 >= rates.c_2e)


def auxiliaries_from_design(
    case: CaseId,
    design: PrecoderDesign,
    cs: ChannelSet,
    pb: PowerBudget,
    *,
    shape: SchemeShape = CRS_SHAPE,
    backoff: float = 0.0,
    rho_min: float = RHO_MIN,
) -> ScaIterate:
    """Set every auxiliary from the true SINRs of ``design``.

    With backoff 0 each chain holds with equality. A positive backoff moves every
    auxiliary strictly inside its chain so the iterate is strictly feasible for the
    subproblem assembled around itself.
    """
    g = compute_sinrs(design, cs, pb)
    theta = design.theta
    relay = 1.0 - theta
    relay_rate = relay * np.log2(1.0 + g.gc2_p2)
    relay_leak = relay * np.log2(1.0 + g.gce2)
    present = set(shape.aux_names())
    sinr = {"p1": g.gp1, "p2": g.gp2, "1e": g.g1e, "2e": g.g2e, "c1": g.gc1, "c2": g.gc2, "ce": g.gce1}

    lower = {"c1", "c2"}
    for k, positive in enumerate(case.signs, start=1):
        lower.add(f"p{k}" if positive else f"{k}e")

    alpha: Dict[str, float] = {}
    beta: Dict[str, float] = {}
    rho: Dict[str, float] = {}
    for name in PRIVATE_AUX + COMMON_AUX:
        if name not in present:
            alpha[name] = beta[name] = rho[name] = 0.0
            continue
        gamma = float(sinr[name])
        if backoff == 0.0:
            r = gamma
            bt = float(np.log2(1.0 + r))
            a = theta * bt
        elif name in lower:
            r = max(gamma * (1.0 - backoff), 2.0 * rho_min)
            bt = float(np.log2(1.0 + r)) - backoff
            a = theta * bt - backoff
        else:
            r = max(gamma * (1.0 + backoff) + backoff, 2.0 * rho_min)
            bt = float(np.log2(1.0 + r)) + backoff
            a = theta * bt + backoff
        rho[name], beta[name] = r, bt
        alpha[name] = a

    if "c2" in present:
        alpha["c2"] += relay_rate
    if "ce" in present:
        alpha["ce"] += relay_leak

    t_c = None
    if shape.common:
        t_c = min(alpha["c1"], alpha["c2"]) - backoff

    return ScaIterate(
        design=design,
        alpha_p=[alpha[n] for n in PRIVATE_AUX],
        alpha_c=[alpha[n] for n in COMMON_AUX],
        beta_p=[beta[n] for n in PRIVATE_AUX],
        beta_c=[beta[n] for n in COMMON_AUX],
        rho_p=[rho[n] for n in PRIVATE_AUX],
        rho_c=[rho[n] for n in COMMON_AUX],
        t_c=t_c,
    )


def with_slack(it: ScaIterate, slack: float) -> ScaIterate:
    return dataclasses.replace(it, slack=slack)


def relaxed_violation(case: CaseId, it: ScaIterate, shape: SchemeShape = CRS_SHAPE) -> float:
    """Largest violation of the sign and ordering constraints among auxiliaries."""
    gaps = []
    if shape.common:
        gaps.append(it.aux("alpha", "ce") - it.aux("alpha", "c1"))
        gaps.append(it.aux("alpha", "ce") - it.aux("alpha", "c2"))
    users = [1, 2] if shape.private2 else [1]
    for k in users:
        rate, leak = it.aux("alpha", f"p{k}"), it.aux("alpha", f"{k}e")
        gaps.append(leak - rate if case.signs[k - 1] else rate - leak)
    return float(max(gaps))
