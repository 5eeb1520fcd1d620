"""Successive convex approximation over the four case subproblems.

Each case starts from a strictly feasible iterate (matched-filter design plus
equality-derived auxiliaries, repaired by a restoration SCA when the case signs do
not hold) and repeats assemble -> solve -> update until the surrogate objective
moves by at most ``epsilon``. The dispatcher runs the cases concurrently and keeps
the one with the best true secrecy sum rate.
"""

import dataclasses
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..channel.model import ChannelSet, PowerBudget
from ..optimize.cases import (
    CRS_SHAPE,
    CaseId,
    ScaIterate,
    SchemeShape,
    assemble,
    auxiliaries_from_design,
    original_case_residuals,
    pack,
    relaxed_violation,
    unpack,
    with_slack,
)
from ..rates.engine import PrecoderDesign, RateBundle, achievable_rates
from ..solver.barrier import SolverConfig, SolverStatus, solve
from ..storage.channel_file import channel_fingerprint
from ..utils.exceptions import CaseInfeasibleError, ConfigError, DomainError
from ..utils.logging import ScaStatsLogger, get_logger
from ..utils.validation import complex_to_pair

logger = get_logger(__name__)

MONOTONE_TOL = 1e-6
FEASIBILITY_TOL = 1e-6
INIT_SPLIT = {"p_1": 0.4, "p_2": 0.3, "p_c": 0.3}
WARM_STREAM_POWER = 1e-4
WARM_THETA_CAP = 1.0 - 1e-6
RETRY_NEWTON_FACTOR = 5


@dataclass(frozen=True)
class ScaConfig:
    """SCA loop settings."""

    epsilon: float = 1e-3
    max_outer_iters: int = 200
    solver: SolverConfig = field(default_factory=SolverConfig)
    restoration_max_iters: int = 30
    backoff: float = 1e-7
    power_margin: float = 1e-3
    case_workers: int = 4

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_outer_iters < 1:
            raise ConfigError("max_outer_iters must be >= 1")
        if self.restoration_max_iters < 1:
            raise ConfigError("restoration_max_iters must be >= 1")
        if not 0.0 <= self.backoff < 1e-2:
            raise ConfigError(f"backoff must lie in [0, 0.01), got {self.backoff}")
        if not 0.0 <= self.power_margin < 1.0:
            raise ConfigError(f"power_margin must lie in [0, 1), got {self.power_margin}")
        if self.case_workers < 1:
            raise ConfigError("case_workers must be >= 1")

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    objective: float
    solver_status: str
    newton_steps: int
    solver_ms: float


@dataclass(frozen=True, eq=False)
class CaseSolution:
    """Outcome of one case: final iterate, surrogate trace and true SSR."""

    case: CaseId
    iterate: ScaIterate
    trace: List[float]
    ssr: float
    iterations: int
    stats: List[IterationStats]
    status: str
    monotone: bool
    feasible: bool
    solver_ms: float
    source: str = "default"

    @property
    def design(self) -> PrecoderDesign:
        return self.iterate.design

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case": self.case.label,
            "status": self.status,
            "source": self.source,
            "ssr": self.ssr,
            "iterations": self.iterations,
            "restoration_steps": self.iterate.restoration_steps,
            "monotone": self.monotone,
            "feasible": self.feasible,
            "solver_ms": self.solver_ms,
            "trace": list(self.trace),
        }


@dataclass(frozen=True, eq=False)
class Solution:
    """Best case of one scheme on one channel."""

    scheme: str
    best: Optional[CaseSolution]
    cases: Dict[CaseId, Optional[CaseSolution]]
    design: PrecoderDesign
    rates: RateBundle
    channel: ChannelSet
    budget: PowerBudget
    channel_fingerprint: str
    config: Dict[str, Any]

    @property
    def ssr(self) -> float:
        return self.rates.total

    @property
    def case_id(self) -> Optional[CaseId]:
        return self.best.case if self.best else None

    @property
    def iterations(self) -> int:
        return self.best.iterations if self.best else 0

    @property
    def status(self) -> str:
        return self.best.status if self.best else "infeasible"

    @property
    def solver_ms(self) -> float:
        return sum(c.solver_ms for c in self.cases.values() if c is not None)

    def to_dict(self) -> Dict[str, Any]:
        d = self.design
        return {
            "scheme": self.scheme,
            "ssr": self.ssr,
            "case": self.case_id.label if self.case_id else None,
            "status": self.status,
            "theta": d.theta,
            "design": {
                name: [complex_to_pair(v) for v in getattr(d, name)]
                for name in ("p_c", "p_1", "p_2")
            },
            "rates": self.rates.as_dict(),
            "power": {"p_t": self.budget.p_t, "p_r": self.budget.p_r},
            "cases": {
                case.label: (sol.to_dict() if sol else {"case": case.label, "status": "infeasible"})
                for case, sol in self.cases.items()
            },
            "channel_fingerprint": self.channel_fingerprint,
            "config": self.config,
        }


def trace_upper_bound(cs: ChannelSet, pb: PowerBudget) -> float:
    """Crude bound no surrogate objective can exceed."""
    return 3.0 * float(np.log2(1.0 + max(pb.p_t, pb.p_r) * cs.max_gain() / cs.sigma2.minimum()))


def _unit(v: np.ndarray) -> Optional[np.ndarray]:
    norm = float(np.linalg.norm(v))
    return v / norm if norm > 1e-12 else None


def matched_filter_design(
    cs: ChannelSet, pb: PowerBudget, shape: SchemeShape = CRS_SHAPE, power_margin: float = 1e-3
) -> PrecoderDesign:
    """p_1 along h1, p_2 along h2, p_c along h1 + h2, split 40/30/30 of P_T(1 - margin)."""
    common = _unit(cs.h1 + cs.h2)
    directions = {
        "p_1": _unit(cs.h1),
        "p_2": _unit(cs.h2),
        "p_c": common if common is not None else _unit(cs.h1),
    }
    active = [name for name in ("p_1", "p_2", "p_c") if name in shape.streams()]
    total = sum(INIT_SPLIT[name] for name in active)
    budget = pb.p_t * (1.0 - power_margin)

    columns = {name: np.zeros(cs.n_t, dtype=complex) for name in ("p_c", "p_1", "p_2")}
    for name in active:
        direction = directions[name]
        if direction is None:
            continue
        columns[name] = direction * np.sqrt(budget * INIT_SPLIT[name] / total)

    theta = shape.theta_fixed if shape.theta_fixed is not None else 0.5
    return PrecoderDesign(theta=theta, **columns)


def _strictly_interior(case: CaseId, it: ScaIterate, cs: ChannelSet, pb: PowerBudget, shape: SchemeShape) -> bool:
    try:
        program = assemble(case, it, cs, pb, shape=shape)
    except DomainError:
        return False
    return program.is_strictly_feasible(pack(it, program.layout))


def _restore(
    case: CaseId,
    start: ScaIterate,
    cs: ChannelSet,
    pb: PowerBudget,
    cfg: ScaConfig,
    shape: SchemeShape,
    stats: Optional[ScaStatsLogger],
    label: str,
) -> ScaIterate:
    """Minimize a shared slack on the case-sign and ordering constraints."""
    current = with_slack(start, max(relaxed_violation(case, start, shape), 0.0) + 1.0)
    for step in range(1, cfg.restoration_max_iters + 1):
        program = assemble(case, current, cs, pb, shape=shape, restoration=True)
        started = time.perf_counter()
        result = solve(program, cfg.solver, pack(current, program.layout))
        if stats:
            stats.log_solver_call(f"{label}/restore", time.perf_counter() - started, result.status.value)
        if result.status in (SolverStatus.INFEASIBLE, SolverStatus.NUMERICAL_FAILURE):
            break

        relaxed = unpack(result.x, program.layout, cs.n_t)
        candidate = auxiliaries_from_design(case, relaxed.design, cs, pb, shape=shape, backoff=cfg.backoff)
        if (
            original_case_residuals(case, candidate, cs, pb, shape=shape).feasible(0.0)
            and _strictly_interior(case, candidate, cs, pb, shape)
        ):
            if stats:
                stats.log_restoration(label, step)
            return dataclasses.replace(candidate, restoration_steps=step)
        current = relaxed

    raise CaseInfeasibleError(
        f"{label}: case signs unreachable after {cfg.restoration_max_iters} restoration steps"
    )


def initialize(
    case: CaseId,
    cs: ChannelSet,
    pb: PowerBudget,
    cfg: Optional[ScaConfig] = None,
    *,
    shape: SchemeShape = CRS_SHAPE,
    stats: Optional[ScaStatsLogger] = None,
) -> ScaIterate:
    """Strictly feasible starting iterate for ``case``.

    Raises CaseInfeasibleError when restoration cannot reach the case signs.
    """
    cfg = cfg or ScaConfig()
    label = f"{shape.name}-{case.label}"
    design = matched_filter_design(cs, pb, shape, cfg.power_margin)
    it = auxiliaries_from_design(case, design, cs, pb, shape=shape, backoff=cfg.backoff)
    if (
        original_case_residuals(case, it, cs, pb, shape=shape).feasible(0.0)
        and _strictly_interior(case, it, cs, pb, shape)
    ):
        return it
    logger.debug(f"{label}: matched-filter start misses the case signs, restoring")
    return _restore(case, it, cs, pb, cfg, shape, stats, label)


def sca_solve_case(
    case: CaseId,
    init: ScaIterate,
    cs: ChannelSet,
    pb: PowerBudget,
    cfg: Optional[ScaConfig] = None,
    *,
    shape: SchemeShape = CRS_SHAPE,
    stats: Optional[ScaStatsLogger] = None,
    source: str = "default",
) -> CaseSolution:
    """Run SCA from ``init`` until |t[n] - t[n-1]| <= epsilon or the cap.

    t[0] is the surrogate value of ``init``. A subproblem that stops at its Newton
    cap is retried once with a larger cap; a point scoring below the current iterate
    is never accepted, so the current iterate is kept and the loop settles. A step
    that leaves the case region stops the loop with status "degraded" and the best
    iterate so far. Raises CaseInfeasibleError if the first subproblem has no
    strictly feasible point.
    """
    cfg = cfg or ScaConfig()
    label = f"{shape.name}-{case.label}"
    current = init
    trace: List[float] = []
    history: List[IterationStats] = []
    status = "iteration-cap"
    monotone = True
    solver_ms = 0.0
    bound = trace_upper_bound(cs, pb)

    for n in range(1, cfg.max_outer_iters + 1):
        program = assemble(case, current, cs, pb, shape=shape)
        x0 = pack(current, program.layout)
        started = time.perf_counter()
        result = solve(program, cfg.solver, x0)
        if result.status is SolverStatus.MAX_ITERS:
            retry = dataclasses.replace(cfg.solver, max_iters=cfg.solver.max_iters * RETRY_NEWTON_FACTOR)
            result = solve(program, retry, x0)
        elapsed = time.perf_counter() - started
        solver_ms += 1000.0 * elapsed
        if stats:
            stats.log_solver_call(label, elapsed, result.status.value)
        history.append(IterationStats(n, result.objective, result.status.value, result.newton_steps, 1000.0 * elapsed))

        # The previous iterate is feasible for this subproblem and scores the last trace value.
        t_start = program.objective_value(x0)
        if n == 1:
            if result.status is SolverStatus.INFEASIBLE:
                raise CaseInfeasibleError(f"{label}: first subproblem has no interior point")
            trace.append(float(t_start))
            if result.start_objective != t_start:
                logger.debug(f"{label}: solver replaced the start with a Phase-I point")

        if result.status is SolverStatus.INFEASIBLE:
            status = "degraded"
            if stats:
                stats.log_case_degraded(label, f"solver {result.status.value} at iteration {n}")
            break

        if result.objective < t_start:
            logger.debug(
                f"{label}: subproblem {result.status.value} at {result.objective:.9g} "
                f"below the current {t_start:.9g}, keeping the current iterate"
            )
            nxt, t = current, float(t_start)
        else:
            nxt = dataclasses.replace(
                unpack(result.x, program.layout, cs.n_t), restoration_steps=init.restoration_steps
            )
            t = float(result.objective)
        residuals = original_case_residuals(case, nxt, cs, pb, shape=shape)
        if not residuals.feasible(FEASIBILITY_TOL):
            status = "degraded"
            if stats:
                stats.log_case_degraded(label, f"step leaves the case region ({residuals.minimum():.2e})")
            break

        if t < trace[-1] - MONOTONE_TOL:
            monotone = False
            status = "degraded"
            if stats:
                stats.log_case_degraded(label, f"objective decreased {trace[-1]:.9g} -> {t:.9g}")
            break
        if t > bound:
            logger.warning(f"{label}: surrogate objective {t:.6g} exceeds the bound {bound:.6g}")

        trace.append(t)
        current = nxt
        if abs(trace[-1] - trace[-2]) <= cfg.epsilon:
            status = "converged"
            break

    ssr = achievable_rates(current.design, cs, pb).total
    feasible = original_case_residuals(case, current, cs, pb, shape=shape).feasible(FEASIBILITY_TOL)
    iterations = len(trace) - 1 if len(trace) > 1 else len(history)
    if stats:
        stats.log_case_solved(label, ssr, iterations)
    return CaseSolution(
        case=case,
        iterate=current,
        trace=trace,
        ssr=ssr,
        iterations=iterations,
        stats=history,
        status=status,
        monotone=monotone,
        feasible=feasible,
        solver_ms=solver_ms,
        source=source,
    )


def _fits_shape(design: PrecoderDesign, shape: SchemeShape) -> bool:
    present = shape.streams()
    for name in ("p_c", "p_1", "p_2"):
        if name not in present and np.any(getattr(design, name)):
            return False
    return shape.theta_fixed is None or design.theta == shape.theta_fixed


def warm_start_iterate(
    case: CaseId,
    design: PrecoderDesign,
    cs: ChannelSet,
    pb: PowerBudget,
    cfg: Optional[ScaConfig] = None,
    *,
    shape: SchemeShape = CRS_SHAPE,
) -> Optional[ScaIterate]:
    """Move a baseline design to a strict interior start for ``case``, or None.

    Zero streams get a faint direction in the null space of g1, so the
    eavesdropper sees none of it; theta is pulled off 1 when it is free.
    """
    cfg = cfg or ScaConfig()
    if not _fits_shape(design, shape):
        return None

    g = _unit(cs.g1)
    natural = {"p_1": cs.h1, "p_2": cs.h2, "p_c": cs.h1 + cs.h2}
    faint = WARM_STREAM_POWER * cs.sigma2.minimum() / max(1.0, cs.max_gain())
    columns = {name: np.array(getattr(design, name)) for name in ("p_c", "p_1", "p_2")}
    added = 0.0
    for name in shape.streams():
        if np.any(columns[name]):
            continue
        v = natural[name]
        if g is not None:
            v = v - g * np.vdot(g, v)
        direction = _unit(v) if _unit(v) is not None else _unit(natural[name])
        if direction is None:
            continue
        columns[name] = direction * np.sqrt(faint)
        added += faint

    theta = design.theta if shape.theta_fixed is not None else min(design.theta, WARM_THETA_CAP)
    candidate = PrecoderDesign(theta=theta, **columns)
    power = candidate.power()
    if power > pb.p_t * (1.0 - 1e-9):
        candidate = candidate.scaled(np.sqrt(pb.p_t * (1.0 - 1e-9) / power))

    it = auxiliaries_from_design(case, candidate, cs, pb, shape=shape, backoff=cfg.backoff)
    if not original_case_residuals(case, it, cs, pb, shape=shape).feasible(0.0):
        return None
    try:
        assemble(case, it, cs, pb, shape=shape)
    except DomainError:
        return None
    return it


def _empty_solution(
    cs: ChannelSet, pb: PowerBudget, cfg: ScaConfig, shape: SchemeShape, cases: Dict[CaseId, Optional[CaseSolution]]
) -> Solution:
    theta = shape.theta_fixed if shape.theta_fixed is not None else 1.0
    design = PrecoderDesign.zero(cs.n_t, theta=theta)
    return Solution(
        scheme=shape.name,
        best=None,
        cases=cases,
        design=design,
        rates=achievable_rates(design, cs, pb),
        channel=cs,
        budget=pb,
        channel_fingerprint=channel_fingerprint(cs),
        config=cfg.to_dict(),
    )


def solve_ssr(
    cs: ChannelSet,
    pb: PowerBudget,
    cfg: Optional[ScaConfig] = None,
    warm_starts: Optional[Mapping[CaseId, Sequence[Tuple[str, ScaIterate]]]] = None,
    *,
    shape: SchemeShape = CRS_SHAPE,
) -> Solution:
    """Solve every case of ``shape`` and keep the best true secrecy sum rate.

    ``warm_starts`` maps a case to extra (source, iterate) starts run after the
    default one.
    """
    cfg = cfg or ScaConfig()
    stats = ScaStatsLogger(logger)
    warm_starts = warm_starts or {}
    cases = shape.cases()

    def run_case(case: CaseId) -> Tuple[CaseId, Optional[CaseSolution]]:
        label = f"{shape.name}-{case.label}"
        starts: List[Tuple[str, ScaIterate]] = []
        try:
            starts.append(("default", initialize(case, cs, pb, cfg, shape=shape, stats=stats)))
        except CaseInfeasibleError as e:
            stats.log_case_skipped(label, str(e))
        starts.extend(warm_starts.get(case, ()))

        best: Optional[CaseSolution] = None
        for source, init in starts:
            try:
                result = sca_solve_case(case, init, cs, pb, cfg, shape=shape, stats=stats, source=source)
            except CaseInfeasibleError as e:
                logger.debug(f"{label} from {source}: {e}")
                continue
            if best is None or result.ssr > best.ssr:
                best = result
        return case, best

    workers = min(cfg.case_workers, len(cases))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="crsec-case") as pool:
            outcomes = list(pool.map(run_case, cases))
    else:
        outcomes = [run_case(case) for case in cases]

    solved: Dict[CaseId, Optional[CaseSolution]] = dict(outcomes)
    best: Optional[CaseSolution] = None
    for case in cases:
        candidate = solved[case]
        if candidate is not None and (best is None or candidate.ssr > best.ssr):
            best = candidate

    summary = stats.get_stats()
    logger.debug(
        f"{shape.name}: {summary['cases_solved']} case runs, {summary['cases_skipped']} skipped, "
        f"{summary['solver_calls']} subproblems in {summary['solver_seconds']:.2f}s"
    )
    if best is None:
        logger.info(f"{shape.name}: every case is infeasible on this channel, returning the zero design")
        return _empty_solution(cs, pb, cfg, shape, solved)

    return Solution(
        scheme=shape.name,
        best=best,
        cases=solved,
        design=best.design,
        rates=achievable_rates(best.design, cs, pb),
        channel=cs,
        budget=pb,
        channel_fingerprint=channel_fingerprint(cs),
        config=cfg.to_dict(),
    )
