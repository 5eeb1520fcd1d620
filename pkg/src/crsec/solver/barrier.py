"""Log-barrier interior-point solver for smooth convex programs.

The solver minimizes q . x with q = -objective, following the central path of

    F_mu(x) = q . x - mu * sum_i log(-f_i(x))

with damped Newton steps and a backtracking line search that never leaves the
strict interior. mu starts at ``barrier_init`` and shrinks by ``barrier_reduction``
until it drops below ``kkt_tol``. Starts that are not strictly feasible go through
a Phase-I that minimizes a softmax bound on max_i f_i(x).

The Newton system is factored densely with Cholesky, falling back to a symmetric
solve and then least squares. No randomness is involved, so identical inputs give
bitwise-identical results on one machine.
"""

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, lstsq, solve as dense_solve
from scipy.special import logsumexp, softmax

from ..optimize.program import ConvexProgram
from ..utils.exceptions import CenteringStepError, ConfigError, LineSearchError, PhaseOneError
from ..utils.logging import get_logger

logger = get_logger(__name__)


class SolverStatus(str, Enum):
    OPTIMAL = "optimal"
    MAX_ITERS = "max-iters"
    INFEASIBLE = "infeasible-detected"
    NUMERICAL_FAILURE = "numerical-failure"


@dataclass(frozen=True)
class SolverConfig:
    """Settings for the barrier method.

    Parameters
    ----------
    kkt_tol : float, default=1e-8
        Target for every KKT residual; also the final barrier weight.
    max_iters : int, default=100
        Newton steps allowed per centering stage.
    barrier_init : float, default=1.0
        Initial barrier weight mu.
    barrier_reduction : float, default=0.2
        Factor applied to mu after each centering stage.
    backtracking_alpha : float, default=0.01
        Sufficient-decrease fraction of the line search.
    backtracking_beta : float, default=0.5
        Step shrink factor of the line search.
    min_step : float, default=1e-14
        Steps shorter than this count as a collapse.
    ridge : float, default=1e-12
        Relative diagonal regularization of the Newton system.
    phase_one_margin : float, default=1e-9
        Phase-I stops once max f_i < -margin.
    phase_one_stages : int, default=40
        Softmax temperatures tried by Phase-I.
    verbose : bool, default=False
        Log one line per Newton step at DEBUG level.
    """

    kkt_tol: float = 1e-8
    max_iters: int = 100
    barrier_init: float = 1.0
    barrier_reduction: float = 0.2
    backtracking_alpha: float = 0.01
    backtracking_beta: float = 0.5
    min_step: float = 1e-14
    ridge: float = 1e-12
    phase_one_margin: float = 1e-9
    phase_one_stages: int = 40
    verbose: bool = False

    def __post_init__(self) -> None:
        if not self.kkt_tol > 0:
            raise ConfigError(f"kkt_tol must be positive, got {self.kkt_tol}")
        if not 0.0 < self.barrier_reduction < 1.0:
            raise ConfigError(
                f"barrier_reduction must lie in (0, 1), got {self.barrier_reduction}"
            )
        if not self.barrier_init > 0:
            raise ConfigError(f"barrier_init must be positive, got {self.barrier_init}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0.0 < self.backtracking_alpha < 0.5:
            raise ConfigError("backtracking_alpha must lie in (0, 0.5)")
        if not 0.0 < self.backtracking_beta < 1.0:
            raise ConfigError("backtracking_beta must lie in (0, 1)")


@dataclass(frozen=True)
class KktResiduals:
    stationarity: float
    primal: float
    complementarity: float

    def max(self) -> float:
        return max(self.stationarity, self.primal, self.complementarity)


@dataclass(frozen=True, eq=False)
class SolverResult:
    x: np.ndarray
    objective: float
    status: SolverStatus
    residuals: KktResiduals
    multipliers: np.ndarray
    barrier_weight: float
    iterations: int
    newton_steps: int
    wall_time: float
    merit_trace: List[float] = field(default_factory=list)
    start_objective: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.status is SolverStatus.OPTIMAL


def _kkt(program: ConvexProgram, x: np.ndarray, multipliers: np.ndarray) -> KktResiduals:
    q = -program.objective
    grad = q.copy()
    for lam, blk in zip(multipliers, program.blocks):
        if lam:
            grad = grad + lam * blk.gradient(x)
    if program.blocks:
        f = program.constraint_values(x)
        primal = float(max(0.0, np.max(f)))
        comp = float(np.max(np.abs(multipliers * f)))
    else:
        primal = comp = 0.0
    return KktResiduals(
        stationarity=float(np.max(np.abs(grad)) / (1.0 + np.max(np.abs(q)))),
        primal=primal,
        complementarity=comp,
    )


def check_kkt(program: ConvexProgram, result: SolverResult) -> KktResiduals:
    """Recompute the KKT residuals of a result from its point and multipliers."""
    return _kkt(program, result.x, result.multipliers)


class BarrierSolver:
    """Interior-point solver bound to one program; not shareable while solving."""

    def __init__(self, program: ConvexProgram, config: Optional[SolverConfig] = None):
        self.program = program
        self.config = config or SolverConfig()
        self.q = -program.objective
        self.newton_steps = 0

    # barrier pieces

    def _strict(self, x: np.ndarray) -> Tuple[bool, np.ndarray]:
        if not self.program.in_domain(x):
            return False, np.empty(0)
        f = self.program.constraint_values(x)
        return bool(np.all(f < 0.0)) and bool(np.all(np.isfinite(f))), f

    def _merit(self, x: np.ndarray, mu: float, f: np.ndarray) -> float:
        return float(self.q @ x - mu * np.sum(np.log(-f)))

    def _derivatives(self, x: np.ndarray, mu: float, f: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        n = self.program.n_vars
        g = self.q.copy()
        H = np.zeros((n, n))
        for fi, blk in zip(f, self.program.blocks):
            w = mu / (-fi)
            gi = blk.gradient(x)
            g += w * gi
            H += (w / (-fi)) * np.outer(gi, gi)
            if not blk.is_affine:
                H += w * blk.hessian(x)
        return g, H

    def _newton_direction(self, H: np.ndarray, g: np.ndarray) -> np.ndarray:
        scale = max(1.0, float(np.max(np.abs(np.diag(H))))) if H.size else 1.0
        H = H + self.config.ridge * scale * np.eye(H.shape[0])
        try:
            factor = cho_factor(H, lower=True, check_finite=False)
            return -cho_solve(factor, g, check_finite=False)
        except LinAlgError:
            logger.debug(f"{self.program.label}: Cholesky failed, using symmetric solve")
        try:
            return -dense_solve(H, g, assume_a="sym", check_finite=False)
        except (LinAlgError, ValueError):
            logger.debug(f"{self.program.label}: symmetric solve failed, using lstsq")
        return -lstsq(H, g, check_finite=False)[0]

    def _line_search(
        self, x: np.ndarray, dx: np.ndarray, mu: float, merit: float, slope: float
    ) -> Tuple[np.ndarray, np.ndarray, float, float]:
        """Backtrack until strictly feasible with sufficient decrease."""
        cfg = self.config
        step = 1.0
        # Once the predicted decrease is below rounding, accept any non-increase.
        tiny = -slope <= 1e-14 * (1.0 + abs(merit))
        while step >= cfg.min_step:
            x_new = x + step * dx
            ok, f_new = self._strict(x_new)
            if ok:
                merit_new = self._merit(x_new, mu, f_new)
                target = merit + cfg.backtracking_alpha * step * slope
                if merit_new <= target or (tiny and merit_new <= merit + 1e-15 * (1.0 + abs(merit))):
                    return x_new, f_new, merit_new, step
            step *= cfg.backtracking_beta
        raise LineSearchError(f"{self.program.label}: step collapsed below {cfg.min_step:g}")

    def _center(self, x: np.ndarray, f: np.ndarray, mu: float) -> Tuple[np.ndarray, np.ndarray]:
        """Newton iterations on F_mu.

        Raises CenteringStepError carrying the last (x, f) when ``max_iters`` steps
        do not center.
        """
        cfg = self.config
        target = 0.1 * cfg.kkt_tol
        merit = self._merit(x, mu, f)
        for _ in range(cfg.max_iters):
            g, H = self._derivatives(x, mu, f)
            stationarity = float(np.max(np.abs(g))) / (1.0 + float(np.max(np.abs(self.q))))
            dx = self._newton_direction(H, g)
            slope = float(g @ dx)
            decrement = -slope
            if stationarity <= target or decrement <= 1e-20:
                return x, f
            x, f, merit, step = self._line_search(x, dx, mu, merit, slope)
            self.newton_steps += 1
            if cfg.verbose:
                logger.info(
                    f"{self.program.label}: mu={mu:.3e} step={step:.3e} "
                    f"decrement={decrement:.3e} stationarity={stationarity:.3e}"
                )
            if decrement / 2.0 <= 1e-16 * (1.0 + abs(merit)):
                return x, f
        raise CenteringStepError(
            f"{self.program.label}: centering at mu={mu:.3e} did not settle in {cfg.max_iters} steps",
            last_iterate=(x, f),
        )

    # Phase-I

    def _phase_one(self, x0: np.ndarray) -> np.ndarray:
        """Find a point with max f_i < -margin, or raise PhaseOneError."""
        cfg = self.config
        program = self.program
        if not program.in_domain(x0):
            raise PhaseOneError(f"{program.label}: Phase-I start lies outside the constraint domains")

        x = np.array(x0, dtype=float)
        f = program.constraint_values(x)
        tau = max(1.0, float(np.max(np.abs(f))))
        n = program.n_vars

        def smooth_max(z: np.ndarray) -> float:
            if not program.in_domain(z):
                return np.inf
            fz = program.constraint_values(z)
            if not np.all(np.isfinite(fz)):
                return np.inf
            return float(tau * logsumexp(fz / tau))

        for stage in range(cfg.phase_one_stages):
            for _ in range(cfg.max_iters):
                f = program.constraint_values(x)
                if np.max(f) < -cfg.phase_one_margin:
                    logger.debug(f"{program.label}: Phase-I found an interior point at stage {stage}")
                    return x
                w = softmax(f / tau)
                grads = np.array([blk.gradient(x) for blk in program.blocks])
                g = w @ grads
                H = (grads.T * w) @ grads / tau - np.outer(g, g) / tau
                for wi, blk in zip(w, program.blocks):
                    if not blk.is_affine and wi > 1e-300:
                        H += wi * blk.hessian(x)
                H += (cfg.ridge + 1e-10) * max(1.0, float(np.max(np.abs(np.diag(H))))) * np.eye(n)
                dx = self._newton_direction(H, g)
                slope = float(g @ dx)
                if slope >= -1e-18:
                    break
                current = smooth_max(x)
                step = 1.0
                while step >= cfg.min_step:
                    candidate = x + step * dx
                    if smooth_max(candidate) <= current + cfg.backtracking_alpha * step * slope:
                        break
                    step *= cfg.backtracking_beta
                else:
                    break
                x = candidate
                self.newton_steps += 1
            tau *= 0.2
            if tau < 1e-12:
                break

        f = program.constraint_values(x)
        if np.max(f) < -cfg.phase_one_margin:
            return x
        raise PhaseOneError(
            f"{program.label}: no strictly feasible point found (max violation {np.max(f):.3e})"
        )

    # driver

    def _result(
        self,
        x: np.ndarray,
        f: np.ndarray,
        mu: float,
        status: SolverStatus,
        stages: int,
        started: float,
        trace: List[float],
        start_objective: Optional[float],
    ) -> SolverResult:
        multipliers = mu / (-f) if f.size else np.empty(0)
        residuals = _kkt(self.program, x, multipliers)
        if status is SolverStatus.OPTIMAL and residuals.max() > self.config.kkt_tol:
            status = SolverStatus.MAX_ITERS
        return SolverResult(
            x=x,
            objective=self.program.objective_value(x),
            status=status,
            residuals=residuals,
            multipliers=multipliers,
            barrier_weight=mu,
            iterations=stages,
            newton_steps=self.newton_steps,
            wall_time=time.perf_counter() - started,
            merit_trace=trace,
            start_objective=start_objective,
        )

    def solve(self, warm: Optional[np.ndarray] = None) -> SolverResult:
        cfg = self.config
        program = self.program
        started = time.perf_counter()
        self.newton_steps = 0

        x = program.layout.zeros() if warm is None else np.array(warm, dtype=float)
        if x.shape != (program.n_vars,):
            raise ValueError(f"warm start has shape {x.shape}, expected ({program.n_vars},)")

        mu = cfg.barrier_init
        ok, f = self._strict(x)
        if not ok:
            try:
                x = self._phase_one(x)
            except PhaseOneError as e:
                logger.debug(str(e))
                # Unit multipliers keep the residual report finite.
                unit = -mu * np.ones(program.n_constraints)
                return self._result(x, unit, mu, SolverStatus.INFEASIBLE, 0, started, [], None)
            f = program.constraint_values(x)

        start_objective = program.objective_value(x)
        if not program.blocks:
            return self._result(x, f, 0.0, SolverStatus.OPTIMAL, 0, started, [], start_objective)

        trace: List[float] = []
        stages = 0
        status = SolverStatus.OPTIMAL
        best = (x, f, mu)
        try:
            while True:
                x, f = self._center(x, f, mu)
                stages += 1
                trace.append(float(self.q @ x))
                if self.q @ x <= self.q @ best[0]:
                    best = (x, f, mu)
                if mu <= cfg.kkt_tol:
                    break
                mu *= cfg.barrier_reduction
        except CenteringStepError as e:
            logger.debug(str(e))
            x, f = e.last_iterate
            stages += 1
            trace.append(float(self.q @ x))
            status = SolverStatus.MAX_ITERS
        except LineSearchError as e:
            logger.debug(str(e))
            status = SolverStatus.NUMERICAL_FAILURE

        # An unfinished centering can sit far behind points already visited.
        if status is not SolverStatus.OPTIMAL and self.q @ best[0] < self.q @ x:
            logger.debug(f"{program.label}: {status.value}, returning the best strictly feasible point seen")
            x, f, mu = best

        result = self._result(x, f, mu, status, stages, started, trace, start_objective)
        logger.debug(
            f"{program.label}: {result.status.value} objective={result.objective:.9g} "
            f"stages={stages} newton={self.newton_steps}"
        )
        return result


def solve(
    program: ConvexProgram,
    config: Optional[SolverConfig] = None,
    warm: Optional[np.ndarray] = None,
) -> SolverResult:
    """Solve ``program``; ``warm`` is used directly when strictly feasible."""
    return BarrierSolver(program, config).solve(warm)


def gradient_check(program: ConvexProgram, x: np.ndarray) -> float:
    """Max relative deviation of analytic gradients and Hessian-vector products.

    Central differences with step 1e-6 * max(1, |x_j|); affine blocks are exact and
    contribute 0.
    """
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(x.shape[0])
    worst = 0.0
    for blk in program.blocks:
        if blk.is_affine:
            continue
        g = blk.gradient(x)
        for j in range(x.shape[0]):
            h = 1e-6 * max(1.0, abs(x[j]))
            e = np.zeros_like(x)
            e[j] = h
            fd = (float(blk.value(x + e)) - float(blk.value(x - e))) / (2.0 * h)
            worst = max(worst, abs(g[j] - fd) / max(1.0, abs(fd)))

        h = 1e-6 * max(1.0, float(np.max(np.abs(x))))
        hv = blk.hessian_vector(x, v)
        fd_hv = (blk.gradient(x + h * v) - blk.gradient(x - h * v)) / (2.0 * h)
        dev = np.abs(hv - fd_hv) / np.maximum(1.0, np.abs(fd_hv))
        worst = max(worst, float(np.max(dev)))
    return worst
