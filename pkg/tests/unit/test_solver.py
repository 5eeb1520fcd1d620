"""Unit tests for the barrier solver."""

import dataclasses

import numpy as np
import pytest

from crsec.bench.checks import grid_optimum, oracle_programs, solver_oracles
from crsec.optimize.program import AffineBlock, ConvexProgram, ExponentialBlock, PowerBallBlock, VariableLayout
from crsec.solver.barrier import BarrierSolver, SolverConfig, SolverStatus, check_kkt, solve
from crsec.utils.exceptions import CenteringStepError, ConfigError


def _epigraph_min():
    return ConvexProgram(
        VariableLayout.scalars("t"),
        np.array([1.0]),
        (AffineBlock("t<=3", np.array([1.0]), -3.0), AffineBlock("t<=5", np.array([1.0]), -5.0)),
    )


def _ball():
    return ConvexProgram(
        VariableLayout.scalars("x", "y"),
        np.array([1.0, 1.0]),
        (PowerBallBlock.ball("ball", np.eye(2), 2.0),),
    )


def _exponential():
    return ConvexProgram(
        VariableLayout.scalars("x", "y"),
        np.array([1.0, 0.0]),
        (
            ExponentialBlock("2^x<=1+y", np.array([1.0, 0.0]), 0.0, np.array([0.0, -1.0]), -1.0),
            AffineBlock("y<=3", np.array([0.0, 1.0]), -3.0),
        ),
    )


@pytest.mark.unit
class TestSolverConfig:
    """Test solver settings validation."""

    def test_defaults(self):
        """Test default tolerances."""
        cfg = SolverConfig()
        assert cfg.kkt_tol == 1e-8
        assert cfg.barrier_reduction == 0.2

    @pytest.mark.parametrize(
        "kwargs",
        [{"kkt_tol": 0.0}, {"barrier_reduction": 1.0}, {"max_iters": 0}, {"backtracking_alpha": 0.6}],
    )
    def test_invalid(self, kwargs):
        """Test invalid settings raise ConfigError."""
        with pytest.raises(ConfigError):
            SolverConfig(**kwargs)


@pytest.mark.unit
class TestOracles:
    """Test programs with known optima."""

    def test_epigraph_of_min(self):
        """Test maximize t s.t. t <= 3, t <= 5 gives 3."""
        result = solve(_epigraph_min())
        assert result.status is SolverStatus.OPTIMAL
        assert result.x[0] == pytest.approx(3.0, abs=1e-6)

    def test_ball(self):
        """Test maximize x + y on the ball of radius sqrt(2) gives (1, 1)."""
        result = solve(_ball())
        assert result.status is SolverStatus.OPTIMAL
        np.testing.assert_allclose(result.x, [1.0, 1.0], atol=1e-6)
        assert result.objective == pytest.approx(2.0, abs=1e-6)

    def test_exponential_matches_grid(self):
        """Test 2^x <= 1 + y, y <= 3 gives x = 2, as a dense grid confirms."""
        result = solve(_exponential())
        xs = np.arange(-3.0, 3.0, 1e-4)
        feasible = xs[np.exp2(xs) <= 4.0]
        assert result.objective == pytest.approx(feasible.max(), abs=1e-4)

    def test_oracle_set_spans_families(self):
        """Test twenty programs of at most three variables use every constraint kind."""
        oracles = oracle_programs()
        kinds = {blk.kind for oracle in oracles for blk in oracle.program.blocks}

        assert len(oracles) == 20
        assert len({oracle.name for oracle in oracles}) == 20
        assert all(1 <= oracle.program.n_vars <= 3 for oracle in oracles)
        assert {1, 2, 3} <= {oracle.program.n_vars for oracle in oracles}
        assert kinds >= {"affine", "quadratic", "power-ball", "quad-over-linear", "exponential"}

    @pytest.mark.slow
    @pytest.mark.parametrize("oracle", oracle_programs(), ids=lambda o: o.name)
    def test_matches_exhaustive_grid(self, oracle):
        """Test the solver objective against a step-1e-3 lattice search of the box."""
        result = solve(oracle.program, warm=oracle.start)
        best = grid_optimum(oracle.program, oracle.bounds, step=1e-3)

        assert result.status is SolverStatus.OPTIMAL
        assert np.isfinite(best)
        assert result.objective == pytest.approx(best, abs=1e-3)
        assert result.objective == pytest.approx(oracle.expected, abs=1e-6)

    def test_grid_search_on_known_program(self):
        """Test the lattice search finds the ball optimum and rejects empty boxes."""
        oracle = next(o for o in oracle_programs() if o.name == "ball")

        assert grid_optimum(oracle.program, oracle.bounds, step=1e-2) == pytest.approx(2.0, abs=1e-12)
        assert grid_optimum(oracle.program, [(2.0, 2.5), (2.0, 2.5)], step=1e-1) == -np.inf

    def test_oracle_suite(self):
        """Test the bundled oracle suite passes."""
        passed, detail = solver_oracles()
        assert passed, detail


@pytest.mark.unit
class TestResultContract:
    """Test result invariants."""

    def test_optimal_residuals_within_tolerance(self):
        """Test status optimal implies every residual <= kkt_tol."""
        cfg = SolverConfig()
        result = solve(_ball(), cfg)
        assert result.residuals.max() <= cfg.kkt_tol

    def test_check_kkt_recomputes(self):
        """Test recomputed residuals match the reported ones."""
        result = solve(_exponential())
        again = check_kkt(_exponential(), result)
        assert again.stationarity == pytest.approx(result.residuals.stationarity, abs=1e-10)
        assert again.primal == pytest.approx(result.residuals.primal, abs=1e-10)
        assert again.complementarity == pytest.approx(result.residuals.complementarity, abs=1e-10)

    def test_perturbed_point_fails_stationarity(self):
        """Test moving the point by 1e-3 breaks stationarity."""
        program = _ball()
        result = solve(program)
        x = result.x.copy()
        x[0] += 1e-3
        perturbed = dataclasses.replace(result, x=x)
        assert check_kkt(program, perturbed).stationarity > SolverConfig().kkt_tol

    def test_primal_residual_is_violation(self):
        """Test the primal residual equals the program's max violation."""
        program = _epigraph_min()
        result = dataclasses.replace(solve(program), x=np.array([4.5]))
        assert check_kkt(program, result).primal == pytest.approx(program.max_violation(result.x), abs=1e-12)

    def test_merit_trace_nonincreasing(self):
        """Test q . x does not increase across barrier stages."""
        result = solve(_exponential())
        trace = np.array(result.merit_trace)
        assert len(trace) > 1
        assert np.all(np.diff(trace) <= 1e-9)

    def test_deterministic(self):
        """Test identical inputs give bitwise identical results."""
        a = solve(_exponential())
        b = solve(_exponential())
        assert np.array_equal(a.x, b.x)
        assert a.objective == b.objective

    def test_warm_start_used_when_interior(self):
        """Test a strictly feasible warm start is the recorded start."""
        result = solve(_ball(), warm=np.array([0.1, -0.2]))
        assert result.start_objective == pytest.approx(-0.1)


@pytest.mark.unit
class TestFailureModes:
    """Test infeasible and degenerate programs."""

    def test_infeasible_detected(self):
        """Test contradictory bounds report infeasible-detected."""
        program = ConvexProgram(
            VariableLayout.scalars("x"),
            np.array([1.0]),
            (AffineBlock("x<=-1", np.array([1.0]), 1.0), AffineBlock("x>=1", np.array([-1.0]), 1.0)),
        )
        result = solve(program)
        assert result.status is SolverStatus.INFEASIBLE
        assert not result.ok

    def test_phase_one_recovers_interior(self):
        """Test an infeasible start is moved into the interior."""
        result = solve(_ball(), warm=np.array([5.0, 5.0]))
        assert result.status is SolverStatus.OPTIMAL
        assert result.objective == pytest.approx(2.0, abs=1e-6)

    def test_warm_start_shape_checked(self):
        """Test a warm start of the wrong length raises."""
        with pytest.raises(ValueError):
            solve(_ball(), warm=np.zeros(3))

    def test_iteration_cap_demotes_status(self):
        """Test a single Newton step per stage cannot certify optimality."""
        result = BarrierSolver(_ball(), SolverConfig(max_iters=1)).solve()
        assert result.status is SolverStatus.MAX_ITERS

    def test_verbose_logs_newton_steps(self, caplog):
        """Test verbose mode logs one line per Newton step."""
        with caplog.at_level("INFO", logger="crsec.solver.barrier"):
            result = solve(_ball(), SolverConfig(verbose=True))
        lines = [r for r in caplog.records if "decrement=" in r.getMessage()]
        assert len(lines) == result.newton_steps

    def test_iteration_cap_keeps_warm_start_value(self):
        """Test an unfinished centering never returns a point worse than the warm start."""
        warm = np.array([0.99, 0.99])
        result = solve(_ball(), SolverConfig(max_iters=1), warm=warm)

        assert result.status is SolverStatus.MAX_ITERS
        assert result.start_objective == pytest.approx(1.98)
        assert result.objective >= result.start_objective
        assert _ball().max_violation(result.x) <= 0.0

    def test_centering_error_carries_last_iterate(self):
        """Test the centering failure hands back the point it stopped at."""
        solver = BarrierSolver(_ball(), SolverConfig(max_iters=1))
        x = np.array([0.0, 0.0])
        with pytest.raises(CenteringStepError) as info:
            solver._center(x, _ball().constraint_values(x), 1e-6)

        last_x, last_f = info.value.last_iterate
        assert last_x.shape == (2,)
        assert np.all(last_f < 0.0)
