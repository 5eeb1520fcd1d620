"""Integration tests for the SCA driver on full case subproblems."""

import dataclasses

import numpy as np
import pytest

from crsec.channel.model import ChannelStats, generate_channel_set, power_budget_from_snr
from crsec.optimize.cases import CaseId, original_case_residuals
from crsec.rates.engine import secrecy_sum_rate
from crsec.sca.driver import (
    FEASIBILITY_TOL,
    MONOTONE_TOL,
    RETRY_NEWTON_FACTOR,
    ScaConfig,
    initialize,
    sca_solve_case,
    solve_ssr,
    trace_upper_bound,
)
from crsec.solver.barrier import SolverStatus, solve
from crsec.storage.solution_file import load_solution_dict, save_solution
from crsec.utils.exceptions import CaseInfeasibleError, ConfigError


@pytest.mark.integration
class TestCaseLoop:
    """Test one case from initialization to convergence."""

    def test_no_eavesdropper_starts_without_restoration(self, no_eve_channel, budget, fast_sca_config):
        """Test the matched-filter start is already interior for Case1."""
        it = initialize(CaseId.CASE1, no_eve_channel, budget, fast_sca_config)
        assert it.restoration_steps == 0

    def test_trace_is_monotone(self, rayleigh_channel, budget, fast_sca_config):
        """Test the surrogate objective never decreases."""
        it = initialize(CaseId.CASE1, rayleigh_channel.eavesdropper_free(), budget, fast_sca_config)
        sol = sca_solve_case(CaseId.CASE1, it, rayleigh_channel.eavesdropper_free(), budget, fast_sca_config)

        trace = np.array(sol.trace)
        assert sol.monotone
        assert np.all(np.diff(trace) >= -MONOTONE_TOL)
        assert sol.status in ("converged", "iteration-cap")
        assert sol.iterations == len(trace) - 1

    def test_final_iterate_is_feasible(self, no_eve_channel, budget, fast_sca_config):
        """Test the returned point satisfies the original case constraints."""
        it = initialize(CaseId.CASE1, no_eve_channel, budget, fast_sca_config)
        sol = sca_solve_case(CaseId.CASE1, it, no_eve_channel, budget, fast_sca_config)

        assert sol.feasible
        assert original_case_residuals(CaseId.CASE1, sol.iterate, no_eve_channel, budget).feasible(FEASIBILITY_TOL)
        assert sol.design.power() <= budget.p_t * (1 + 1e-6)
        assert 1e-3 - 1e-9 <= sol.design.theta <= 1.0

    def test_surrogate_below_true_rate(self, no_eve_channel, budget, fast_sca_config):
        """Test the last surrogate value never exceeds the true SSR or the crude bound."""
        it = initialize(CaseId.CASE1, no_eve_channel, budget, fast_sca_config)
        sol = sca_solve_case(CaseId.CASE1, it, no_eve_channel, budget, fast_sca_config)

        assert sol.trace[-1] <= sol.ssr + 1e-6
        assert sol.trace[-1] <= trace_upper_bound(no_eve_channel, budget)

    def test_restart_from_converged_point(self, no_eve_channel, budget, fast_sca_config):
        """Test restarting at a converged iterate stops almost at once."""
        it = initialize(CaseId.CASE1, no_eve_channel, budget, fast_sca_config)
        first = sca_solve_case(CaseId.CASE1, it, no_eve_channel, budget, fast_sca_config)
        assert first.status == "converged"

        again = sca_solve_case(CaseId.CASE1, first.iterate, no_eve_channel, budget, fast_sca_config)
        assert again.status == "converged"
        assert again.iterations <= 2
        assert again.ssr >= first.ssr - 1e-6

    def test_single_iteration_cap(self, no_eve_channel, budget, fast_sca_config):
        """Test max_outer_iters = 1 stops at the cap."""
        cfg = dataclasses.replace(fast_sca_config, epsilon=1e-12, max_outer_iters=1)
        it = initialize(CaseId.CASE1, no_eve_channel, budget, cfg)
        sol = sca_solve_case(CaseId.CASE1, it, no_eve_channel, budget, cfg)
        assert sol.status in ("iteration-cap", "converged")
        assert len(sol.stats) == 1

    def test_trace_starts_at_initial_value(self, no_eve_channel, budget, fast_sca_config):
        """Test t[0] is the surrogate value of the starting iterate."""
        it = initialize(CaseId.CASE1, no_eve_channel, budget, fast_sca_config)
        sol = sca_solve_case(CaseId.CASE1, it, no_eve_channel, budget, fast_sca_config)

        assert sol.trace[0] <= sol.trace[1] + MONOTONE_TOL
        assert sol.iterations == len(sol.trace) - 1

    def test_regressing_subproblem_keeps_current_iterate(self, no_eve_channel, budget, fast_sca_config, mocker):
        """Test a subproblem result below the current value is refused and the loop settles."""
        cfg = dataclasses.replace(fast_sca_config, epsilon=1e-12)
        programs = []

        def worse_after_first(program, config=None, warm=None):
            programs.append(program)
            real = solve(program, config, warm)
            if program is programs[0]:
                return real
            return dataclasses.replace(real, status=SolverStatus.NUMERICAL_FAILURE, objective=real.objective - 1.0)

        it = initialize(CaseId.CASE1, no_eve_channel, budget, cfg)
        mocker.patch("crsec.sca.driver.solve", side_effect=worse_after_first)
        sol = sca_solve_case(CaseId.CASE1, it, no_eve_channel, budget, cfg)

        assert sol.monotone
        assert sol.feasible
        assert sol.status == "converged"
        assert sol.trace[-1] == sol.trace[-2]
        assert sol.iterations == 2

    def test_newton_cap_retries_with_larger_budget(self, no_eve_channel, budget, fast_sca_config, mocker):
        """Test a subproblem stopped at its Newton cap is solved again with a larger cap."""
        cfg = dataclasses.replace(fast_sca_config, max_outer_iters=1)
        configs = []

        def capped_first(program, config=None, warm=None):
            configs.append(config)
            real = solve(program, config, warm)
            if len(configs) == 1:
                return dataclasses.replace(real, status=SolverStatus.MAX_ITERS)
            return real

        it = initialize(CaseId.CASE1, no_eve_channel, budget, cfg)
        mocker.patch("crsec.sca.driver.solve", side_effect=capped_first)
        sca_solve_case(CaseId.CASE1, it, no_eve_channel, budget, cfg)

        assert len(configs) == 2
        assert configs[1].max_iters == cfg.solver.max_iters * RETRY_NEWTON_FACTOR

    @pytest.mark.slow
    def test_default_settings_converge_on_stalling_channel(self):
        """Test the Case3 run that used to stall at the Newton cap converges monotonically."""
        cs = generate_channel_set(5, 2, ChannelStats(), trial=0)
        pb = power_budget_from_snr(20.0)
        cfg = ScaConfig()
        it = initialize(CaseId.CASE3, cs, pb, cfg)
        sol = sca_solve_case(CaseId.CASE3, it, cs, pb, cfg)

        assert sol.monotone
        assert sol.feasible
        assert sol.status == "converged"
        assert abs(sol.trace[-1] - sol.trace[-2]) <= cfg.epsilon
        assert sol.iterations <= cfg.max_outer_iters

    def test_bad_config(self):
        """Test SCA settings validation."""
        with pytest.raises(ConfigError):
            ScaConfig(epsilon=0.0)
        with pytest.raises(ConfigError):
            ScaConfig(case_workers=0)


@pytest.mark.integration
class TestSolveSsr:
    """Test the four-case driver."""

    def test_solution_matches_rate_engine(self, rayleigh_channel, budget, fast_sca_config):
        """Test the reported SSR is the exact rate of the returned design."""
        sol = solve_ssr(rayleigh_channel, budget, fast_sca_config)

        assert sol.ssr == pytest.approx(secrecy_sum_rate(sol.design, rayleigh_channel, budget), abs=1e-9)
        assert sol.ssr >= 0.0
        assert sol.design.power() <= budget.p_t * (1 + 1e-6)

    def test_best_case_is_argmax(self, rayleigh_channel, budget, fast_sca_config):
        """Test the winning case has the largest true SSR."""
        sol = solve_ssr(rayleigh_channel, budget, fast_sca_config)

        solved = [c for c in sol.cases.values() if c is not None]
        assert solved
        assert sol.best.ssr == max(c.ssr for c in solved)
        assert set(sol.cases) == set(CaseId)

    def test_parallel_cases_match_serial(self, rayleigh_channel, budget, fast_sca_config):
        """Test case workers do not change the result."""
        serial = solve_ssr(rayleigh_channel, budget, fast_sca_config)
        parallel = solve_ssr(rayleigh_channel, budget, dataclasses.replace(fast_sca_config, case_workers=4))

        assert parallel.case_id is serial.case_id
        assert parallel.ssr == serial.ssr

    def test_all_cases_infeasible(self, toy_channel, budget, fast_sca_config, mocker):
        """Test the zero design is returned when no case can start."""
        mocker.patch("crsec.sca.driver.initialize", side_effect=CaseInfeasibleError("no interior"))

        sol = solve_ssr(toy_channel, budget, fast_sca_config)

        assert sol.best is None
        assert sol.ssr == 0.0
        assert sol.status == "infeasible"
        assert sol.case_id is None
        assert not np.any(sol.design.p_c)
        assert all(c is None for c in sol.cases.values())

    def test_solution_file(self, no_eve_channel, budget, fast_sca_config, temp_dir):
        """Test the solution file records the design, rates and case runs."""
        sol = solve_ssr(no_eve_channel, budget, fast_sca_config)
        path = save_solution(sol, temp_dir / "out" / "solution.json")
        data = load_solution_dict(path)

        assert data["scheme"] == "CRS"
        assert data["ssr"] == sol.ssr
        assert data["case"] == sol.case_id.label
        assert data["theta"] == sol.design.theta
        assert len(data["design"]["p_c"]) == 2
        assert set(data["cases"]) == {"Case1", "Case2", "Case3", "Case4"}
        assert data["config"]["epsilon"] == fast_sca_config.epsilon
        assert data["power"] == {"p_t": budget.p_t, "p_r": budget.p_r}
