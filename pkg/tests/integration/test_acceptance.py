"""End-to-end properties on seeded channel sweeps."""

import asyncio

import numpy as np
import pytest

from crsec.bench.checks import AUDIT_GAP, global_audit, real_channel_set, restricted_grid_best
from crsec.bench.montecarlo import MonteCarloConfig, run_montecarlo
from crsec.channel.model import ChannelStats, generate_channel_set, power_budget_from_snr
from crsec.optimize.cases import CaseId
from crsec.rates.engine import secrecy_sum_rate
from crsec.sca.driver import MONOTONE_TOL, ScaConfig, initialize, solve_ssr
from crsec.sca.schemes import SCHEME_ORDER, SchemeId, solve_scheme
from crsec.utils.exceptions import CaseInfeasibleError

SWEEP_SEED = 5
SWEEP = [(n_t, snr, trial) for n_t in (2, 4) for snr in (10.0, 20.0) for trial in range(13)]
PROFILES = {"equal": ChannelStats(), "weak-user-2": ChannelStats(h1=1.0, h2=0.3)}
FIGURE_GRID = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)


@pytest.fixture(scope="module")
def profile_reports():
    reports = {}
    for name, stats in PROFILES.items():
        cfg = MonteCarloConfig(trials=20, snr_grid_db=FIGURE_GRID, n_t=2, stats=stats, seed=0, workers=4)
        reports[name] = asyncio.run(run_montecarlo(cfg))
    return reports


def _summary(report, scheme):
    return sorted((row for row in report.summary if row.scheme is scheme), key=lambda row: row.snr_db)


@pytest.mark.integration
@pytest.mark.slow
class TestChannelSweep:
    """Test every scheme and case on 52 seeded channels."""

    @pytest.mark.parametrize("n_t,snr_db,trial", SWEEP, ids=lambda v: str(v))
    def test_traces_converge_and_crs_nests_baselines(self, n_t, snr_db, trial):
        """Test monotone traces, feasible iterates and CRS at least every baseline."""
        cs = generate_channel_set(SWEEP_SEED, n_t, ChannelStats(), trial=trial)
        pb = power_budget_from_snr(snr_db)
        cfg = ScaConfig()

        baselines = [solve_scheme(s, cs, pb, cfg) for s in SCHEME_ORDER if s is not SchemeId.CRS]
        crs = solve_scheme(SchemeId.CRS, cs, pb, cfg, baselines)

        for sol in baselines + [crs]:
            for case, run in sol.cases.items():
                if run is None:
                    continue
                where = f"{sol.scheme} {case.label}"
                assert np.all(np.diff(run.trace) >= -MONOTONE_TOL), where
                assert run.monotone, where
                assert run.feasible, where
                assert run.status == "converged", where
                assert abs(run.trace[-1] - run.trace[-2]) <= cfg.epsilon, where
                assert run.iterations <= cfg.max_outer_iters, where
        for sol in baselines:
            assert crs.ssr >= sol.ssr - 1e-3, sol.scheme


@pytest.mark.integration
class TestWorkedExamples:
    """Test small end-to-end cases with known outcomes."""

    @pytest.mark.slow
    def test_case1_starts_within_ten_restoration_steps(self):
        """Test at least 45 of 50 channels at 20 dB give a Case1 start in 10 restoration steps."""
        pb = power_budget_from_snr(20.0)
        cfg = ScaConfig(restoration_max_iters=10)
        started = 0
        for trial in range(50):
            cs = generate_channel_set(0, 2, ChannelStats(), trial=trial)
            try:
                it = initialize(CaseId.CASE1, cs, pb, cfg)
            except CaseInfeasibleError:
                continue
            assert it.restoration_steps <= 10
            started += 1
        assert started >= 45

    def test_no_eavesdropper_picks_case1(self, no_eve_channel, budget, fast_sca_config):
        """Test zero eavesdropper links make Case1 the best case."""
        sol = solve_ssr(no_eve_channel, budget, fast_sca_config)

        assert sol.case_id is CaseId.CASE1
        assert sol.ssr == pytest.approx(secrecy_sum_rate(sol.design, no_eve_channel, budget), abs=1e-9)
        assert sol.ssr > 0.0


@pytest.mark.integration
@pytest.mark.slow
class TestSnrTrends:
    """Test the averaged rate curves of both variance profiles."""

    @pytest.mark.parametrize("profile", list(PROFILES))
    def test_means_grow_with_snr(self, profile_reports, profile):
        """Test every scheme's mean is nondecreasing in SNR within one standard error."""
        report = profile_reports[profile]
        for scheme in SCHEME_ORDER:
            rows = _summary(report, scheme)
            assert [row.snr_db for row in rows] == list(FIGURE_GRID)
            for lo, hi in zip(rows, rows[1:]):
                assert hi.mean_ssr >= lo.mean_ssr - max(lo.stderr, hi.stderr), (scheme.value, hi.snr_db)

    @pytest.mark.parametrize("profile", list(PROFILES))
    def test_crs_mean_above_cnoma_and_mulp(self, profile_reports, profile):
        """Test the CRS mean reaches the C-NOMA and MU-LP means at every SNR point."""
        report = profile_reports[profile]
        for snr in FIGURE_GRID:
            crs = report.mean(snr, SchemeId.CRS)
            assert crs >= report.mean(snr, SchemeId.CNOMA) - 1e-3, snr
            assert crs >= report.mean(snr, SchemeId.MULP) - 1e-3, snr

    def test_weak_second_user_narrows_cnoma_gap(self, profile_reports):
        """Test the CRS over C-NOMA gap at 20 dB shrinks when user 2 is weaker."""
        gaps = {
            name: report.mean(20.0, SchemeId.CRS) - report.mean(20.0, SchemeId.CNOMA)
            for name, report in profile_reports.items()
        }
        assert gaps["weak-user-2"] < gaps["equal"]


@pytest.mark.integration
class TestGlobalAudit:
    """Test CRS against a restricted design grid."""

    def test_real_channel_keeps_ordering(self):
        """Test real-valued channels have no imaginary part and keep the user order."""
        cs = real_channel_set(0, 3)
        for v in (cs.h1, cs.h2, cs.g1):
            assert not np.any(v.imag)
        assert np.linalg.norm(cs.h1) >= np.linalg.norm(cs.h2)

    def test_grid_best_is_a_rate(self):
        """Test the grid optimum is a nonnegative rate and grows with a finer grid."""
        cs = real_channel_set(0, 0)
        pb = power_budget_from_snr(10.0)
        coarse = restricted_grid_best(cs, pb, steps=4)
        fine = restricted_grid_best(cs, pb, steps=8)

        assert coarse >= 0.0
        assert fine >= coarse

    @pytest.mark.slow
    def test_crs_near_grid_best(self, caplog):
        """Test CRS comes within the audit gap of the grid on at least 80% of 20 channels."""
        with caplog.at_level("WARNING", logger="crsec.bench.checks"):
            passed, detail = global_audit(channels=20, seed=0)
        misses = [r for r in caplog.records if "global audit miss" in r.getMessage()]

        assert passed, detail
        assert len(misses) <= 4
        assert all("seed=0 trial=" in r.getMessage() for r in misses)
        assert f"{AUDIT_GAP:g}" in detail

    def test_miss_is_logged_with_seed(self, mocker, caplog):
        """Test a channel where CRS trails the grid is reported with its seed and trial."""
        mocker.patch("crsec.bench.checks.restricted_grid_best", return_value=100.0)
        mocker.patch("crsec.bench.checks.solve_scheme", return_value=mocker.Mock(ssr=1.0))
        with caplog.at_level("WARNING", logger="crsec.bench.checks"):
            passed, detail = global_audit(channels=2, seed=9)

        assert not passed
        assert detail.startswith("0/2")
        assert sum("seed=9 trial=" in r.getMessage() for r in caplog.records) == 2
