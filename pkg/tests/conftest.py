"""Pytest configuration and shared fixtures."""

import copy
import tempfile
from pathlib import Path

import numpy as np
import pytest

from crsec.channel.model import ChannelSet, ChannelStats, NoiseVariances, PowerBudget, generate_channel_set
from crsec.cli.config import DEFAULT_CONFIG
from crsec.sca.driver import ScaConfig
from crsec.solver.barrier import SolverConfig


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield Path(tmp_dir)


@pytest.fixture
def unit_noise():
    return NoiseVariances()


@pytest.fixture
def toy_channel():
    """Hand-built N_T=2 channel with U1 stronger than U2."""
    return ChannelSet(
        n_t=2,
        h1=[1.2 + 0.3j, 0.4 - 0.8j],
        h2=[0.5 - 0.2j, 0.9 + 0.1j],
        g1=[0.3 + 0.1j, -0.2 + 0.4j],
        h3=0.9 - 0.4j,
        g2=0.2 + 0.3j,
    )


@pytest.fixture
def rayleigh_channel():
    """Seeded Rayleigh realization used across integration tests."""
    return generate_channel_set(7, 2, ChannelStats())


@pytest.fixture
def no_eve_channel(rayleigh_channel):
    """Same realization with both eavesdropper links removed."""
    return rayleigh_channel.eavesdropper_free()


@pytest.fixture
def budget():
    """10 dB with unit noise."""
    return PowerBudget(p_t=10.0, p_r=10.0)


@pytest.fixture
def fast_sca_config():
    """Looser SCA settings that keep integration tests short."""
    return ScaConfig(
        epsilon=1e-2,
        max_outer_iters=40,
        solver=SolverConfig(kkt_tol=1e-7),
        case_workers=1,
    )


@pytest.fixture
def test_config(temp_dir):
    """Create a test configuration."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    config["sca"]["epsilon"] = 1e-2
    config["sca"]["max_outer_iters"] = 40
    config["montecarlo"]["trials"] = 2
    config["montecarlo"]["snr_grid_db"] = [0.0, 10.0]
    config["output"]["path"] = temp_dir / "ssr.csv"
    return config


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
