"""Unit tests for channel realizations."""

import numpy as np
import pytest

from crsec.channel.model import (
    ChannelSet,
    ChannelStats,
    NoiseVariances,
    PowerBudget,
    _complex_gaussian,
    channel_rng,
    generate_channel_set,
    order_users,
    power_budget_from_snr,
)
from crsec.utils.exceptions import DomainError, InvalidDimensionError, ValidationError


@pytest.mark.unit
class TestChannelSet:
    """Test ChannelSet construction and helpers."""

    def test_vectors_are_complex_and_read_only(self, toy_channel):
        """Test stored vectors are immutable complex arrays."""
        assert toy_channel.h1.dtype == complex
        with pytest.raises(ValueError):
            toy_channel.h1[0] = 0

    def test_length_mismatch(self):
        """Test a vector of the wrong length is rejected."""
        with pytest.raises(InvalidDimensionError):
            ChannelSet(n_t=2, h1=[1, 0, 0], h2=[1, 0], g1=[0, 0], h3=1, g2=0)

    def test_single_antenna_rejected(self):
        """Test n_t < 2 is rejected."""
        with pytest.raises(InvalidDimensionError):
            ChannelSet(n_t=1, h1=[1], h2=[1], g1=[0], h3=1, g2=0)

    def test_nonpositive_noise_rejected(self):
        """Test noise variances must be positive."""
        with pytest.raises(DomainError):
            NoiseVariances(u1=0.0)

    def test_eavesdropper_free(self, toy_channel):
        """Test both eavesdropper links are zeroed."""
        cs = toy_channel.eavesdropper_free()
        assert not np.any(cs.g1)
        assert cs.g2 == 0
        assert np.array_equal(cs.h1, toy_channel.h1)

    def test_equality(self, toy_channel):
        """Test value equality compares every field."""
        same = ChannelSet(
            n_t=2, h1=toy_channel.h1, h2=toy_channel.h2, g1=toy_channel.g1,
            h3=toy_channel.h3, g2=toy_channel.g2,
        )
        assert same == toy_channel
        assert toy_channel.eavesdropper_free() != toy_channel


@pytest.mark.unit
class TestPowerBudget:
    """Test power budgets and the SNR mapping."""

    def test_snr_mapping(self):
        """Test P_T = P_R = 10^(snr/10)."""
        pb = power_budget_from_snr(20.0)
        assert pb.p_t == pytest.approx(100.0)
        assert pb.p_r == pytest.approx(100.0)

    def test_zero_power_rejected(self):
        """Test powers must be positive."""
        with pytest.raises(DomainError):
            PowerBudget(p_t=0.0, p_r=1.0)

    def test_non_numeric_rejected(self):
        """Test non-numeric power is a validation error."""
        with pytest.raises(ValidationError):
            PowerBudget(p_t="lots", p_r=1.0)


@pytest.mark.unit
class TestGeneration:
    """Test seeded Rayleigh generation."""

    def test_deterministic(self):
        """Test the same seed regenerates a bit-identical channel."""
        a = generate_channel_set(42, 2, ChannelStats())
        b = generate_channel_set(42, 2, ChannelStats())
        assert a == b

    def test_trial_index_changes_draw(self):
        """Test different trial indices give different channels."""
        a = generate_channel_set(42, 2, ChannelStats(), trial=0)
        b = generate_channel_set(42, 2, ChannelStats(), trial=1)
        assert a != b

    def test_ordering_enforced(self):
        """Test every generated channel has ||h1|| >= ||h2||."""
        for trial in range(500):
            cs = generate_channel_set(3, 2, ChannelStats(h2=2.0), trial=trial)
            assert np.linalg.norm(cs.h1) >= np.linalg.norm(cs.h2)

    def test_invalid_dimension(self):
        """Test n_t < 2 raises an invalid-dimension error."""
        with pytest.raises(InvalidDimensionError):
            generate_channel_set(0, 1, ChannelStats())

    def test_negative_seed(self):
        """Test negative seeds are rejected."""
        with pytest.raises(ValidationError):
            channel_rng(-1)

    @pytest.mark.parametrize("variance", [1.0, 0.3])
    def test_entry_variance(self, variance):
        """Test the sample second moment matches the configured variance."""
        rng = channel_rng(11)
        samples = _complex_gaussian(rng, variance, 100_000)
        assert np.mean(np.abs(samples) ** 2) == pytest.approx(variance, rel=0.02)


@pytest.mark.unit
class TestOrderUsers:
    """Test user relabelling."""

    def test_swap_when_weaker(self):
        """Test users are swapped along with their noise variances."""
        cs = ChannelSet(
            n_t=2, h1=[0, 0], h2=[1, 0], g1=[0, 0], h3=1, g2=0,
            sigma2=NoiseVariances(u1=2.0, u2=3.0),
        )
        ordered = order_users(cs)
        assert np.linalg.norm(ordered.h1) == pytest.approx(1.0)
        assert ordered.sigma2.u1 == 3.0
        assert ordered.sigma2.u2 == 2.0

    def test_unchanged_when_ordered(self):
        """Test an ordered channel is returned as is."""
        cs = ChannelSet(n_t=2, h1=[2, 0], h2=[1, 0], g1=[0, 0], h3=1, g2=0)
        assert order_users(cs) is cs
