"""Channel realizations and their generation."""

from .model import (
    ChannelSet,
    ChannelStats,
    NoiseVariances,
    PowerBudget,
    channel_rng,
    generate_channel_set,
    order_users,
    power_budget_from_snr,
)

__all__ = [
    "ChannelSet",
    "ChannelStats",
    "NoiseVariances",
    "PowerBudget",
    "channel_rng",
    "generate_channel_set",
    "order_users",
    "power_budget_from_snr",
]
