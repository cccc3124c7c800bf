"""Linear precoding for downlink cooperative MIMO networks.

Thin wrapper around the compiled core: zero-interference (block
diagonalization style) precoding under per-base-station power constraints,
and the improved precoder obtained by minimizing a common power factor under
the achieved rate targets and rescaling the result.
"""

from ._core import (
    BDSolution,
    ChannelSet,
    EnhanceSolution,
    NetworkConfig,
    __version__,
    bd_solve,
    covariance_to_precoder,
    enhance,
    leakage_norm,
    make_channel_set,
    per_bs_power,
    sample_channels,
    snr_boost_db,
    sum_rate_nats,
    user_rate,
)

__all__ = [
    "BDSolution",
    "ChannelSet",
    "EnhanceSolution",
    "NetworkConfig",
    "__version__",
    "bd_solve",
    "covariance_to_precoder",
    "enhance",
    "leakage_norm",
    "make_channel_set",
    "per_bs_power",
    "sample_channels",
    "snr_boost_db",
    "sum_rate_nats",
    "user_rate",
]
