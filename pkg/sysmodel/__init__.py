from .channel import (
    ChannelRealization,
    SystemConfig,
    noise_variance,
    realize,
    sample_channel,
)
from .constellation import (
    SUPPORTED_ORDERS,
    Constellation,
    UnsupportedModulationError,
    demodulate_hard,
    make_constellation,
    modulate,
)
from .metrics import (
    bit_error_rate,
    count_bit_errors,
    count_symbol_errors,
    symbol_error_rate,
)
from .rng import Rng

__all__ = [
    "SUPPORTED_ORDERS",
    "ChannelRealization",
    "Constellation",
    "Rng",
    "SystemConfig",
    "UnsupportedModulationError",
    "bit_error_rate",
    "count_bit_errors",
    "count_symbol_errors",
    "demodulate_hard",
    "make_constellation",
    "modulate",
    "noise_variance",
    "realize",
    "sample_channel",
    "symbol_error_rate",
]
