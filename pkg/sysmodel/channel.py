from dataclasses import dataclass, replace

import numpy as np

from .constellation import SUPPORTED_ORDERS, Constellation, modulate
from .rng import Rng


@dataclass(frozen=True)
class SystemConfig:
    nt: int
    nr: int
    mod_order: int = 4
    snr_db: float = 0.0

    def __post_init__(self):
        if self.nt < 1:
            raise ValueError(f"nt must be at least 1, got {self.nt}")
        if self.nr < self.nt:
            raise ValueError(f"nr ({self.nr}) must not be smaller than nt ({self.nt})")
        if self.mod_order not in SUPPORTED_ORDERS:
            raise ValueError(f"mod_order must be one of {SUPPORTED_ORDERS}, got {self.mod_order}")

    def at_snr(self, snr_db: float) -> "SystemConfig":
        return replace(self, snr_db=snr_db)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One Monte-Carlo draw of ``y = H x + n``."""

    H: np.ndarray
    x: np.ndarray
    indices: np.ndarray
    bits: np.ndarray
    noise_var: float
    y: np.ndarray


def sample_channel(nr: int, nt: int, rng: Rng) -> np.ndarray:
    """Rayleigh channel: i.i.d. CN(0, 1) entries."""
    return rng.complex_normal((nr, nt))


def noise_variance(snr_db: float, nt: int) -> float:
    """Per-receive-antenna noise power for unit-energy symbols over CN(0, 1) gains."""
    return nt / 10 ** (snr_db / 10)


def realize(
    cfg: SystemConfig, constellation: Constellation, rng: Rng, noise_free: bool = False
) -> ChannelRealization:
    bits = rng.bits(cfg.nt * constellation.bits_per_symbol)
    indices = constellation.indices_of(bits)
    x = modulate(bits, constellation)
    H = sample_channel(cfg.nr, cfg.nt, rng)
    clean = H @ x
    if noise_free:
        return ChannelRealization(H=H, x=x, indices=indices, bits=bits, noise_var=0.0, y=clean)

    noise_var = noise_variance(cfg.snr_db, cfg.nt)
    y = clean + rng.complex_normal(cfg.nr, noise_var)
    return ChannelRealization(H=H, x=x, indices=indices, bits=bits, noise_var=noise_var, y=y)
