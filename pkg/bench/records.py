from dataclasses import dataclass


@dataclass(frozen=True)
class BerRecord:
    """Error counts and detection time of one (detector, SNR) cell."""

    detector: str
    snr_db: float
    frames: int
    bit_errors: int
    total_bits: int
    ber: float
    symbol_errors: int
    ser: float
    wall_time_ms: float

    @classmethod
    def from_counts(
        cls,
        detector: str,
        snr_db: float,
        frames: int,
        bit_errors: int,
        total_bits: int,
        symbol_errors: int,
        total_symbols: int,
        wall_time_ms: float,
    ) -> "BerRecord":
        return cls(
            detector=detector,
            snr_db=float(snr_db),
            frames=frames,
            bit_errors=bit_errors,
            total_bits=total_bits,
            ber=bit_errors / total_bits,
            symbol_errors=symbol_errors,
            ser=symbol_errors / total_symbols,
            wall_time_ms=float(wall_time_ms),
        )


CSV_FIELDS = (
    "detector",
    "snr_db",
    "frames",
    "bit_errors",
    "total_bits",
    "ber",
    "symbol_errors",
    "ser",
    "wall_time_ms",
)
