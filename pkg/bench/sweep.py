"""Monte-Carlo BER/SER sweeps over detectors and SNR points.

Every (detector, SNR) cell draws its frames from ``cell_seed(seed, snr_index)``,
so all detectors at one SNR see the same channels, symbols and noise.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from detectors import (
    DetectionResult,
    SicMode,
    detect_ml,
    detect_mmse,
    detect_sic,
    detect_zf,
)
from dpst.network import detect_dpst
from dpst.params import DpstParams, ParamsFileError, load_params
from sysmodel import (
    ChannelRealization,
    Constellation,
    Rng,
    SystemConfig,
    count_bit_errors,
    count_symbol_errors,
    make_constellation,
    realize,
)

from .records import BerRecord

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
DPST_PREFIX = "dpst:"
BATCH_BLOCK = 4096

Detector = Callable[[ChannelRealization, Constellation], DetectionResult]


@dataclass(frozen=True)
class BatchDetector:
    """Detects a stack of frames in one call.

    ``detect(H, y, constellation)`` takes ``H`` of shape ``(n, nr, nt)`` and
    ``y`` of shape ``(n, nr)`` and returns symbol indices of shape ``(n, nt)``.
    """

    detect: Callable[[np.ndarray, np.ndarray, Constellation], np.ndarray]


AnyDetector = Union[Detector, BatchDetector]

DETECTORS: Dict[str, Detector] = {
    "zf": lambda r, c: detect_zf(r.H, r.y, c),
    "mmse": lambda r, c: detect_mmse(r.H, r.y, r.noise_var, c),
    "zf-sic": lambda r, c: detect_sic(r.H, r.y, r.noise_var, SicMode.ZF, c),
    "mmse-sic": lambda r, c: detect_sic(r.H, r.y, r.noise_var, SicMode.MMSE, c),
    "ml": lambda r, c: detect_ml(r.H, r.y, c),
}


class DetectorResolutionError(ValueError):
    pass


class ShapeMismatchError(DetectorResolutionError):
    pass


class SweepError(RuntimeError):
    def __init__(self, detector: str, snr_db: float, error: Exception):
        self.detector = detector
        self.snr_db = snr_db
        super().__init__(f"detector {detector} failed at {snr_db:g} dB: {error}")


def splitmix64(value: int) -> int:
    z = (value + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def cell_seed(base_seed: int, snr_index: int) -> int:
    """Seed of every cell at the ``snr_index``-th SNR, whatever the detector.

    Appending SNR points or detectors leaves the seeds of existing cells alone.
    """
    return (base_seed & MASK64) ^ splitmix64(snr_index)


@dataclass(frozen=True)
class SweepConfig:
    system: SystemConfig
    snr_list_db: Sequence[float]
    detectors: Sequence[str]
    frames: int
    seed: int = 0
    noise_free: bool = False
    timing: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.frames < 1:
            raise ValueError(f"frames must be at least 1, got {self.frames}")
        if not self.snr_list_db:
            raise ValueError("snr_list_db must not be empty")
        if not self.detectors:
            raise ValueError("detectors must not be empty")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        object.__setattr__(self, "snr_list_db", tuple(float(snr) for snr in self.snr_list_db))
        object.__setattr__(self, "detectors", tuple(self.detectors))


class ParamStore:
    """Loads ``dpst:<file>`` parameter files once per sweep."""

    def __init__(self):
        self._loaded: Dict[str, DpstParams] = {}

    def load(self, path: str) -> DpstParams:
        if path not in self._loaded:
            try:
                self._loaded[path] = load_params(path)
            except OSError as error:
                raise DetectorResolutionError(
                    f"cannot read DPST parameters {path}: {error.strerror or error}"
                ) from error
            except ParamsFileError as error:
                raise DetectorResolutionError(str(error)) from error
            logger.debug("loaded DPST parameters from %s", path)
        return self._loaded[path]

    def detector(self, path: str, system: SystemConfig) -> BatchDetector:
        params = self.load(path)
        trained_for = (params.nt, params.nr, params.mod_order)
        if trained_for != (system.nt, system.nr, system.mod_order):
            raise ShapeMismatchError(
                f"{path} was trained for nt={params.nt} nr={params.nr} "
                f"M={params.mod_order}, sweep runs nt={system.nt} nr={system.nr} "
                f"M={system.mod_order}"
            )
        return BatchDetector(lambda H, y, c: detect_dpst(H, y, params, c).indices)


def is_known_detector(identifier: str) -> bool:
    if identifier.startswith(DPST_PREFIX):
        return bool(identifier[len(DPST_PREFIX):])
    return identifier in DETECTORS


def resolve_detector(
    identifier: str,
    system: SystemConfig,
    paramstore: ParamStore,
    extra: Optional[Mapping[str, AnyDetector]] = None,
) -> AnyDetector:
    if extra and identifier in extra:
        return extra[identifier]
    if identifier in DETECTORS:
        return DETECTORS[identifier]
    if identifier.startswith(DPST_PREFIX) and identifier[len(DPST_PREFIX):]:
        return paramstore.detector(identifier[len(DPST_PREFIX):], system)
    raise DetectorResolutionError(f"unknown detector {identifier!r}")


class SweepRunner:
    def __init__(
        self,
        cfg: SweepConfig,
        paramstore: Optional[ParamStore] = None,
        extra_detectors: Optional[Mapping[str, AnyDetector]] = None,
    ):
        self.cfg = cfg
        self.constellation = make_constellation(cfg.system.mod_order)
        paramstore = paramstore or ParamStore()
        # Resolve everything up front so a bad params file fails before any frame is drawn.
        self.detectors = [
            (identifier, resolve_detector(identifier, cfg.system, paramstore, extra_detectors))
            for identifier in cfg.detectors
        ]

    def cells(self) -> List[Tuple[str, AnyDetector, int, float]]:
        return [
            (identifier, detect, snr_index, snr_db)
            for identifier, detect in self.detectors
            for snr_index, snr_db in enumerate(self.cfg.snr_list_db)
        ]

    def run_cell(self, cell: Tuple[str, AnyDetector, int, float]) -> BerRecord:
        identifier, detect, snr_index, snr_db = cell
        system = self.cfg.system.at_snr(snr_db)
        rng = Rng(cell_seed(self.cfg.seed, snr_index))
        if isinstance(detect, BatchDetector):
            bit_errors, symbol_errors, elapsed = self._run_batched(identifier, detect, system, rng)
        else:
            bit_errors, symbol_errors, elapsed = self._run_per_frame(identifier, detect, system, rng)

        symbols = self.cfg.frames * system.nt
        record = BerRecord.from_counts(
            detector=identifier,
            snr_db=snr_db,
            frames=self.cfg.frames,
            bit_errors=bit_errors,
            total_bits=symbols * self.constellation.bits_per_symbol,
            symbol_errors=symbol_errors,
            total_symbols=symbols,
            wall_time_ms=elapsed * 1000 if self.cfg.timing else 0.0,
        )
        logger.info(
            "%s at %g dB: %d/%d bit errors, %.1f ms",
            identifier,
            snr_db,
            record.bit_errors,
            record.total_bits,
            record.wall_time_ms,
        )
        return record

    def _run_per_frame(
        self, identifier: str, detect: Detector, system: SystemConfig, rng: Rng
    ) -> Tuple[int, int, float]:
        bit_errors = symbol_errors = 0
        elapsed = 0.0
        for _ in range(self.cfg.frames):
            realization = realize(system, self.constellation, rng, self.cfg.noise_free)
            started = time.perf_counter()
            try:
                result = detect(realization, self.constellation)
            except Exception as error:
                raise SweepError(identifier, system.snr_db, error) from error
            elapsed += time.perf_counter() - started
            bit_errors += count_bit_errors(result.bits, realization.bits)
            symbol_errors += count_symbol_errors(result.indices, realization.indices)
        return bit_errors, symbol_errors, elapsed

    def _run_batched(
        self, identifier: str, detect: BatchDetector, system: SystemConfig, rng: Rng
    ) -> Tuple[int, int, float]:
        """Same frames as the per-frame path, detected ``BATCH_BLOCK`` at a time."""
        bit_errors = symbol_errors = 0
        elapsed = 0.0
        for start in range(0, self.cfg.frames, BATCH_BLOCK):
            count = min(BATCH_BLOCK, self.cfg.frames - start)
            block = [realize(system, self.constellation, rng, self.cfg.noise_free) for _ in range(count)]
            H = np.stack([r.H for r in block])
            y = np.stack([r.y for r in block])
            started = time.perf_counter()
            try:
                indices = np.asarray(detect.detect(H, y, self.constellation))
            except Exception as error:
                raise SweepError(identifier, system.snr_db, error) from error
            elapsed += time.perf_counter() - started
            bits = self.constellation.bits_of(indices)
            bit_errors += count_bit_errors(bits, np.concatenate([r.bits for r in block]))
            symbol_errors += count_symbol_errors(
                indices.reshape(-1), np.concatenate([r.indices for r in block])
            )
        return bit_errors, symbol_errors, elapsed

    def run(self, on_record: Optional[Callable[[BerRecord], None]] = None) -> List[BerRecord]:
        cells = self.cells()
        logger.info("sweeping %d cells on %d worker(s)", len(cells), self.cfg.workers)
        records = []
        with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
            for record in pool.map(self.run_cell, cells):
                records.append(record)
                if on_record is not None:
                    on_record(record)
        return records


def run_sweep(
    cfg: SweepConfig,
    paramstore: Optional[ParamStore] = None,
    extra_detectors: Optional[Mapping[str, AnyDetector]] = None,
    on_record: Optional[Callable[[BerRecord], None]] = None,
) -> List[BerRecord]:
    """One record per (detector, SNR), detector-major in the order of ``cfg``."""
    return SweepRunner(cfg, paramstore, extra_detectors).run(on_record)
