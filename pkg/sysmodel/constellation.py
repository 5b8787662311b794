"""Gray-mapped square QAM alphabets (BPSK for two points).

A symbol's point index is the integer spelled by its bit pattern, most
significant bit first. For square QAM the leading half of the pattern
selects the quadrature level and the trailing half the in-phase level,
each through a Gray-coded PAM ladder whose all-zero label sits on the
highest amplitude.
"""
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

SUPPORTED_ORDERS = (2, 4, 16, 64)


class UnsupportedModulationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Constellation:
    order: int
    points: np.ndarray
    bit_table: np.ndarray = field(repr=False)

    @property
    def bits_per_symbol(self) -> int:
        return self.bit_table.shape[1]

    @property
    def bit_map(self) -> Dict[Tuple[int, ...], int]:
        return {tuple(int(b) for b in row): index for index, row in enumerate(self.bit_table)}

    @property
    def min_distance(self) -> float:
        gaps = np.abs(self.points[:, None] - self.points[None, :])
        return float(np.min(gaps[~np.eye(self.order, dtype=bool)]))

    def nearest(self, values: np.ndarray) -> np.ndarray:
        """Index of the closest point for every entry; ties go to the lowest index."""
        distances = np.abs(np.asarray(values)[..., None] - self.points) ** 2
        return np.argmin(distances, axis=-1)

    def bits_of(self, indices: np.ndarray) -> np.ndarray:
        return self.bit_table[np.asarray(indices)].reshape(-1)

    def indices_of(self, bits: np.ndarray) -> np.ndarray:
        weights = 1 << np.arange(self.bits_per_symbol - 1, -1, -1)
        return np.asarray(bits, dtype=np.int64).reshape(-1, self.bits_per_symbol) @ weights


def _gray_pam_levels(bits: int) -> np.ndarray:
    count = 1 << bits
    levels = np.empty(count)
    for position in range(count):
        label = position ^ (position >> 1)
        levels[label] = (count - 1) - 2 * position
    return levels


def make_constellation(order: int) -> Constellation:
    if order not in SUPPORTED_ORDERS:
        raise UnsupportedModulationError(
            f"modulation order {order} is not supported, pick one of {SUPPORTED_ORDERS}"
        )
    bits_per_symbol = order.bit_length() - 1
    indices = np.arange(order)

    if order == 2:
        points = _gray_pam_levels(1).astype(np.complex128)
    else:
        half = bits_per_symbol // 2
        levels = _gray_pam_levels(half)
        in_phase = levels[indices & ((1 << half) - 1)]
        quadrature = levels[indices >> half]
        points = in_phase + 1j * quadrature
        points /= np.sqrt(np.mean(np.abs(points) ** 2))

    shifts = np.arange(bits_per_symbol - 1, -1, -1)
    bit_table = ((indices[:, None] >> shifts) & 1).astype(np.uint8)
    points.setflags(write=False)
    bit_table.setflags(write=False)
    return Constellation(order=order, points=points, bit_table=bit_table)


def modulate(bits: np.ndarray, constellation: Constellation) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.size % constellation.bits_per_symbol:
        raise ValueError(
            f"{bits.size} bits do not split into {constellation.bits_per_symbol}-bit symbols"
        )
    return constellation.points[constellation.indices_of(bits)]


def demodulate_hard(xhat: np.ndarray, constellation: Constellation) -> Tuple[np.ndarray, np.ndarray]:
    indices = constellation.nearest(xhat)
    return constellation.points[indices], constellation.bits_of(indices)
