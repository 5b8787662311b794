"""Exhaustive maximum-likelihood detection.

Candidates are enumerated lexicographically over constellation point
indices, antenna 0 being the most significant digit. The first candidate
reaching the minimum residual wins, so ties are reproducible.
"""
import logging
from functools import lru_cache

import numpy as np

from cplx import as_matrix, as_vector
from sysmodel import Constellation

from .results import DetectionResult, from_indices

logger = logging.getLogger(__name__)

MAX_CANDIDATES = 1 << 24
CHUNK_SIZE = 1 << 16


class EnumerationLimitError(ValueError):
    pass


def candidate_count(order: int, nt: int) -> int:
    return order**nt


@lru_cache(maxsize=16)
def _digits(order: int, nt: int, start: int, stop: int) -> np.ndarray:
    """Point indices of candidates ``start..stop-1``, one row per antenna."""
    numbers = np.arange(start, stop, dtype=np.int64)
    powers = order ** np.arange(nt - 1, -1, -1, dtype=np.int64)
    digits = (numbers[None, :] // powers[:, None]) % order
    digits.setflags(write=False)
    return digits


def detect_ml(H: np.ndarray, y: np.ndarray, constellation: Constellation) -> DetectionResult:
    H, y = as_matrix(H, "H"), as_vector(y, "y")
    nt = H.shape[1]
    total = candidate_count(constellation.order, nt)
    if total > MAX_CANDIDATES:
        raise EnumerationLimitError(
            f"{constellation.order}^{nt} = {total} candidates exceeds the limit of {MAX_CANDIDATES}"
        )

    best_metric = np.inf
    best_digits = None
    for start in range(0, total, CHUNK_SIZE):
        digits = _digits(constellation.order, nt, start, min(start + CHUNK_SIZE, total))
        residuals = y[:, None] - H @ constellation.points[digits]
        metrics = np.sum(residuals.real**2 + residuals.imag**2, axis=0)
        position = int(np.argmin(metrics))
        # all-inf metrics (overflow) still have to pick a candidate
        if best_digits is None or metrics[position] < best_metric:
            best_metric = metrics[position]
            best_digits = digits[:, position]

    return from_indices(constellation.points[best_digits], best_digits.copy(), constellation)
