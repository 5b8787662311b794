from dataclasses import dataclass

import numpy as np

from sysmodel import Constellation


@dataclass(frozen=True, eq=False)
class DetectionResult:
    xhat_soft: np.ndarray
    indices: np.ndarray
    symbols: np.ndarray
    bits: np.ndarray


def slice_estimate(xhat_soft: np.ndarray, constellation: Constellation) -> DetectionResult:
    """Hard decision on a soft estimate, entry by entry."""
    indices = constellation.nearest(xhat_soft)
    return from_indices(xhat_soft, indices, constellation)


def from_indices(
    xhat_soft: np.ndarray, indices: np.ndarray, constellation: Constellation
) -> DetectionResult:
    return DetectionResult(
        xhat_soft=xhat_soft,
        indices=indices,
        symbols=constellation.points[indices],
        bits=constellation.bits_of(indices),
    )
