"""Linear ZF/MMSE detectors and their successive-interference-cancellation variants."""
from enum import Enum

import numpy as np

from cplx import as_matrix, as_vector, gram, hermitian, normal_rhs, solve_hpd
from sysmodel import Constellation

from .results import DetectionResult, from_indices, slice_estimate


class SicMode(Enum):
    ZF = "zf"
    MMSE = "mmse"

    @classmethod
    def to_list(cls) -> list:
        return [mode.value for mode in cls]


def _regularized_gram(H: np.ndarray, noise_var: float) -> np.ndarray:
    G = gram(H)
    if noise_var:
        G = G + noise_var * np.eye(G.shape[0])
    return G


def detect_zf(H: np.ndarray, y: np.ndarray, constellation: Constellation) -> DetectionResult:
    H, y = as_matrix(H, "H"), as_vector(y, "y")
    xhat = solve_hpd(gram(H), normal_rhs(H, y))
    return slice_estimate(xhat, constellation)


def detect_mmse(
    H: np.ndarray, y: np.ndarray, noise_var: float, constellation: Constellation
) -> DetectionResult:
    H, y = as_matrix(H, "H"), as_vector(y, "y")
    if noise_var < 0:
        raise ValueError(f"noise variance must be non-negative, got {noise_var}")
    xhat = solve_hpd(_regularized_gram(H, noise_var), normal_rhs(H, y))
    return slice_estimate(xhat, constellation)


def detect_sic(
    H: np.ndarray,
    y: np.ndarray,
    noise_var: float,
    mode: SicMode,
    constellation: Constellation,
) -> DetectionResult:
    """Ordered SIC: detect the stream with the smallest post-filter error
    variance, cancel it from the residual, repeat on the reduced channel.
    The filter is recomputed from scratch at every stage.
    """
    mode = SicMode(mode)
    H, y = as_matrix(H, "H"), as_vector(y, "y")
    if noise_var < 0:
        raise ValueError(f"noise variance must be non-negative, got {noise_var}")
    regularizer = noise_var if mode is SicMode.MMSE else 0.0

    nt = H.shape[1]
    remaining = list(range(nt))
    residual = np.array(y, dtype=np.complex128)
    xhat = np.empty(nt, dtype=np.complex128)
    indices = np.empty(nt, dtype=np.int64)

    while remaining:
        H_r = H[:, remaining]
        error_cov = solve_hpd(
            _regularized_gram(H_r, regularizer), np.eye(len(remaining), dtype=np.complex128)
        )
        best = int(np.argmin(np.real(np.diag(error_cov))))
        filtered = error_cov[best] @ (hermitian(H_r) @ residual)
        index = int(constellation.nearest(filtered))

        stream = remaining.pop(best)
        xhat[stream] = filtered
        indices[stream] = index
        residual = residual - H_r[:, best] * constellation.points[index]

    return from_indices(xhat, indices, constellation)
