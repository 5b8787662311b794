"""Dense complex linear algebra used by the detectors and the DPST adjoint.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``
(1-D and 2-D respectively). Every public function is pure: inputs are never
modified and results are fresh arrays.
"""
import logging

import numpy as np
from scipy import linalg as sla

logger = logging.getLogger(__name__)


class DimensionError(ValueError):
    pass


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    def __init__(self, pivot: int):
        self.pivot = pivot
        super().__init__(
            f"matrix is not Hermitian positive definite: pivot {pivot} is not positive"
        )


def _as_array(value, ndim: int, name: str) -> np.ndarray:
    array = np.asarray(value, dtype=np.complex128)
    if array.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-D, got shape {array.shape}")
    if array.size == 0:
        raise DimensionError(f"{name} must not be empty")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    return array


def as_matrix(value, name: str = "matrix") -> np.ndarray:
    return _as_array(value, 2, name)


def as_vector(value, name: str = "vector") -> np.ndarray:
    return _as_array(value, 1, name)


def hermitian(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose of a matrix, or of every matrix in a stack."""
    return np.conj(np.swapaxes(a, -1, -2))


def matvec(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Matrix-vector product; leading axes of `a` and `v` broadcast as a stack."""
    if a.shape[-1] != v.shape[-1]:
        raise DimensionError(
            f"cannot multiply {a.shape[-2]}x{a.shape[-1]} matrix by vector of length {v.shape[-1]}"
        )
    if a.ndim == 2 and v.ndim == 1:
        return a @ v
    return np.matmul(a, v[..., None])[..., 0]


def gram(h: np.ndarray) -> np.ndarray:
    return hermitian(h) @ h


def normal_rhs(h: np.ndarray, y: np.ndarray) -> np.ndarray:
    return matvec(hermitian(h), y)


def _failing_pivot(a: np.ndarray) -> int:
    for order in range(1, a.shape[0] + 1):
        try:
            np.linalg.cholesky(a[:order, :order])
        except np.linalg.LinAlgError:
            return order - 1
    # LAPACK and numpy disagree only on borderline pivots; blame the last one.
    return a.shape[0] - 1


def solve_hpd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a @ x = b`` for Hermitian positive definite ``a``.

    ``b`` may be a vector or a matrix of right-hand sides. The solve goes
    through the Cholesky factor and two triangular substitutions; the
    matrix is never inverted explicitly.

    Raises NotPositiveDefiniteError naming the 0-based pivot at which the
    factorization broke down.
    """
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] != b.shape[0]:
        raise DimensionError(
            f"right-hand side has {b.shape[0]} rows, matrix has {a.shape[0]}"
        )
    try:
        factor = sla.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        pivot = _failing_pivot(a)
        logger.debug("Cholesky breakdown at pivot %d of %d", pivot, a.shape[0])
        raise NotPositiveDefiniteError(pivot) from None
    return sla.cho_solve(factor, b, check_finite=False)


def spectral_bound(a: np.ndarray, iters: int = 50, seed: int = 0) -> float:
    """Power-iteration estimate of the largest eigenvalue of a Gram matrix.

    The Rayleigh quotient of a PSD matrix never exceeds its largest
    eigenvalue, so the estimate approaches ``lambda_max`` from below.
    """
    if iters < 1:
        raise ValueError("iters must be at least 1")
    if not np.any(a):
        return 0.0

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(a.shape[0]) + 1j * rng.standard_normal(a.shape[0])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iters):
        w = a @ v
        estimate = float(np.real(np.vdot(v, w)))
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # v landed in the null space; the quotient above is exact (0).
            break
        v = w / norm
    return max(estimate, 0.0)
