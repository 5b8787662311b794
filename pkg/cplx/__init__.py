from .linalg import (
    DimensionError,
    NotPositiveDefiniteError,
    as_matrix,
    as_vector,
    gram,
    hermitian,
    matvec,
    normal_rhs,
    solve_hpd,
    spectral_bound,
)

__all__ = [
    "DimensionError",
    "NotPositiveDefiniteError",
    "as_matrix",
    "as_vector",
    "gram",
    "hermitian",
    "matvec",
    "normal_rhs",
    "solve_hpd",
    "spectral_bound",
]
