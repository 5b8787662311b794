"""Unfolded DPST network: gradient layers with partial tanh shrinkage.

Layer ``t`` (1-based) computes

    u_t = x_{t-1} - gamma_t * H^H (H x_{t-1} - y)
    x_t = |theta_t| * (tanh(Re u_t) + j tanh(Im u_t))   if t >= p * T
    x_t = u_t                                           otherwise

starting from ``x_0 = 0``. ``H^H (H x - y)`` is the Wirtinger derivative of
``||H x - y||^2`` with respect to ``x^H``, i.e. half the real gradient
packed as ``d/dRe x + j d/dIm x``.

Arrays may carry leading batch axes: ``H`` is ``(..., nr, nt)``, ``y`` is
``(..., nr)`` and states are ``(..., nt)``. Backpropagation uses the same
packed convention for adjoints, so a real loss ``L`` changes by
``Re(conj(adjoint) . dx)`` under a perturbation ``dx``.
"""
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, List, Tuple

import numpy as np

from cplx import DimensionError, gram, hermitian, matvec, normal_rhs
from detectors.results import DetectionResult, slice_estimate
from sysmodel import Constellation

if TYPE_CHECKING:
    from .params import DpstParams


class LossMode(Enum):
    SUPERVISED = "supervised"
    RESIDUAL = "residual"

    @classmethod
    def to_list(cls) -> list:
        return [mode.value for mode in cls]


@dataclass(frozen=True, eq=False)
class DpstTrajectory:
    states: List[np.ndarray]
    pre_shrink: List[np.ndarray]
    active: Tuple[bool, ...]


@dataclass(frozen=True, eq=False)
class Gradients:
    d_gamma: np.ndarray
    d_theta: np.ndarray


def _check_shapes(H: np.ndarray, x: np.ndarray, y: np.ndarray) -> None:
    if H.shape[-1] != x.shape[-1] or H.shape[-2] != y.shape[-1]:
        raise DimensionError(
            f"channel {H.shape[-2]}x{H.shape[-1]} does not fit x of length "
            f"{x.shape[-1]} and y of length {y.shape[-1]}"
        )


def objective(H: np.ndarray, x: np.ndarray, y: np.ndarray):
    """||H x - y||^2, one value per batch entry."""
    _check_shapes(H, x, y)
    residual = matvec(H, x) - y
    return np.sum(residual.real**2 + residual.imag**2, axis=-1)


def wirtinger_grad(H: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    _check_shapes(H, x, y)
    return matvec(hermitian(H), matvec(H, x) - y)


def shrink(v: np.ndarray, theta: float) -> np.ndarray:
    return abs(theta) * (np.tanh(v.real) + 1j * np.tanh(v.imag))


def active_layers(p: float, T: int) -> List[int]:
    return [t for t in range(1, T + 1) if t >= p * T]


def _normal_equations(H: np.ndarray, y: np.ndarray, params: "DpstParams"):
    """Validated (H^H H, H^H y); every layer gradient is G x - b."""
    H = np.asarray(H, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    if H.shape[-2:] != (params.nr, params.nt):
        raise DimensionError(
            f"parameters were trained for {params.nr}x{params.nt}, channel is "
            f"{H.shape[-2]}x{H.shape[-1]}"
        )
    if y.shape[-1:] != (params.nr,):
        raise DimensionError(f"y must end in an axis of length {params.nr}, got shape {y.shape}")
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(y))):
        raise ValueError("H or y contains NaN or infinite entries")
    return gram(H), normal_rhs(H, y)


def dpst_forward(
    H: np.ndarray, y: np.ndarray, params: "DpstParams", shrinkage: bool = True
) -> DpstTrajectory:
    """Run all T layers and keep every intermediate for the adjoint pass.

    ``shrinkage=False`` turns the network into plain gradient descent with
    the learned step sizes.
    """
    G, b = _normal_equations(H, y, params)
    enabled = set(active_layers(params.p, params.T)) if shrinkage else set()
    active = tuple(t in enabled for t in range(1, params.T + 1))

    x = np.zeros(b.shape, dtype=np.complex128)
    states = [x]
    pre_shrink = []
    for layer in range(params.T):
        u = x - params.gamma[layer] * (matvec(G, x) - b)
        pre_shrink.append(u)
        x = shrink(u, params.theta[layer]) if active[layer] else u
        states.append(x)
    return DpstTrajectory(states=states, pre_shrink=pre_shrink, active=active)


def dpst_backward(
    traj: DpstTrajectory,
    H: np.ndarray,
    y: np.ndarray,
    x_true: np.ndarray,
    params: "DpstParams",
    loss_mode: LossMode = LossMode.SUPERVISED,
) -> Tuple[np.ndarray, Gradients]:
    """Loss of the final state and its exact derivatives in every gamma_t, theta_t.

    Supervised loss is ||x_T - x_true||^2, residual loss ||H x_T - y||^2.
    Returns per-batch-entry losses and gradients shaped ``(..., T)``.
    """
    loss_mode = LossMode(loss_mode)
    if len(traj.pre_shrink) != params.T or len(traj.states) != params.T + 1:
        raise ValueError(
            f"trajectory has {len(traj.pre_shrink)} layers, parameters have {params.T}"
        )
    G, b = _normal_equations(H, y, params)

    x_final = traj.states[-1]
    if loss_mode is LossMode.SUPERVISED:
        error = x_final - x_true
        loss = np.sum(error.real**2 + error.imag**2, axis=-1)
        adjoint = 2 * error
    else:
        residual = matvec(H, x_final) - y
        loss = np.sum(residual.real**2 + residual.imag**2, axis=-1)
        adjoint = 2 * (matvec(G, x_final) - b)

    batch_shape = x_final.shape[:-1]
    d_gamma = np.zeros(batch_shape + (params.T,))
    d_theta = np.zeros(batch_shape + (params.T,))
    for layer in reversed(range(params.T)):
        u = traj.pre_shrink[layer]
        if traj.active[layer]:
            theta = params.theta[layer]
            tanh_re, tanh_im = np.tanh(u.real), np.tanh(u.imag)
            d_theta[..., layer] = np.sign(theta) * np.sum(
                adjoint.real * tanh_re + adjoint.imag * tanh_im, axis=-1
            )
            adjoint = abs(theta) * (
                adjoint.real * (1 - tanh_re**2) + 1j * adjoint.imag * (1 - tanh_im**2)
            )

        step = matvec(G, traj.states[layer]) - b
        d_gamma[..., layer] = -np.sum(np.real(np.conj(adjoint) * step), axis=-1)
        if layer:
            # I - gamma G is Hermitian, so it is its own adjoint.
            adjoint = adjoint - params.gamma[layer] * matvec(G, adjoint)

    return loss, Gradients(d_gamma=d_gamma, d_theta=d_theta)


def detect_dpst(
    H: np.ndarray, y: np.ndarray, params: "DpstParams", constellation: Constellation
) -> DetectionResult:
    traj = dpst_forward(H, y, params)
    return slice_estimate(traj.states[-1], constellation)
