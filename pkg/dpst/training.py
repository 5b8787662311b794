import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from sysmodel import Constellation, Rng, SystemConfig, realize

from .network import LossMode, dpst_backward, dpst_forward
from .params import DpstParams, init_params

logger = logging.getLogger(__name__)


class TrainingDivergedError(ArithmeticError):
    def __init__(self, step: int, loss: float):
        self.step = step
        self.loss = loss
        super().__init__(f"mean batch loss became {loss} at step {step}")


@dataclass(frozen=True)
class TrainConfig:
    layers: int
    p: float = 0.5
    batch_size: int = 24
    steps: int = 10000
    snr_set_db: Sequence[float] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
    learning_rate: float = 1e-3
    seed: int = 0
    loss_mode: LossMode = LossMode.SUPERVISED
    workers: int = 1
    log_every: int = 100

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("layers must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must not be negative")
        if not self.snr_set_db:
            raise ValueError("snr_set_db must not be empty")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        object.__setattr__(self, "loss_mode", LossMode(self.loss_mode))


class Adam:
    """Adam over a flat parameter vector, bias-corrected moment estimates."""

    def __init__(
        self,
        size: int,
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ):
        if lr < 0:
            raise ValueError(f"Invalid learning rate: {lr}")
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, values: np.ndarray, grads: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grads
        self.v = self.beta2 * self.v + (1 - self.beta2) * (grads * grads)
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        return values - self.lr * m_hat / (np.sqrt(v_hat) + self.epsilon)


@dataclass
class Minibatch:
    H: np.ndarray
    y: np.ndarray
    x: np.ndarray


class DpstTrainer:
    """Joint training of every gamma_t and theta_t on fresh Rayleigh minibatches.

    The trainer is the only writer of its parameters and optimizer state.
    With several workers a minibatch is cut into contiguous chunks whose
    per-sample losses and gradients are concatenated back in batch order
    before averaging, so results do not depend on the worker count.
    """

    def __init__(
        self,
        cfg: TrainConfig,
        shape: SystemConfig,
        constellation: Constellation,
        rng: Rng,
        initial: Optional[DpstParams] = None,
    ):
        self.cfg = cfg
        self.shape = shape
        self.constellation = constellation
        self.rng = rng
        self.params = initial or init_params(
            cfg.layers, cfg.p, shape.nt, shape.nr, shape.mod_order
        )
        self.optimizer = Adam(2 * self.params.T, lr=cfg.learning_rate)
        self.history: List[Tuple[int, float]] = []

    def draw_minibatch(self) -> Minibatch:
        snrs = self.rng.choice(self.cfg.snr_set_db, self.cfg.batch_size)
        realizations = [
            realize(self.shape.at_snr(float(snr)), self.constellation, self.rng) for snr in snrs
        ]
        return Minibatch(
            H=np.stack([r.H for r in realizations]),
            y=np.stack([r.y for r in realizations]),
            x=np.stack([r.x for r in realizations]),
        )

    def _evaluate_chunk(self, batch: Minibatch, rows: np.ndarray):
        H, y, x = batch.H[rows], batch.y[rows], batch.x[rows]
        traj = dpst_forward(H, y, self.params)
        loss, grads = dpst_backward(traj, H, y, x, self.params, self.cfg.loss_mode)
        return loss, grads.d_gamma, grads.d_theta

    def evaluate(self, batch: Minibatch, pool: Optional[ThreadPoolExecutor] = None):
        chunks = np.array_split(np.arange(len(batch.y)), self.cfg.workers)
        chunks = [rows for rows in chunks if rows.size]
        if pool is None:
            parts = [self._evaluate_chunk(batch, rows) for rows in chunks]
        else:
            parts = list(pool.map(lambda rows: self._evaluate_chunk(batch, rows), chunks))
        losses, d_gamma, d_theta = (np.concatenate(column) for column in zip(*parts))
        return losses, d_gamma, d_theta

    def steps(self) -> Iterator[Tuple[int, float]]:
        """Run the optimization, yielding ``(step, mean batch loss)`` after every update."""
        pool = ThreadPoolExecutor(max_workers=self.cfg.workers) if self.cfg.workers > 1 else None
        try:
            for step in range(1, self.cfg.steps + 1):
                losses, d_gamma, d_theta = self.evaluate(self.draw_minibatch(), pool)
                mean_loss = float(np.mean(losses))
                if not np.isfinite(mean_loss):
                    raise TrainingDivergedError(step, mean_loss)

                values = np.concatenate([self.params.gamma, self.params.theta])
                grads = np.concatenate([np.mean(d_gamma, axis=0), np.mean(d_theta, axis=0)])
                updated = self.optimizer.step(values, grads)
                T = self.params.T
                self.params = self.params.with_values(updated[:T], updated[T:])

                self.history.append((step, mean_loss))
                if step % self.cfg.log_every == 0 or step == self.cfg.steps:
                    logger.info("step %d/%d: mean batch loss %.6g", step, self.cfg.steps, mean_loss)
                yield step, mean_loss
        finally:
            if pool is not None:
                pool.shutdown()

    def run(self) -> DpstParams:
        for _ in self.steps():
            pass
        return self.params


def train(
    cfg: TrainConfig, shape: SystemConfig, constellation: Constellation, rng: Rng
) -> DpstParams:
    return DpstTrainer(cfg, shape, constellation, rng).run()
