"""The trainable state of an unfolded DPST detector and its JSON file format."""
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List

import numpy as np

from .serializers import FORMAT_VERSION, DpstParamsSerializer

logger = logging.getLogger(__name__)


class ParamsFileError(ValueError):
    def __init__(self, errors: Dict[str, List[str]], path=None):
        self.errors = errors
        self.path = path
        details = "; ".join(
            f"{field}: {' '.join(str(message) for message in messages)}"
            for field, messages in errors.items()
        )
        prefix = f"{path}: " if path is not None else ""
        super().__init__(f"{prefix}invalid DPST parameter file ({details})")


@dataclass(frozen=True, eq=False)
class DpstParams:
    T: int
    p: float
    gamma: np.ndarray
    theta: np.ndarray
    nt: int
    nr: int
    mod_order: int

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=np.float64)
        theta = np.array(self.theta, dtype=np.float64)
        if self.T < 1:
            raise ValueError(f"T must be at least 1, got {self.T}")
        if not 0 < self.p <= 1:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if gamma.shape != (self.T,) or theta.shape != (self.T,):
            raise ValueError(
                f"gamma and theta need {self.T} entries, got {gamma.size} and {theta.size}"
            )
        if not (np.all(np.isfinite(gamma)) and np.all(np.isfinite(theta))):
            raise ValueError("gamma and theta must be finite")
        gamma.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "theta", theta)

    def __eq__(self, other):
        if not isinstance(other, DpstParams):
            return NotImplemented
        return (
            (self.T, self.p, self.nt, self.nr, self.mod_order)
            == (other.T, other.p, other.nt, other.nr, other.mod_order)
            and np.array_equal(self.gamma, other.gamma)
            and np.array_equal(self.theta, other.theta)
        )

    def with_values(self, gamma, theta) -> "DpstParams":
        return replace(self, gamma=gamma, theta=theta)

    def to_document(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "T": self.T,
            "p": float(self.p),
            "nt": self.nt,
            "nr": self.nr,
            "mod_order": self.mod_order,
            "gamma": [float(value) for value in self.gamma],
            "theta": [float(value) for value in self.theta],
        }


def init_params(T: int, p: float, nt: int, nr: int, mod_order: int) -> DpstParams:
    """Step sizes at the asymptotic Wishart edge 1 / (sqrt(nr) + sqrt(nt))^2, unit shrinkage."""
    step = 1.0 / (np.sqrt(nr) + np.sqrt(nt)) ** 2
    return DpstParams(
        T=T,
        p=p,
        gamma=np.full(T, step),
        theta=np.ones(T),
        nt=nt,
        nr=nr,
        mod_order=mod_order,
    )


def save_params(params: DpstParams, path) -> None:
    # json writes floats with the shortest repr that reads back to the same double
    text = json.dumps(params.to_document(), indent=2) + "\n"
    Path(path).write_text(text, encoding="utf-8")
    logger.debug("wrote %d-layer DPST parameters to %s", params.T, path)


def load_params(path) -> DpstParams:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except UnicodeDecodeError as error:
        raise ParamsFileError(
            {"document": [f"not UTF-8 text: byte {error.start} cannot be decoded"]}, path
        ) from error
    except json.JSONDecodeError as error:
        raise ParamsFileError({"document": [f"not valid JSON: {error}"]}, path) from error
    if not isinstance(document, dict):
        raise ParamsFileError({"document": ["expected a JSON object"]}, path)

    serializer = DpstParamsSerializer(data=document)
    if not serializer.is_valid():
        raise ParamsFileError(serializer.errors, path)
    fields = dict(serializer.validated_data)
    fields.pop("version")
    return DpstParams(**fields)
