"""Classifier families ``Z(theta) = f_theta(X)`` and their outputs."""
import logging
from abc import abstractmethod
from dataclasses import dataclass
from typing import Dict, Union

import numpy as np
from sklearn.metrics import accuracy_score

from robust_loss_lab.core.base import Base, JsonType
from robust_loss_lab.core.errors import ConfigError, DomainError, ShapeError
from robust_loss_lab.dataset.base import Dataset
from robust_loss_lab.regularizers.reduced import embed

log = logging.getLogger(__name__)

METRICS = {
    "accuracy": accuracy_score,
}


@dataclass
class ModelOutput:
    """The outputs of a model over a dataset.

    Attributes:
        Z: An ``n x C`` logit matrix, or ``n x (C-1)`` in reduced mode.
        reduced: Whether Z holds reduced coordinates.
    """
    Z: np.ndarray
    reduced: bool = False

    def __post_init__(self):
        self.Z = np.asarray(self.Z, dtype=float)
        if self.Z.ndim != 2:
            raise ShapeError(f"Outputs must be an n x k matrix, got shape {self.Z.shape}.")
        if not np.all(np.isfinite(self.Z)):
            raise DomainError("Model outputs must be finite.")

    def logits(self) -> np.ndarray:
        """Full C-dimensional logits (reduced outputs get a zero last logit)."""
        return embed(self.Z) if self.reduced else self.Z


def predict(output: ModelOutput) -> np.ndarray:
    """Per-row argmax of the logits; ties go to the smallest index."""
    return np.argmax(output.logits(), axis=1)


def norm_L2(output: Union[ModelOutput, np.ndarray]) -> float:
    """``sqrt(E ||Z||^2)`` over the rows."""
    Z = output.Z if isinstance(output, ModelOutput) else np.asarray(output, dtype=float)
    return float(np.sqrt(np.mean(np.sum(Z * Z, axis=1))))


class BaseModel(Base):
    """
    Provides an interface for a parametric family ``f_theta`` with a flat
    parameter vector, reverse-mode gradients and per-sample Jacobians.

    Models are immutable values: ``with_theta`` and ``scale`` return new models.
    """
    arch: str = None

    def __init__(self, n_outputs: int, reduced: bool = False):
        if n_outputs < 1:
            raise ConfigError(f"A model needs at least one output, got {n_outputs}.")
        self.n_outputs = int(n_outputs)
        self.reduced = reduced

    @property
    @abstractmethod
    def theta(self) -> np.ndarray:
        """The flat parameter vector (a copy)."""
        raise NotImplementedError

    @property
    def n_params(self) -> int:
        return self.theta.size

    @abstractmethod
    def with_theta(self, theta: np.ndarray) -> "BaseModel":
        raise NotImplementedError

    @abstractmethod
    def scale(self, t: float) -> "BaseModel":
        """A model whose outputs are exactly ``t`` times these outputs."""
        raise NotImplementedError

    @abstractmethod
    def forward_array(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def backward(self, X: np.ndarray, G: np.ndarray) -> np.ndarray:
        """Pulls an ``n x k`` output cotangent back to a parameter gradient."""
        raise NotImplementedError

    @abstractmethod
    def jacobian(self, X: np.ndarray) -> np.ndarray:
        """Per-sample output Jacobians, an ``n x k x m`` array."""
        raise NotImplementedError

    def _check_theta(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float).ravel()
        if theta.size != self.n_params:
            raise ShapeError(f"{self.arch} model has {self.n_params} parameters, got {theta.size}.")
        return theta

    def forward(self, dataset: Union[Dataset, np.ndarray]) -> ModelOutput:
        X = dataset.features if isinstance(dataset, Dataset) else dataset
        return ModelOutput(self.forward_array(X), reduced=self.reduced)

    def predict(self, dataset: Union[Dataset, np.ndarray]) -> np.ndarray:
        return predict(self.forward(dataset))

    def evaluate(self, dataset: Dataset) -> Dict[str, float]:
        yhat = self.predict(dataset)
        metrics = {k: float(fn(dataset.labels, yhat)) for k, fn in METRICS.items()}
        log.info(metrics)
        return metrics

    @classmethod
    def from_dict(cls, data: JsonType) -> "BaseModel":
        from robust_loss_lab.models.linear import LinearModel
        from robust_loss_lab.models.mlp import MLP2

        archs = {LinearModel.arch: LinearModel, MLP2.arch: MLP2}
        if data.get("arch") not in archs:
            raise ConfigError(f"Unknown model arch {data.get('arch')!r}.")
        return archs[data["arch"]]._from_dict(data)


def forward(model: BaseModel, dataset: Dataset) -> ModelOutput:
    """``Z(theta) = f_theta(X)`` over a dataset."""
    return model.forward(dataset)


def agreement(a: np.ndarray, b: np.ndarray) -> float:
    """The share of samples on which two prediction vectors agree."""
    return float(np.mean(np.asarray(a) == np.asarray(b)))
