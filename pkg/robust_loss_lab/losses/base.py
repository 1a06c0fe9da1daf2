"""The Loss interface: a loss ``l(z, y)`` as a function of logits."""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from robust_loss_lab.core.errors import DomainError, ShapeError
from robust_loss_lab.dataset.encoding import check_labels


@dataclass
class LossEval:
    """The value and logit-gradient of a loss at one ``(z, y)``."""
    value: float
    grad: np.ndarray


class Loss(ABC):
    """
    A base class for losses evaluated on logits ``z in R^C``.

    Losses defined on the simplex compose with softmax internally, so every
    loss shares one input convention. Subclasses implement the batched
    ``_value_grad``; inputs are validated once here.
    """
    name: str = None                    #: Registry name used in config strings.
    symmetric_by_construction = False   #: Whether sum_y l(z, y) is constant in z.

    def value_grad(self, Z: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Per-row values and gradients.

        Args:
            Z: An ``n x C`` matrix of logits.
            y: A length-n vector of class indices.

        Returns:
            A length-n vector of values and the ``n x C`` matrix of gradients.
        """
        Z = np.asarray(Z, dtype=float)
        if Z.ndim != 2:
            raise ShapeError(f"Logits must be an n x C matrix, got shape {Z.shape}.")
        if not np.all(np.isfinite(Z)):
            raise DomainError("Logits must be finite.")
        y = check_labels(y, Z.shape[1])
        if y.shape != (Z.shape[0],):
            raise ShapeError(f"Expected {Z.shape[0]} labels, got shape {y.shape}.")
        return self._value_grad(Z, y)

    def value(self, Z: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.value_grad(Z, y)[0]

    @abstractmethod
    def _value_grad(self, Z: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def to_config(self) -> str:
        return self.name

    def expected_symmetric(self) -> bool:
        return self.symmetric_by_construction

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_config()!r})"


def loss_eval(spec: Loss, z: np.ndarray, y: int) -> LossEval:
    """Evaluates a loss at a single logit vector and class index."""
    z = np.asarray(z, dtype=float)
    values, grads = spec.value_grad(z[None, :], np.asarray([y]))
    return LossEval(value=float(values[0]), grad=grads[0])
