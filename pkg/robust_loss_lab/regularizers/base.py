"""The Regularizer interface: output penalties ``g(z)`` with a unique minimum at 0."""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from robust_loss_lab.core.errors import DomainError, ShapeError


@dataclass
class RegEval:
    """The value and gradient of a regularizer at one output vector."""
    value: float
    grad: np.ndarray


class Regularizer(ABC):
    """
    A base class for output regularizers.

    The coefficient is not stored: objectives weight the penalty. A reduced
    regularizer acts on the ``C - 1`` reduced coordinates (see
    ``regularizers.reduced``), so its ``dim`` is ``C - 1``.
    """
    name: str = None
    reduced: bool = False

    @property
    @abstractmethod
    def dim(self) -> int:
        """The length of the output vectors the penalty acts on."""
        raise NotImplementedError

    @property
    def n_classes(self) -> int:
        return self.dim + 1 if self.reduced else self.dim

    def value_grad(self, Z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Per-row values and gradients of an ``n x dim`` output matrix."""
        Z = np.asarray(Z, dtype=float)
        if Z.ndim != 2 or Z.shape[1] != self.dim:
            raise ShapeError(f"{self!r} expects n x {self.dim} outputs, got shape {Z.shape}.")
        if not np.all(np.isfinite(Z)):
            raise DomainError("Outputs must be finite.")
        return self._value_grad(Z)

    @abstractmethod
    def _value_grad(self, Z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    @abstractmethod
    def hessian_at_min(self) -> np.ndarray:
        """The analytic ``dim x dim`` Hessian at the minimum 0."""
        raise NotImplementedError

    @abstractmethod
    def to_config(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_config()!r})"


def reg_eval(spec: Regularizer, z: np.ndarray) -> RegEval:
    """Evaluates a regularizer at a single output vector."""
    values, grads = spec.value_grad(np.asarray(z, dtype=float)[None, :])
    return RegEval(value=float(values[0]), grad=grads[0])


def reg_hessian_at_min(spec: Regularizer) -> np.ndarray:
    return spec.hessian_at_min()
