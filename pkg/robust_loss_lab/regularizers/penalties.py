"""Quadratic output regularizers and softmax confidence penalties."""
import logging

import numpy as np
from scipy.linalg import eigh

from robust_loss_lab.core.errors import ConfigError, DegeneracyError, ShapeError
from robust_loss_lab.dataset.encoding import log_softmax, softmax
from robust_loss_lab.regularizers.base import Regularizer
from robust_loss_lab.regularizers.reduced import embed

log = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
PD_RTOL = 1e-10


def check_positive_definite(A: np.ndarray) -> float:
    """Checks symmetry and strict positive definiteness; returns the smallest eigenvalue."""
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ShapeError(f"A quadratic form needs a square matrix, got shape {A.shape}.")
    if not np.all(np.isfinite(A)):
        raise ConfigError("Quadratic form has non-finite entries.")
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.linalg.norm(A - A.T) > SYMMETRY_TOL * scale:
        raise ConfigError("Quadratic form must be symmetric.")
    eigenvalues = eigh(A, eigvals_only=True)
    if eigenvalues[0] <= PD_RTOL * np.abs(eigenvalues).max():
        raise ConfigError(f"Quadratic form must be positive definite, min eigenvalue {eigenvalues[0]:.3g}.")
    return float(eigenvalues[0])


class Quadratic(Regularizer):
    """``g(z) = z^T A z`` for a symmetric positive-definite A.

    Args:
        A: The ``k x k`` matrix.
        reduced (optional): Whether the form acts on reduced coordinates.
        source (optional): The config string it came from.
    """
    name = "quad"

    def __init__(self, A: np.ndarray, reduced: bool = False, source: str = None):
        self.A = np.asarray(A, dtype=float)
        self.min_eigenvalue = check_positive_definite(self.A)
        self.reduced = reduced
        self.source = source

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def _value_grad(self, Z):
        AZ = Z @ self.A
        return np.sum(Z * AZ, axis=1), 2.0 * AZ

    def hessian_at_min(self) -> np.ndarray:
        return 2.0 * self.A

    def to_config(self) -> str:
        return self.source or "quad:matrix"


class ConfidencePenalty(Regularizer):
    """
    A penalty ``h(softmax(z))`` evaluated in reduced coordinates.

    On ``R^C`` such penalties are minimal on the whole line of constant
    logits; on the reduced space their minimum is the single point 0.
    Subclasses give the value and the logit gradient on embedded outputs.
    """
    reduced = True

    def __init__(self, n_classes: int):
        if n_classes < 2:
            raise ConfigError(f"Class count must be at least 2, got {n_classes}.")
        self._n_classes = int(n_classes)

    @property
    def dim(self) -> int:
        return self._n_classes - 1

    def _value_grad(self, Z):
        values, grads = self._full_value_grad(embed(Z))
        return values, grads[:, :-1]

    def _full_value_grad(self, Z):
        raise NotImplementedError

    def hessian_at_min(self) -> np.ndarray:
        # Both penalties share diag(p) - p p^T at the uniform point, restricted to reduced coordinates.
        C = self._n_classes
        return np.eye(C - 1) / C - np.ones((C - 1, C - 1)) / C ** 2

    def to_config(self) -> str:
        return self.name


class Entropy(ConfidencePenalty):
    """Negative entropy ``sum_i p_i log p_i``; minimal, ``-log C``, at the uniform point."""
    name = "entropy"

    def _full_value_grad(self, Z):
        P = softmax(Z)
        logP = log_softmax(Z)
        values = np.sum(P * logP, axis=1)
        grads = P * (logP - values[:, None])
        return values, grads


class LabelSmoothing(ConfidencePenalty):
    """Uniform-target cross entropy ``-(1/C) sum_i log p_i``; minimal, ``log C``, at the uniform point."""
    name = "label_smoothing"

    def _full_value_grad(self, Z):
        C = Z.shape[1]
        values = -np.mean(log_softmax(Z), axis=1)
        grads = softmax(Z) - 1.0 / C
        return values, grads


def quadratize(spec: Regularizer) -> Quadratic:
    """The quadratic form ``z^T H z`` with ``H`` the Hessian of g at its minimum.

    No factor 1/2: the result is twice the Taylor quadratic term, so
    ``quadratize(Quadratic(A))`` is ``Quadratic(2A)``.

    Raises:
        DegeneracyError: If the Hessian is not positive definite.
    """
    try:
        return Quadratic(spec.hessian_at_min(), reduced=spec.reduced, source=f"quadratize({spec.to_config()})")
    except ConfigError as e:
        raise DegeneracyError(f"Cannot quadratize {spec!r}: {e}")
