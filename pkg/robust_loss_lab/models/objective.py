"""Empirical objectives ``alpha L(theta) + w G(theta)`` with analytic gradients."""
import logging
from typing import Dict, Optional, Tuple

import numpy as np

from robust_loss_lab.core.errors import ShapeError
from robust_loss_lab.dataset.base import Dataset
from robust_loss_lab.dataset.noise import NoiseSpec, transition_matrix
from robust_loss_lab.losses.base import Loss
from robust_loss_lab.models.base import BaseModel
from robust_loss_lab.regularizers.base import Regularizer
from robust_loss_lab.regularizers.reduced import embed

log = logging.getLogger(__name__)


def expected_loss(loss: Loss, Z: np.ndarray, labels: np.ndarray,
                  noise: Optional[NoiseSpec] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row loss values and logit gradients, optionally averaged over label flips.

    With ``noise`` the row for clean label y is ``sum_j P(noisy = j | y) l(z, j)``,
    computed by enumerating the C labels, not by sampling.
    """
    if noise is None:
        return loss.value_grad(Z, labels)
    n, C = Z.shape
    if noise.n_classes != C:
        raise ShapeError(f"Noise model is for C={noise.n_classes}, logits have C={C}.")
    W = transition_matrix(noise)[labels]
    values = np.zeros(n)
    grads = np.zeros_like(Z)
    for j in range(C):
        v, g = loss.value_grad(Z, np.full(n, j))
        values += W[:, j] * v
        grads += W[:, j, None] * g
    return values, grads


class Objective:
    """
    ``alpha * L(theta) + reg_weight * G(theta)`` over the empirical distribution.

    The loss always sees full C-dimensional logits: a reduced model's outputs
    are embedded first and the loss gradient drops the last coordinate.

    Args:
        model: The model family; its parameters are ignored except as a template.
        dataset: The training data (clean labels when ``noise`` is given).
        loss: The loss l.
        regularizer (optional): The output regularizer g.
        alpha (optional): The loss weight.
        reg_weight (optional): The regularizer weight.
        noise (optional): Take the exact expectation over uniform label flips.
    """

    def __init__(self, model: BaseModel, dataset: Dataset, loss: Loss, regularizer: Optional[Regularizer] = None,
                 alpha: float = 1.0, reg_weight: float = 1.0, noise: Optional[NoiseSpec] = None):
        expected = dataset.n_classes - 1 if model.reduced else dataset.n_classes
        if model.n_outputs != expected:
            raise ShapeError(f"Model has {model.n_outputs} outputs, expected {expected} for C={dataset.n_classes}.")
        if regularizer is not None and (regularizer.dim != model.n_outputs or regularizer.reduced != model.reduced):
            raise ShapeError(f"{regularizer!r} acts on {regularizer.dim} outputs (reduced={regularizer.reduced}); "
                             f"model has {model.n_outputs} (reduced={model.reduced}).")
        self.model = model
        self.dataset = dataset
        self.loss = loss
        self.regularizer = regularizer
        self.alpha = float(alpha)
        self.reg_weight = float(reg_weight)
        self.noise = noise

    def with_weights(self, alpha: float = None, reg_weight: float = None) -> "Objective":
        return Objective(
            self.model, self.dataset, self.loss, self.regularizer,
            self.alpha if alpha is None else alpha,
            self.reg_weight if reg_weight is None else reg_weight,
            self.noise,
        )

    def outputs(self, theta: np.ndarray) -> np.ndarray:
        return self.model.with_theta(theta).forward_array(self.dataset.features)

    def value_grad(self, theta: np.ndarray) -> Tuple[float, np.ndarray]:
        model = self.model.with_theta(theta)
        X = self.dataset.features
        Z = model.forward_array(X)
        n = Z.shape[0]
        value = 0.0
        GZ = np.zeros_like(Z)
        if self.alpha != 0.0:
            full = embed(Z) if model.reduced else Z
            lv, lg = expected_loss(self.loss, full, self.dataset.labels, self.noise)
            if model.reduced:
                lg = lg[:, :-1]
            value += self.alpha * lv.sum()
            GZ += self.alpha * lg
        if self.regularizer is not None and self.reg_weight != 0.0:
            rv, rg = self.regularizer.value_grad(Z)
            value += self.reg_weight * rv.sum()
            GZ += self.reg_weight * rg
        return value / n, model.backward(X, GZ / n)

    __call__ = value_grad

    def value(self, theta: np.ndarray) -> float:
        return self.value_grad(theta)[0]

    def grad(self, theta: np.ndarray) -> np.ndarray:
        return self.value_grad(theta)[1]


def objective_grad(model: BaseModel, dataset: Dataset, loss: Loss, reg: Optional[Regularizer], alpha: float,
                   rho_exact: Optional[NoiseSpec] = None, reg_weight: float = 1.0) -> Dict[str, object]:
    """Value and parameter gradient of ``alpha L + reg_weight G`` at the model's parameters."""
    objective = Objective(model, dataset, loss, reg, alpha, reg_weight, rho_exact)
    value, grad = objective.value_grad(model.theta)
    return {"value": value, "grad": grad}
