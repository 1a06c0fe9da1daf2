"""Closed-form minimisers of linear-target, quadratic-penalty objectives
over linear models.

For ``Z = Phi Theta^T`` the objective ``E[-beta <t(x, y), z> + z^T A z]`` has
the stationarity condition ``2 A Theta S = beta B`` with ``S = E[phi phi^T]``
and ``B = E[t phi^T]``, so ``Theta* = (beta / 2) A^{-1} B S^{-1}``.
"""
import logging
from typing import Optional

import numpy as np

from robust_loss_lab.core.errors import CompatibilityError, ShapeError
from robust_loss_lab.dataset.base import Dataset
from robust_loss_lab.dataset.encoding import onehot_star
from robust_loss_lab.dataset.noise import NoiseSpec, transition_matrix
from robust_loss_lab.losses.base import Loss
from robust_loss_lab.losses.zoo import linearize
from robust_loss_lab.models.linear import LinearModel
from robust_loss_lab.optimize.linalg import solve_dense
from robust_loss_lab.processing.base import FeatureMap
from robust_loss_lab.processing.processors import IdentityMap
from robust_loss_lab.regularizers.base import Regularizer

log = logging.getLogger(__name__)


def second_moment(Phi: np.ndarray) -> np.ndarray:
    """``S = (1/n) Phi^T Phi``."""
    return Phi.T @ Phi / Phi.shape[0]


def expected_targets(G: np.ndarray, labels: np.ndarray, noise: Optional[NoiseSpec] = None) -> np.ndarray:
    """Per-sample target rows ``E[G[noisy label] | y]``; ``G[y]`` without noise."""
    if noise is None:
        return G[labels]
    return (transition_matrix(noise) @ G)[labels]


def closed_form_linear(Phi: np.ndarray, targets: np.ndarray, A: np.ndarray, beta: float = 1.0) -> np.ndarray:
    """Solves ``2 A Theta S = beta B`` for ``Theta`` (``k x p``).

    Raises:
        RankError: If ``S`` or ``A`` is singular.
    """
    n = Phi.shape[0]
    if targets.shape[0] != n or A.shape != (targets.shape[1], targets.shape[1]):
        raise ShapeError(f"Incompatible shapes: Phi {Phi.shape}, targets {targets.shape}, A {A.shape}.")
    S = second_moment(Phi)
    B = targets.T @ Phi / n
    AinvB = solve_dense(A, 0.5 * beta * B, what="quadratic form")
    # Theta S = AinvB with S symmetric, so Theta^T = S^{-1} AinvB^T.
    return solve_dense(S, AinvB.T, what="second-moment matrix").T


def closed_form_muh_quadratic(dataset: Dataset, A: np.ndarray, spec: Optional[NoiseSpec] = None,
                              feature_map: Optional[FeatureMap] = None, beta: float = 1.0) -> np.ndarray:
    """The minimiser of ``beta MUH + z^T A z`` over linear models.

    Args:
        dataset: The clean-labelled data.
        A: The ``C x C`` positive-definite form.
        spec (optional): Take the exact expectation over uniform label noise;
            this scales ``B`` by ``a``.
        feature_map (optional): The feature map. Defaults to the identity.
        beta (optional): The loss weight.

    Returns:
        ``Theta*`` as a ``C x p`` matrix.

    Raises:
        RankError: If the second-moment matrix is singular.
    """
    fmap = feature_map or IdentityMap().fit(dataset.features)
    Phi = fmap.transform(dataset.features)
    C = dataset.n_classes
    G = onehot_star(np.arange(C), C)
    targets = expected_targets(G, dataset.labels, spec)
    return closed_form_linear(Phi, targets, np.asarray(A, dtype=float), beta)


def closed_form_reference(model: LinearModel, dataset: Dataset, loss: Loss, regularizer: Regularizer,
                          beta: float, noise: Optional[NoiseSpec] = None) -> np.ndarray:
    """The minimiser of ``beta l_lin + g_sq`` over the linear family of ``model``.

    ``l_lin(z, y) = <G0[y], z>`` is the expansion of ``loss`` at 0 and
    ``g_sq(z) = z^T H z`` uses the Hessian of the regularizer at its minimum.
    Reduced models keep the first ``C - 1`` coordinates of each ``G0`` row.

    Returns:
        The flat parameter vector.
    """
    if not isinstance(model, LinearModel):
        raise CompatibilityError(f"Closed-form reference needs a linear model, got {model.arch}.")
    C = dataset.n_classes
    G0 = linearize(loss, C).G0
    if model.reduced:
        G0 = G0[:, :-1]
    targets = -expected_targets(G0, dataset.labels, noise)
    Phi = model.features(dataset.features)
    Theta = closed_form_linear(Phi, targets, regularizer.hessian_at_min(), beta)
    return Theta.ravel()
