"""Symmetry machinery: label sums, the symmetry test and the MUH / square
decomposition."""
import logging
from typing import Dict

import numpy as np

from robust_loss_lab.core.errors import ConfigError
from robust_loss_lab.losses.base import Loss
from robust_loss_lab.losses.zoo import MUH, SquareStar
from robust_loss_lab.utils.sampling import make_rng

log = logging.getLogger(__name__)


def total_label_loss(spec: Loss, Z: np.ndarray) -> np.ndarray:
    """Per-row ``sum_y l(z, y)`` over all C labels for an ``n x C`` logit matrix."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    n, C = Z.shape
    total = np.zeros(n)
    for label in range(C):
        total += spec.value(Z, np.full(n, label))
    return total


def symmetry_sum(spec: Loss, z: np.ndarray) -> float:
    """``sum_y l(z, y)``; constant in z exactly when the loss is symmetric."""
    return float(total_label_loss(spec, np.asarray(z, dtype=float)[None, :])[0])


def is_symmetric(spec: Loss, n_classes: int, trials: int = 100, tol: float = 1e-10,
                 seed: int = 0, scale: float = 2.0) -> Dict[str, float]:
    """Tests whether the label sum is constant over random logits.

    Args:
        spec: The loss to test.
        n_classes: The class count C.
        trials (optional): The number of random logit vectors, at least 2.
        tol (optional): The largest deviation still counted as constant.
        seed (optional): Seed of the logit sampling.
        scale (optional): Standard deviation of the sampled logits.

    Returns:
        ``{"symmetric": bool, "max_deviation": float}``, the deviation measured
        against the first sampled point.
    """
    if trials < 2:
        raise ConfigError(f"The symmetry test needs at least 2 trials, got {trials}.")
    Z = scale * make_rng(seed).standard_normal((trials, n_classes))
    sums = total_label_loss(spec, Z)
    deviation = float(np.max(np.abs(sums - sums[0])))
    log.debug(f"{spec!r}: symmetry deviation {deviation:.3g} over {trials} trials")
    return {"symmetric": bool(deviation <= tol), "max_deviation": deviation}


def muh_square_decomposition_residual(z: np.ndarray, y: int, n_classes: int) -> float:
    """``SquareStar(z, y) - 2 MUH(z, y) - ||z||^2``; always ``(C - 1) / C``."""
    z = np.asarray(z, dtype=float)[None, :]
    labels = np.asarray([y])
    square = SquareStar().value(z, labels)[0]
    muh = MUH().value(z, labels)[0]
    return float(square - 2.0 * muh - np.sum(z * z))


def simplex_linearization_sum(n_classes: int, p: np.ndarray = None) -> float:
    """Label sum of the first-order expansion of ``-log p_y`` at the uniform point.

    The gradient of ``-log p_y`` at ``p = 1/C`` is ``-C e_y``, so the expansion
    summed over labels is ``-C sum_i p_i = -C`` at every simplex point ``p``.
    """
    p = np.full(n_classes, 1.0 / n_classes) if p is None else np.asarray(p, dtype=float)
    G = -n_classes * np.eye(n_classes)
    return float(np.sum(G @ p))
