"""Label encodings and the softmax map.

Labels are 0-based: class ``y`` here is class ``y + 1`` of the usual
``[C] = {1, ..., C}`` notation.
"""
from typing import Union

import numpy as np
from scipy.special import logsumexp

from robust_loss_lab.core.errors import ConfigError, DomainError, LabelIndexError

Labels = Union[int, np.integer, np.ndarray]


def check_labels(y: Labels, n_classes: int) -> np.ndarray:
    """Validates class indices against ``n_classes`` and returns them as int64."""
    if n_classes < 2:
        raise ConfigError(f"Class count must be at least 2, got {n_classes}.")
    arr = np.asarray(y)
    if arr.dtype.kind not in "iu":
        raise LabelIndexError(f"Class indices must be integers, got dtype {arr.dtype}.")
    arr = arr.astype(np.int64)
    bad = (arr < 0) | (arr >= n_classes)
    if np.any(bad):
        raise LabelIndexError(f"Class index {arr[bad].flat[0]} out of range for C={n_classes}.")
    return arr


def onehot(y: Labels, n_classes: int) -> np.ndarray:
    """One-hot encoding; a vector for a scalar label, an ``n x C`` matrix for a batch."""
    labels = check_labels(y, n_classes)
    return np.eye(n_classes)[labels]


def onehot_star(y: Labels, n_classes: int) -> np.ndarray:
    """Centred one-hot target ``onehot(y) - 1/C``.

    Entry ``y`` equals ``1 - 1/C``, all others ``-1/C``; the entries sum to 0
    and the squared norm is ``(C - 1) / C``.

    Args:
        y: A class index or a vector of class indices.
        n_classes: The class count C.

    Returns:
        A length-C vector, or an ``n x C`` matrix for a batch.
    """
    return onehot(y, n_classes) - 1.0 / n_classes


def _check_finite(z: np.ndarray):
    if not np.all(np.isfinite(z)):
        raise DomainError("Logits must be finite.")


def softmax(z: np.ndarray) -> np.ndarray:
    """Softmax over the last axis with max-subtraction for overflow safety."""
    z = np.asarray(z, dtype=float)
    _check_finite(z)
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(z: np.ndarray) -> np.ndarray:
    """Log of the softmax over the last axis, stable for large logits."""
    z = np.asarray(z, dtype=float)
    _check_finite(z)
    return z - logsumexp(z, axis=-1, keepdims=True)
