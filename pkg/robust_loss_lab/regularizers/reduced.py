"""The reduced output space ``{z in R^C | z_C = 0}``, identified with ``R^(C-1)``.

Subtracting the last logit leaves softmax unchanged, and collapses the line
of constant logits, on which confidence penalties are minimal, to the
single point 0.
"""
import numpy as np

from robust_loss_lab.core.errors import DomainError


def reduce_outputs(z: np.ndarray) -> np.ndarray:
    """``z_i - z_C`` for ``i < C``; works on a vector or on the rows of a matrix."""
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise DomainError("Outputs must be finite.")
    return z[..., :-1] - z[..., -1:]


def embed(z_reduced: np.ndarray) -> np.ndarray:
    """Appends a zero last coordinate; the right inverse of ``reduce_outputs``."""
    z_reduced = np.asarray(z_reduced, dtype=float)
    if not np.all(np.isfinite(z_reduced)):
        raise DomainError("Outputs must be finite.")
    pad = np.zeros(z_reduced.shape[:-1] + (1,))
    return np.concatenate([z_reduced, pad], axis=-1)