"""The loss zoo: MUH, MAE, GCE, SCE, softmax cross entropy, the centred
square loss and linearised losses.

Simplex losses take ``p = softmax(z)``; their logit gradients use the
softmax Jacobian ``diag(p) - p p^T``, which maps a simplex gradient ``g`` to
``p * (g - <g, p>)``.
"""
import numpy as np

from robust_loss_lab.core.errors import ConfigError, ShapeError
from robust_loss_lab.dataset.encoding import log_softmax, onehot, onehot_star, softmax
from robust_loss_lab.losses.base import Loss


def _rows(n: int):
    return np.arange(n)


class MUH(Loss):
    """Multi-category unhinged loss ``mean(z) - z_y = -<z, onehot*(y)>``.

    Linear in ``z``, symmetric and unbounded below.
    """
    name = "muh"
    symmetric_by_construction = True

    def _value_grad(self, Z, y):
        C = Z.shape[1]
        grads = -onehot_star(y, C)
        values = Z.mean(axis=1) - Z[_rows(len(y)), y]
        return values, grads


class SoftmaxCE(Loss):
    """Softmax cross entropy ``-z_y + log sum_i exp(z_i)``."""
    name = "softmax_ce"

    def _value_grad(self, Z, y):
        values = -log_softmax(Z)[_rows(len(y)), y]
        grads = softmax(Z) - onehot(y, Z.shape[1])
        return values, grads


class MAE(Loss):
    """Mean absolute error on softmax outputs, ``||p - onehot(y)||_1 = 2(1 - p_y)``."""
    name = "mae"
    symmetric_by_construction = True

    def _value_grad(self, Z, y):
        P = softmax(Z)
        py = P[_rows(len(y)), y]
        values = 2.0 * (1.0 - py)
        grads = -2.0 * py[:, None] * (onehot(y, Z.shape[1]) - P)
        return values, grads


class GCE(Loss):
    """Generalised cross entropy ``(1 - p_y^q) / q`` for ``q in (0, 1]``.

    Tends to cross entropy as q -> 0 and equals MAE / 2 at q = 1.

    Args:
        q: The exponent, in ``(0, 1]``.
    """
    name = "gce"

    def __init__(self, q: float = 0.7):
        if not 0.0 < q <= 1.0:
            raise ConfigError(f"GCE requires q in (0, 1], got {q}.")
        self.q = float(q)

    def _value_grad(self, Z, y):
        P = softmax(Z)
        log_py = log_softmax(Z)[_rows(len(y)), y]
        pyq = np.exp(self.q * log_py)
        values = (1.0 - pyq) / self.q
        grads = -pyq[:, None] * (onehot(y, Z.shape[1]) - P)
        return values, grads

    def to_config(self) -> str:
        return f"gce:q={self.q!r}"

    def expected_symmetric(self) -> bool:
        return self.q == 1.0


class SCE(Loss):
    """Symmetric cross entropy ``-log p_y + lambda (1 - p_y)``.

    Args:
        lambda_sce: The weight of the reverse term, ``>= 0``. At 0 this is cross entropy.
    """
    name = "sce"

    def __init__(self, lambda_sce: float = 1.0):
        if not lambda_sce >= 0:
            raise ConfigError(f"SCE requires lambda >= 0, got {lambda_sce}.")
        self.lambda_sce = float(lambda_sce)

    def _value_grad(self, Z, y):
        P = softmax(Z)
        rows = _rows(len(y))
        py = P[rows, y]
        H = onehot(y, Z.shape[1])
        values = -log_softmax(Z)[rows, y] + self.lambda_sce * (1.0 - py)
        grads = (P - H) - self.lambda_sce * py[:, None] * (H - P)
        return values, grads

    def to_config(self) -> str:
        return f"sce:lambda={self.lambda_sce!r}"


class SquareStar(Loss):
    """Square loss against the centred target, ``||z - onehot*(y)||^2``."""
    name = "square_star"

    def _value_grad(self, Z, y):
        R = Z - onehot_star(y, Z.shape[1])
        return np.sum(R * R, axis=1), 2.0 * R


class Linearized(Loss):
    """A loss linear in the logits, ``l(z, y) = <G0[y], z>``.

    Args:
        G0: A ``C x C`` matrix whose row y is the logit gradient at z = 0 for label y.
        source (optional): The config string of the loss it linearises.
    """
    name = "linearized"

    def __init__(self, G0: np.ndarray, source: str = None):
        G0 = np.asarray(G0, dtype=float)
        if G0.ndim != 2 or G0.shape[0] != G0.shape[1]:
            raise ShapeError(f"Linearised loss needs a C x C matrix, got shape {G0.shape}.")
        self.G0 = G0
        self.source = source

    @property
    def symmetric_by_construction(self) -> bool:
        return bool(np.allclose(self.G0.sum(axis=0), 0.0, atol=1e-12))

    def _value_grad(self, Z, y):
        if Z.shape[1] != self.G0.shape[1]:
            raise ShapeError(f"Linearised loss is for C={self.G0.shape[1]}, got {Z.shape[1]} logits.")
        grads = self.G0[y]
        return np.sum(grads * Z, axis=1), grads.copy()

    def to_config(self) -> str:
        return f"linearized:{self.source}" if self.source else "linearized"


def linearize(spec: Loss, n_classes: int) -> Linearized:
    """First-order expansion at 0, ``l_lin(z, y) = grad_z l(0, y) . z``.

    Args:
        spec: The loss to linearise.
        n_classes: The class count C.

    Returns:
        A Linearized loss whose row y is ``grad_z l(0, y)``; for softmax cross
        entropy and MUH every row equals ``-onehot*(y)``.
    """
    _, G0 = spec.value_grad(np.zeros((n_classes, n_classes)), np.arange(n_classes))
    return Linearized(G0, source=spec.to_config())


def muh_gradient_mismatch(spec: Loss, n_classes: int) -> np.ndarray:
    """Per-label distance between ``grad_z l(0, y)`` and ``-onehot*(y)``."""
    G0 = linearize(spec, n_classes).G0
    return np.abs(G0 + onehot_star(np.arange(n_classes), n_classes)).max(axis=1)
