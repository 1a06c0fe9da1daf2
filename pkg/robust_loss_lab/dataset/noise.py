"""The uniform (symmetric) label-noise model.

Under noise level ``rho`` a label keeps its class with probability
``1 - rho`` and moves to each of the other ``C - 1`` classes with
probability ``rho / (C - 1)``. The derived constant ``a = 1 - rho C/(C-1)``
scales the clean risk inside the noisy risk and ``lambda = 1/a`` is the
regularisation coefficient the noise effectively induces.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from robust_loss_lab.core.errors import ConfigError, NoiseError
from robust_loss_lab.dataset.encoding import check_labels
from robust_loss_lab.utils.sampling import make_rng

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise level and its derived constants.

    Attributes:
        rho: The noise level in ``[0, (C-1)/C)``.
        n_classes: The class count C.
        a: ``1 - rho C / (C - 1)``; strictly positive.
        lambda_equiv: ``1 / a``.
    """
    rho: float
    n_classes: int
    a: float = field(init=False)
    lambda_equiv: float = field(init=False)

    def __post_init__(self):
        C = self.n_classes
        if C < 2:
            raise ConfigError(f"Class count must be at least 2, got {C}.")
        if not np.isfinite(self.rho) or self.rho < 0:
            raise NoiseError(f"Noise level must be non-negative, got {self.rho}.")
        a = 1.0 - self.rho * C / (C - 1)
        if self.rho >= (C - 1) / C or a <= 0:
            raise NoiseError(f"Noise level {self.rho} leaves no signal for C={C}: need rho < {(C - 1) / C:.6g}.")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "lambda_equiv", 1.0 / a)

    @property
    def off_diagonal(self) -> float:
        """The probability ``rho / (C - 1)`` of moving to one specific other class."""
        return self.rho / (self.n_classes - 1)


def noise_constants(rho: float, n_classes: int) -> NoiseSpec:
    """Builds the NoiseSpec for ``(rho, C)``; rejects ``rho >= (C-1)/C``."""
    return NoiseSpec(rho=float(rho), n_classes=int(n_classes))


def flip_distribution(y: int, spec: NoiseSpec) -> np.ndarray:
    """The distribution of the noisy label given the clean label ``y``."""
    y = int(check_labels(y, spec.n_classes))
    p = np.full(spec.n_classes, spec.off_diagonal)
    p[y] = 1.0 - spec.rho
    return p


def transition_matrix(spec: NoiseSpec) -> np.ndarray:
    """The ``C x C`` matrix whose row ``y`` is ``flip_distribution(y, spec)``."""
    T = np.full((spec.n_classes, spec.n_classes), spec.off_diagonal)
    np.fill_diagonal(T, 1.0 - spec.rho)
    return T


def inject_noise(labels: np.ndarray, spec: NoiseSpec, seed: int) -> np.ndarray:
    """Samples one noisy realisation of ``labels``.

    Each label flips with probability ``rho``; a flipped label moves to one of
    the other ``C - 1`` classes uniformly, which is exactly a draw from
    ``flip_distribution``.

    Args:
        labels: Clean 0-based labels.
        spec: The noise model.
        seed: Seed of the sampling generator.

    Returns:
        The corrupted labels (a new array).
    """
    labels = check_labels(labels, spec.n_classes)
    rng = make_rng(seed)
    flip = rng.random(labels.shape) < spec.rho
    offset = rng.integers(1, spec.n_classes, size=labels.shape)
    noisy = np.where(flip, (labels + offset) % spec.n_classes, labels)
    log.debug(f"Injected noise rho={spec.rho}: {int(flip.sum())} of {labels.size} labels flipped")
    return noisy
