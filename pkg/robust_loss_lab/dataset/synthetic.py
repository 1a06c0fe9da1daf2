"""Gaussian blob datasets."""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.datasets import make_blobs as sklearn_make_blobs

from robust_loss_lab.core.errors import ConfigError
from robust_loss_lab.dataset.base import Dataset

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of an isotropic Gaussian blob dataset.

    Attributes:
        n_classes: The class count C.
        d: The feature dimension.
        n_per_class: Samples drawn around each center.
        sigma: The isotropic standard deviation.
        seed: Seed of the sampling.
        centers (optional): A ``C x d`` matrix. Defaults to ``center_scale``
            times the first C standard basis vectors of ``R^d`` (needs d >= C).
        center_scale (optional): The scale of the default centers.
    """
    n_classes: int = 3
    d: int = 3
    n_per_class: int = 100
    sigma: float = 1.0
    seed: int = 0
    centers: Optional[np.ndarray] = None
    center_scale: float = 3.0

    def resolved_centers(self) -> np.ndarray:
        if self.centers is None:
            if self.d < self.n_classes:
                raise ConfigError(f"Default centers need d >= C, got d={self.d}, C={self.n_classes}.")
            return self.center_scale * np.eye(self.n_classes, self.d)
        centers = np.asarray(self.centers, dtype=float)
        if centers.shape != (self.n_classes, self.d):
            raise ConfigError(f"Centers must be {self.n_classes} x {self.d}, got {centers.shape}.")
        return centers

    def validate(self):
        if self.n_classes < 2:
            raise ConfigError(f"Class count must be at least 2, got {self.n_classes}.")
        if self.n_per_class < 1:
            raise ConfigError(f"n_per_class must be positive, got {self.n_per_class}.")
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}.")
        centers = self.resolved_centers()
        gaps = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=-1)
        if np.any(gaps[~np.eye(self.n_classes, dtype=bool)] == 0):
            raise ConfigError("Blob centers must be pairwise distinct.")
        return centers


def make_blobs(spec: SyntheticSpec) -> Dataset:
    """Draws a class-balanced blob dataset.

    Args:
        spec: The blob parameters.

    Returns:
        A Dataset with ``n_per_class`` samples of every class, shuffled.
    """
    centers = spec.validate()
    X, y = sklearn_make_blobs(
        n_samples=[spec.n_per_class] * spec.n_classes,
        n_features=spec.d,
        centers=centers,
        cluster_std=spec.sigma,
        shuffle=True,
        random_state=spec.seed,
    )
    log.info(f"Generated blobs C={spec.n_classes}, d={spec.d}, n={len(y)}, sigma={spec.sigma}, seed={spec.seed}")
    return Dataset(X, y, spec.n_classes)
