"""The Dataset: the empirical distribution of (X, Y)."""
import logging
from typing import Optional, Tuple

import numpy as np
from sklearn.model_selection import train_test_split

from robust_loss_lab.core.errors import ConfigError, DomainError, ShapeError
from robust_loss_lab.dataset.encoding import check_labels

log = logging.getLogger(__name__)


class Dataset:
    """
    Dataset is a bundle of features, 0-based labels and the class count.

    Every sample carries weight ``1/n``; expectations over the dataset are
    plain means over rows.

    Args:
        features: An ``n x d`` matrix of finite reals.
        labels: A length-n vector of class indices in ``[0, C)``.
        n_classes (optional): The class count C. Defaults to ``max(labels) + 1`` (at least 2).
    """

    def __init__(self, features: np.ndarray, labels: np.ndarray, n_classes: Optional[int] = None):
        features = np.asarray(features, dtype=float)
        if features.ndim != 2:
            raise ShapeError(f"Features must be an n x d matrix, got shape {features.shape}.")
        if features.shape[0] < 1:
            raise ConfigError("A dataset needs at least one sample.")
        if not np.all(np.isfinite(features)):
            raise DomainError("Features must be finite.")
        labels = np.asarray(labels)
        if labels.shape != (features.shape[0],):
            raise ShapeError(f"Expected {features.shape[0]} labels, got shape {labels.shape}.")
        if n_classes is None:
            n_classes = max(2, int(labels.max()) + 1)
        self.features = features
        self.labels = check_labels(labels, n_classes)
        self.n_classes = int(n_classes)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def with_labels(self, labels: np.ndarray) -> "Dataset":
        """The same features under another labelling (e.g. a noisy one)."""
        return Dataset(self.features, labels, self.n_classes)

    def subset(self, index: np.ndarray) -> "Dataset":
        return Dataset(self.features[index], self.labels[index], self.n_classes)

    def split(self, test_fraction: float, seed: int) -> Tuple["Dataset", "Dataset"]:
        """A stratified train / test split.

        Args:
            test_fraction: The share of samples held out, in (0, 1).
            seed: Seed of the shuffling.

        Returns:
            The train and test datasets.
        """
        if not 0 < test_fraction < 1:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {test_fraction}.")
        idx = np.arange(self.n)
        train_idx, test_idx = train_test_split(
            idx, test_size=test_fraction, random_state=seed, stratify=self.labels
        )
        log.debug(f"Split {self.n} samples into {len(train_idx)} train / {len(test_idx)} test")
        return self.subset(np.sort(train_idx)), self.subset(np.sort(test_idx))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.n_classes == other.n_classes
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, d={self.d}, C={self.n_classes})"
