"""A collection of implementations of FeatureMap"""
from typing import Optional

import numpy as np
from sklearn.kernel_approximation import RBFSampler

from robust_loss_lab.core.base import JsonType
from robust_loss_lab.core.errors import ConfigError
from robust_loss_lab.processing.base import FeatureMap


class IdentityMap(FeatureMap):
    """``phi(x) = x``."""
    kind = "identity"

    def _transform(self, X):
        return X

    @property
    def dim(self) -> int:
        return self.input_dim


class AppendConstant(FeatureMap):
    """``phi(x) = (x, 1)``; gives linear heads an intercept."""
    kind = "appended_constant"

    def _transform(self, X):
        return np.hstack([X, np.ones((X.shape[0], 1))])

    @property
    def dim(self) -> int:
        return self.input_dim + 1


class RandomFourierFeatures(FeatureMap):
    """A wrapper for scikit-learn's RBFSampler, approximating a Gaussian kernel.

    Args:
        dim: The number of random features.
        bandwidth: The kernel length scale; ``gamma = 1 / (2 bandwidth^2)``.
        seed: Seed of the random frequencies.
    """
    kind = "random_fourier"

    def __init__(self, dim: int = 64, bandwidth: float = 1.0, seed: int = 0):
        super().__init__()
        if dim < 1 or not bandwidth > 0:
            raise ConfigError(f"Random Fourier features need dim >= 1 and bandwidth > 0, got {dim}, {bandwidth}.")
        self.n_components = int(dim)
        self.bandwidth = float(bandwidth)
        self.seed = int(seed)
        self._sampler: Optional[RBFSampler] = None

    def fit(self, X: np.ndarray) -> "RandomFourierFeatures":
        super().fit(X)
        self._sampler = RBFSampler(
            gamma=1.0 / (2.0 * self.bandwidth ** 2), n_components=self.n_components, random_state=self.seed
        )
        self._sampler.fit(np.zeros((1, self.input_dim)))
        return self

    def _transform(self, X):
        return self._sampler.transform(X)

    @property
    def dim(self) -> int:
        return self.n_components

    def to_dict(self) -> JsonType:
        data = super().to_dict()
        data.update(dim=self.n_components, bandwidth=self.bandwidth, seed=self.seed)
        return data


FEATURE_MAPS = {
    IdentityMap.kind: IdentityMap,
    AppendConstant.kind: AppendConstant,
    RandomFourierFeatures.kind: RandomFourierFeatures,
}


def make_feature_map(kind: str, **kwargs) -> FeatureMap:
    if kind not in FEATURE_MAPS:
        raise ConfigError(f"Unknown feature map {kind!r}; expected one of {', '.join(FEATURE_MAPS)}.")
    return FEATURE_MAPS[kind](**kwargs) if kind == RandomFourierFeatures.kind else FEATURE_MAPS[kind]()
