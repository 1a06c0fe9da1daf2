"""Linear heads over a shared feature map, ``z_c = theta_c . phi(x)``."""
import numpy as np

from robust_loss_lab.core.base import JsonType
from robust_loss_lab.models.base import BaseModel
from robust_loss_lab.processing.base import FeatureMap


class LinearModel(BaseModel):
    """C (or C-1) linear heads sharing one feature map.

    The parameters are the rows of ``Theta`` (``k x p``) flattened row-major;
    ``Theta = 0`` gives ``Z = 0``.

    Args:
        feature_map: A fitted feature map phi.
        n_outputs: The number of heads k.
        theta (optional): The flat parameters. Defaults to zeros.
        reduced (optional): Whether the outputs are reduced coordinates.
    """
    arch = "linear"

    def __init__(self, feature_map: FeatureMap, n_outputs: int, theta: np.ndarray = None, reduced: bool = False):
        super().__init__(n_outputs, reduced)
        self.feature_map = feature_map
        p = feature_map.dim
        self.Theta = np.zeros((n_outputs, p)) if theta is None else np.asarray(theta, dtype=float).reshape(n_outputs, p).copy()

    @property
    def theta(self) -> np.ndarray:
        return self.Theta.ravel().copy()

    def with_theta(self, theta):
        return LinearModel(self.feature_map, self.n_outputs, self._check_theta(theta), self.reduced)

    def scale(self, t):
        return self.with_theta(t * self.theta)

    def features(self, X: np.ndarray) -> np.ndarray:
        return self.feature_map.transform(X)

    def forward_array(self, X):
        return self.features(X) @ self.Theta.T

    def backward(self, X, G):
        return (np.asarray(G).T @ self.features(X)).ravel()

    def jacobian(self, X):
        Phi = self.features(X)
        n, p = Phi.shape
        k = self.n_outputs
        J = np.zeros((n, k, k, p))
        for c in range(k):
            J[:, c, c, :] = Phi
        return J.reshape(n, k, k * p)

    def to_dict(self) -> JsonType:
        return {
            "arch": self.arch,
            "n_outputs": self.n_outputs,
            "reduced": self.reduced,
            "feature_map": self.feature_map.to_dict(),
            "params": {"Theta": self.Theta.tolist()},
        }

    @classmethod
    def _from_dict(cls, data: JsonType) -> "LinearModel":
        fmap = FeatureMap.from_dict(data["feature_map"])
        theta = np.asarray(data["params"]["Theta"], dtype=float)
        return cls(fmap, data["n_outputs"], theta, data.get("reduced", False))
