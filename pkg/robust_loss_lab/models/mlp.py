"""A bias-free two-layer network, ``Z = tanh(X W1^T) W2^T``."""
import numpy as np

from robust_loss_lab.core.base import JsonType
from robust_loss_lab.core.errors import ShapeError
from robust_loss_lab.models.base import BaseModel
from robust_loss_lab.utils.sampling import make_rng


class MLP2(BaseModel):
    """Two-layer tanh network without biases.

    Scaling ``W2`` by t scales every output by t, so the family is closed
    under positive scaling. The parameters are ``W1`` then ``W2``, each
    flattened row-major.

    Args:
        W1: The ``h x d`` input weights.
        W2: The ``k x h`` output weights.
        reduced (optional): Whether the outputs are reduced coordinates.
    """
    arch = "mlp2"

    def __init__(self, W1: np.ndarray, W2: np.ndarray, reduced: bool = False):
        W1 = np.asarray(W1, dtype=float)
        W2 = np.asarray(W2, dtype=float)
        if W1.ndim != 2 or W2.ndim != 2 or W2.shape[1] != W1.shape[0]:
            raise ShapeError(f"Incompatible MLP2 weights {W1.shape} and {W2.shape}.")
        super().__init__(W2.shape[0], reduced)
        self.W1 = W1.copy()
        self.W2 = W2.copy()

    @classmethod
    def at_origin(cls, input_dim: int, n_outputs: int, hidden: int = 16, seed: int = 0,
                  reduced: bool = False) -> "MLP2":
        """``W1`` seeded Gaussian with scale ``1/sqrt(d)``, ``W2 = 0``, so ``Z = 0``."""
        W1 = make_rng(seed).standard_normal((hidden, input_dim)) / np.sqrt(input_dim)
        return cls(W1, np.zeros((n_outputs, hidden)), reduced)

    @property
    def theta(self) -> np.ndarray:
        return np.concatenate([self.W1.ravel(), self.W2.ravel()])

    def with_theta(self, theta):
        theta = self._check_theta(theta)
        split = self.W1.size
        return MLP2(theta[:split].reshape(self.W1.shape), theta[split:].reshape(self.W2.shape), self.reduced)

    def scale(self, t):
        return MLP2(self.W1, t * self.W2, self.reduced)

    def _hidden(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.W1.shape[1]:
            raise ShapeError(f"MLP2 expects n x {self.W1.shape[1]} features, got shape {X.shape}.")
        return np.tanh(X @ self.W1.T)

    def forward_array(self, X):
        return self._hidden(X) @ self.W2.T

    def backward(self, X, G):
        X = np.asarray(X, dtype=float)
        H = self._hidden(X)
        G = np.asarray(G)
        dW2 = G.T @ H
        dA = (G @ self.W2) * (1.0 - H * H)
        dW1 = dA.T @ X
        return np.concatenate([dW1.ravel(), dW2.ravel()])

    def jacobian(self, X):
        X = np.asarray(X, dtype=float)
        H = self._hidden(X)
        n = X.shape[0]
        k, h = self.W2.shape
        D = 1.0 - H * H
        J1 = np.einsum("cj,ij,il->icjl", self.W2, D, X).reshape(n, k, -1)
        J2 = np.einsum("cq,ij->icqj", np.eye(k), H).reshape(n, k, -1)
        return np.concatenate([J1, J2], axis=2)

    def to_dict(self) -> JsonType:
        return {
            "arch": self.arch,
            "n_outputs": self.n_outputs,
            "reduced": self.reduced,
            "activation": "tanh",
            "params": {"W1": self.W1.tolist(), "W2": self.W2.tolist()},
        }

    @classmethod
    def _from_dict(cls, data: JsonType) -> "MLP2":
        return cls(data["params"]["W1"], data["params"]["W2"], data.get("reduced", False))
