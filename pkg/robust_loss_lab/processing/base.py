"""An implementation of the FeatureMap interface"""
from abc import abstractmethod
from typing import Optional

import numpy as np

from robust_loss_lab.core.base import Base, JsonType
from robust_loss_lab.core.errors import ShapeError


class FeatureMap(Base):
    """A base class for deterministic feature maps ``phi: R^d -> R^p``.

    A map is fitted once on the input dimension; afterwards ``transform`` is
    a pure function of the features.
    """
    kind: str = None

    def __init__(self):
        self.input_dim: Optional[int] = None

    def fit(self, X: np.ndarray) -> "FeatureMap":
        self.input_dim = np.asarray(X).shape[1]
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.input_dim is None:
            self.fit(X)
        if X.ndim != 2 or X.shape[1] != self.input_dim:
            raise ShapeError(f"{self.kind} map expects n x {self.input_dim} features, got shape {X.shape}.")
        return self._transform(X)

    @abstractmethod
    def _transform(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    @abstractmethod
    def dim(self) -> int:
        """The output dimension p (needs a fitted map)."""
        raise NotImplementedError

    def to_dict(self) -> JsonType:
        return {"kind": self.kind, "input_dim": self.input_dim}

    @classmethod
    def from_dict(cls, data: JsonType) -> "FeatureMap":
        from robust_loss_lab.processing.processors import FEATURE_MAPS

        params = {k: v for k, v in data.items() if k not in ("kind", "input_dim")}
        fmap = FEATURE_MAPS[data["kind"]](**params)
        if data.get("input_dim") is not None:
            fmap.fit(np.zeros((1, data["input_dim"])))
        return fmap
