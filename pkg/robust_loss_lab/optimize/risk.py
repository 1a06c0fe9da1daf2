"""Clean, exact-noisy and total-label risks of a model over a dataset.

The noisy risk enumerates the flip distribution of every sample; the
identity check recomputes it from the clean and total-label risks, which
share no code with the enumeration.
"""
from dataclasses import asdict, dataclass
from typing import Dict

import numpy as np

from robust_loss_lab.dataset.base import Dataset
from robust_loss_lab.dataset.noise import NoiseSpec, flip_distribution
from robust_loss_lab.losses.base import Loss
from robust_loss_lab.losses.symmetry import total_label_loss
from robust_loss_lab.models.base import BaseModel


def _logits(model: BaseModel, dataset: Dataset) -> np.ndarray:
    return model.forward(dataset).logits()


def clean_risk(model: BaseModel, dataset: Dataset, loss: Loss) -> float:
    """``(1/n) sum_i l(z_i, y_i)``."""
    return float(np.mean(loss.value(_logits(model, dataset), dataset.labels)))


def exact_noisy_risk(model: BaseModel, dataset: Dataset, loss: Loss, spec: NoiseSpec) -> float:
    """``(1/n) sum_i sum_j P(noisy = j | y_i) l(z_i, j)``, with no sampling."""
    Z = _logits(model, dataset)
    n, C = Z.shape
    per_label = np.column_stack([loss.value(Z, np.full(n, j)) for j in range(C)])
    weights = np.stack([flip_distribution(c, spec) for c in range(C)])[dataset.labels]
    return float(np.mean(np.sum(weights * per_label, axis=1)))


def total_label_risk(model: BaseModel, dataset: Dataset, loss: Loss) -> Dict[str, float]:
    """Mean and spread (max - min over rows) of ``sum_y l(z_i, y)``."""
    T = total_label_loss(loss, _logits(model, dataset))
    return {"mean": float(T.mean()), "spread": float(T.max() - T.min())}


@dataclass
class RiskReport:
    """The three risks behind the noisy-risk identity.

    Attributes:
        clean_risk: L.
        exact_noisy_risk: Lbar.
        total_label_risk: T, the mean over samples of ``sum_y l(z, y)``.
        total_label_spread: Spread of ``sum_y l(z, y)`` over the samples.
        identity_residual: ``|Lbar - (rho / (C - 1) T + a L)|``.
    """
    loss: str
    n_classes: int
    rho: float
    clean_risk: float
    exact_noisy_risk: float
    total_label_risk: float
    total_label_spread: float
    identity_residual: float

    def to_dict(self) -> dict:
        return asdict(self)


def risk_identity_report(model: BaseModel, dataset: Dataset, loss: Loss, spec: NoiseSpec) -> RiskReport:
    L = clean_risk(model, dataset, loss)
    Lbar = exact_noisy_risk(model, dataset, loss, spec)
    T = total_label_risk(model, dataset, loss)
    predicted = spec.rho / (spec.n_classes - 1) * T["mean"] + spec.a * L
    return RiskReport(
        loss=loss.to_config(),
        n_classes=spec.n_classes,
        rho=spec.rho,
        clean_risk=L,
        exact_noisy_risk=Lbar,
        total_label_risk=T["mean"],
        total_label_spread=T["spread"],
        identity_residual=float(abs(Lbar - predicted)),
    )
