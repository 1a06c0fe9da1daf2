"""Experiment configuration: a tree of dataclasses read from JSON.

Field names in the JSON file mirror the dataclass fields; unknown keys are
rejected. Command-specific defaults reproduce the acceptance setups.
"""
import json
import logging
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from robust_loss_lab.core.errors import ConfigError
from robust_loss_lab.dataset.base import Dataset
from robust_loss_lab.dataset.noise import NoiseSpec, noise_constants
from robust_loss_lab.dataset.synthetic import SyntheticSpec, make_blobs
from robust_loss_lab.io.csv import load_csv
from robust_loss_lab.losses.base import Loss
from robust_loss_lab.losses.registry import parse_loss
from robust_loss_lab.models.base import BaseModel
from robust_loss_lab.models.linear import LinearModel
from robust_loss_lab.models.mlp import MLP2
from robust_loss_lab.optimize.trainer import TrainConfig
from robust_loss_lab.processing.base import FeatureMap
from robust_loss_lab.processing.processors import make_feature_map
from robust_loss_lab.regularizers.base import Regularizer
from robust_loss_lab.regularizers.registry import parse_regularizer

log = logging.getLogger(__name__)


@dataclass
class DatasetConfig:
    """Where the data comes from.

    Attributes:
        source: ``"synthetic"`` (Gaussian blobs) or ``"csv"``.
        path: The CSV file for ``source="csv"``.
        n_classes: The class count C (read from the file's labels when None for CSV).
        feature_map: ``"identity"``, ``"appended_constant"`` or ``"random_fourier"``.
    """
    source: str = "synthetic"
    path: Optional[str] = None
    n_classes: Optional[int] = 3
    d: int = 3
    n_per_class: int = 100
    sigma: float = 1.0
    center_scale: float = 3.0
    feature_map: str = "identity"
    rff_dim: int = 64
    rff_bandwidth: float = 1.0

    def validate(self):
        if self.source not in ("synthetic", "csv"):
            raise ConfigError(f"dataset.source must be 'synthetic' or 'csv', got {self.source!r}.")
        if self.source == "csv" and not self.path:
            raise ConfigError("dataset.path is required for source='csv'.")
        if self.source == "synthetic" and self.n_classes is None:
            raise ConfigError("dataset.n_classes is required for synthetic data.")

    def synthetic_spec(self, seed: int) -> SyntheticSpec:
        return SyntheticSpec(
            n_classes=self.n_classes, d=self.d, n_per_class=self.n_per_class,
            sigma=self.sigma, seed=seed, center_scale=self.center_scale,
        )

    def load(self, seed: int = 0) -> Dataset:
        """Draws blobs for ``seed``, or reads the CSV (the same file for every seed)."""
        if self.source == "csv":
            return load_csv(self.path, self.n_classes)
        return make_blobs(self.synthetic_spec(seed))

    def make_feature_map(self, dataset: Dataset, seed: int = 0) -> FeatureMap:
        kwargs = {}
        if self.feature_map == "random_fourier":
            kwargs = {"dim": self.rff_dim, "bandwidth": self.rff_bandwidth, "seed": seed}
        return make_feature_map(self.feature_map, **kwargs).fit(dataset.features)


@dataclass
class ModelConfig:
    """The model family and its zero-output point theta0.

    Attributes:
        family: ``"linear"`` or ``"mlp2"``.
        hidden: The MLP2 hidden width.
    """
    family: str = "linear"
    hidden: int = 16

    def validate(self):
        if self.family not in ("linear", "mlp2"):
            raise ConfigError(f"model.family must be 'linear' or 'mlp2', got {self.family!r}.")
        if self.hidden < 1:
            raise ConfigError(f"model.hidden must be positive, got {self.hidden}.")

    def build(self, dataset: Dataset, feature_map: FeatureMap, reduced: bool, seed: int = 0) -> BaseModel:
        """The model at theta0: zero weights (linear) or seeded W1 with W2 = 0 (MLP2)."""
        k = dataset.n_classes - 1 if reduced else dataset.n_classes
        if self.family == "linear":
            return LinearModel(feature_map, k, reduced=reduced)
        return MLP2.at_origin(dataset.d, k, hidden=self.hidden, seed=seed, reduced=reduced)


@dataclass
class AlphaSchedule:
    """The geometric loss-weight schedule ``alpha0 * ratio**i`` for ``i < count``."""
    alpha0: float = 1.0
    ratio: float = 0.3
    count: int = 7

    def validate(self):
        if not self.alpha0 > 0:
            raise ConfigError(f"alpha_schedule.alpha0 must be positive, got {self.alpha0}.")
        if not 0 < self.ratio < 1:
            raise ConfigError(f"alpha_schedule.ratio must be in (0, 1), got {self.ratio}.")
        if self.count < 2:
            raise ConfigError(f"alpha_schedule.count must be at least 2, got {self.count}.")

    def values(self) -> List[float]:
        return [float(self.alpha0 * self.ratio ** i) for i in range(self.count)]


@dataclass
class SymmetryConfig:
    losses: List[str] = field(default_factory=lambda: ["muh", "mae", "softmax_ce", "gce:q=0.7", "sce:lambda=1.0",
                                                       "square_star"])
    n_classes: List[int] = field(default_factory=lambda: [2, 3, 5, 10])
    trials: int = 1000
    tol: float = 1e-12


@dataclass
class RiskGridConfig:
    """The loss x rho x C grid of the noisy-risk identity check on random linear models."""
    losses: List[str] = field(default_factory=lambda: list(SymmetryConfig().losses))
    rhos: List[float] = field(default_factory=lambda: [0.0, 0.1, 0.3])
    n_classes: List[int] = field(default_factory=lambda: [2, 3, 5])
    n_models: int = 5
    n_samples: int = 20
    d: int = 3
    tol: float = 1e-10


@dataclass
class MitigationConfig:
    """The penalty-coefficient grid of the mitigation demo."""
    penalties: List[str] = field(default_factory=lambda: ["entropy", "label_smoothing"])
    coefficients: List[float] = field(default_factory=lambda: [0.0, 1.0, 10.0, 100.0])
    test_fraction: float = 0.5
    grad_tol: float = 1e-6
    max_iters: int = 2000
    control: bool = True


@dataclass
class ExperimentConfig:
    """The full configuration of one command.

    Attributes:
        dataset: Where the data comes from.
        model: The model family.
        loss: The loss config string.
        regularizer: The regularizer config string.
        rho: The uniform noise level.
        alpha_schedule: The loss weights of the asymptotic sweep.
        seeds: Master seeds; each one draws its own dataset and model init.
        train: The optimizer settings.
        probe_dirs: Random directions of the Hessian probe.
        trace: Write one optimizer trace CSV per trained model.
        n_jobs: Worker processes for independent seeds / grid points; -1 uses every core.
    """
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    loss: str = "muh"
    regularizer: str = "quad:scale=0.5"
    rho: float = 0.4
    alpha_schedule: AlphaSchedule = field(default_factory=AlphaSchedule)
    seeds: List[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    train: TrainConfig = field(default_factory=TrainConfig)
    symmetry: SymmetryConfig = field(default_factory=SymmetryConfig)
    risk_grid: RiskGridConfig = field(default_factory=RiskGridConfig)
    mitigation: MitigationConfig = field(default_factory=MitigationConfig)
    probe_dirs: int = 50
    trace: bool = False
    n_jobs: int = 1

    def validate(self) -> "ExperimentConfig":
        self.dataset.validate()
        self.model.validate()
        self.alpha_schedule.validate()
        if not self.seeds:
            raise ConfigError("seeds must not be empty.")
        if self.probe_dirs < 1:
            raise ConfigError(f"probe_dirs must be positive, got {self.probe_dirs}.")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs must be positive or negative (joblib style), not 0.")
        parse_loss(self.loss)
        return self

    @classmethod
    def for_command(cls, command: str) -> "ExperimentConfig":
        """The defaults of a subcommand."""
        config = cls()
        overrides = COMMAND_DEFAULTS.get(command, {})
        return update(config, overrides) if overrides else config

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base: "ExperimentConfig" = None) -> "ExperimentConfig":
        return update(base or cls(), data)

    @classmethod
    def from_json(cls, path: Union[str, Path], base: "ExperimentConfig" = None) -> "ExperimentConfig":
        log.info(f"Loading config from Path: {path}")
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read config {path}: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"Config {path} must hold a JSON object.")
        return cls.from_dict(data, base)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def noise(self, n_classes: int) -> NoiseSpec:
        return noise_constants(self.rho, n_classes)

    def make_loss(self) -> Loss:
        return parse_loss(self.loss)

    def make_regularizer(self, n_classes: int) -> Regularizer:
        return parse_regularizer(self.regularizer, n_classes)


# The two multi-seed commands fan out over all cores; sigma 0.5 keeps the
# mitigation blobs separable (clean accuracy ~1).
COMMAND_DEFAULTS = {
    "sweep-alpha": {"loss": "softmax_ce", "rho": 0.3, "seeds": [0, 1, 2], "n_jobs": -1},
    "demo-mitigation": {"loss": "softmax_ce", "rho": 0.4, "seeds": list(range(10)), "n_jobs": -1,
                        "dataset": {"sigma": 0.5}},
}


def update(obj: Any, data: Dict[str, Any], where: str = "") -> Any:
    """A copy of a dataclass with ``data`` merged in, recursing into nested dataclasses.

    Raises:
        ConfigError: Naming an unknown key or a value of the wrong kind.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"Config section {where or '<root>'} must be an object.")
    known = {f.name: f for f in fields(obj)}
    changes = {}
    for key, value in data.items():
        path = f"{where}.{key}" if where else key
        if key not in known:
            raise ConfigError(f"Unknown config key {path!r}.")
        current = getattr(obj, key)
        if is_dataclass(current):
            changes[key] = update(current, value, path)
        else:
            changes[key] = _coerce(current, value, path)
    try:
        return replace(obj, **changes)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid config section {where or '<root>'}: {e}")


def _coerce(current: Any, value: Any, path: str) -> Any:
    if value is None:
        return None
    if isinstance(current, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{path} must be true or false, got {value!r}.")
        return value
    if isinstance(current, (int, float)) and not isinstance(current, bool):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
            raise ConfigError(f"{path} must be a finite number, got {value!r}.")
        return int(value) if isinstance(current, int) and float(value).is_integer() else value
    if isinstance(current, list) and not isinstance(value, list):
        raise ConfigError(f"{path} must be a list, got {value!r}.")
    return value


__all__ = [
    "AlphaSchedule",
    "DatasetConfig",
    "ExperimentConfig",
    "MitigationConfig",
    "ModelConfig",
    "RiskGridConfig",
    "SymmetryConfig",
    "update",
]
