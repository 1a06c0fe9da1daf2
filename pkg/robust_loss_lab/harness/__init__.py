from .config import (
    AlphaSchedule,
    DatasetConfig,
    ExperimentConfig,
    MitigationConfig,
    ModelConfig,
    RiskGridConfig,
    SymmetryConfig,
)
from .experiments import (
    cmd_check_symmetry,
    cmd_demo_mitigation,
    cmd_robustness_muh,
    cmd_sweep_alpha,
    cmd_verify_risk_identity,
)
