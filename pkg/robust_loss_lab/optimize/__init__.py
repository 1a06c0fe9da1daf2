from .analysis import (
    ReferenceDirection,
    alpha_threshold,
    hessian_pd_probe,
    normalized_output_distance,
    reference_direction,
    reg_hessian_theta,
)
from .closed_form import (
    closed_form_linear,
    closed_form_muh_quadratic,
    closed_form_reference,
    expected_targets,
    second_moment,
)
from .linalg import solve_dense
from .risk import RiskReport, clean_risk, exact_noisy_risk, risk_identity_report, total_label_risk
from .trainer import MinimizeResult, TrainConfig, minimize
