"""The verification experiments behind the command line.

Every ``cmd_*`` function runs one experiment end to end and returns a
populated ReportWriter holding its tables and verdict. Work items (seeds,
grid points, loss weights) are independent and merged in submission order.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from robust_loss_lab.core.errors import CompatibilityError, ConfigError, DegeneracyError
from robust_loss_lab.dataset.base import Dataset
from robust_loss_lab.dataset.noise import NoiseSpec, inject_noise, noise_constants
from robust_loss_lab.harness.config import ExperimentConfig
from robust_loss_lab.harness.grid import parameter_grid, run_grid
from robust_loss_lab.io.report import ReportWriter
from robust_loss_lab.losses.base import Loss
from robust_loss_lab.losses.registry import parse_loss
from robust_loss_lab.losses.symmetry import (
    is_symmetric,
    muh_square_decomposition_residual,
    simplex_linearization_sum,
    symmetry_sum,
)
from robust_loss_lab.losses.zoo import MUH, SquareStar, linearize, muh_gradient_mismatch
from robust_loss_lab.models.base import BaseModel, agreement
from robust_loss_lab.models.linear import LinearModel
from robust_loss_lab.models.objective import Objective
from robust_loss_lab.optimize.analysis import alpha_threshold, normalized_output_distance, reference_direction
from robust_loss_lab.optimize.closed_form import closed_form_muh_quadratic, closed_form_reference
from robust_loss_lab.optimize.risk import risk_identity_report
from robust_loss_lab.optimize.trainer import MinimizeResult, TrainConfig, minimize
from robust_loss_lab.processing.processors import AppendConstant
from robust_loss_lab.regularizers.base import Regularizer
from robust_loss_lab.regularizers.penalties import Quadratic, quadratize
from robust_loss_lab.regularizers.registry import parse_regularizer
from robust_loss_lab.utils.sampling import Sampler, derive_seed, make_rng

log = logging.getLogger(__name__)

SWEEP_DISCLAIMER = (
    "Finitely many loss weights and one optimizer trajectory per weight: "
    "the sweep is numerical evidence for the limit alpha -> 0, not a proof."
)
MLP2_AGREEMENT = 0.99
GAP_TOL = 1e-6
SWEEP_FINAL_TOL = 0.05
INVERSION_SLACK = 0.10
DISTANCE_FLOOR = 1e-8


@dataclass
class Setup:
    """Everything one seed of a training experiment needs."""
    dataset: Dataset
    loss: Loss
    regularizer: Regularizer
    noise: NoiseSpec
    model: BaseModel


def make_setup(config: ExperimentConfig, seed: int) -> Setup:
    dataset = config.dataset.load(seed)
    C = dataset.n_classes
    regularizer = config.make_regularizer(C)
    fmap = config.dataset.make_feature_map(dataset, seed)
    model = config.model.build(dataset, fmap, regularizer.reduced, seed)
    return Setup(dataset, config.make_loss(), regularizer, config.noise(C), model)


def train(objective: Objective, theta0: np.ndarray, config: TrainConfig) -> MinimizeResult:
    return minimize(objective, config.initial_theta(theta0), config)


# ---------------------------------------------------------------------------
# check-symmetry
# ---------------------------------------------------------------------------

def cmd_check_symmetry(losses: List[str], n_classes: List[int], trials: int = 1000, tol: float = 1e-12,
                       seed: int = 0, out_dir: Optional[str] = None) -> ReportWriter:
    """Tests every loss for a constant label sum at every class count.

    The verdict passes when each loss is flagged symmetric exactly when it is
    symmetric by construction (MUH, MAE, GCE with q = 1).
    """
    specs = [parse_loss(text) for text in losses]
    rows = []
    for loss in specs:
        for C in n_classes:
            if C < 2:
                raise ConfigError(f"Class counts must be at least 2, got {C}.")
            result = is_symmetric(loss, C, trials=trials, tol=tol, seed=seed)
            row = {
                "loss": loss.to_config(),
                "n_classes": C,
                "symmetric": result["symmetric"],
                "expected": loss.expected_symmetric(),
                "max_deviation": result["max_deviation"],
                "label_sum_at_zero": symmetry_sum(loss, np.zeros(C)),
                "decomposition_residual": np.nan,
                "decomposition_spread": np.nan,
                "linearization_sum": np.nan,
            }
            if isinstance(loss, SquareStar):
                Z = make_rng(seed).standard_normal((trials, C))
                y = make_rng(seed + 1).integers(0, C, size=trials)
                residuals = np.array([muh_square_decomposition_residual(z, int(label), C) for z, label in zip(Z, y)])
                row["decomposition_residual"] = float(residuals[0])
                row["decomposition_spread"] = float(residuals.max() - residuals.min())
            if loss.name == "softmax_ce":
                row["linearization_sum"] = simplex_linearization_sum(C)
            rows.append(row)
    table = pd.DataFrame(rows)
    report = ReportWriter("check-symmetry", {"losses": losses, "n_classes": n_classes, "trials": trials,
                                             "tol": tol, "seed": seed}, out_dir)
    report.add_table("symmetry", table)
    mismatched = table.loc[table["symmetric"] != table["expected"], ["loss", "n_classes"]]
    report.set_verdict(mismatched.empty, mismatched=mismatched.to_dict(orient="records"))
    return report


# ---------------------------------------------------------------------------
# verify-risk-identity
# ---------------------------------------------------------------------------

def random_linear_instance(n_samples: int, d: int, n_classes: int, seed: int):
    """A random dataset and a random linear model with an intercept."""
    rng = make_rng(seed)
    X = rng.standard_normal((n_samples, d))
    y = rng.integers(0, n_classes, size=n_samples)
    dataset = Dataset(X, y, n_classes)
    fmap = AppendConstant().fit(X)
    model = LinearModel(fmap, n_classes, theta=rng.standard_normal(n_classes * fmap.dim))
    return dataset, model


def _risk_item(loss: str, n_classes: int, rho: float, model: int, n_samples: int, d: int, seed: int) -> Dict:
    dataset, linear = random_linear_instance(n_samples, d, n_classes, derive_seed(derive_seed(seed, n_classes), model))
    row = risk_identity_report(linear, dataset, parse_loss(loss), noise_constants(rho, n_classes)).to_dict()
    row["model"] = model
    return row


def cmd_verify_risk_identity(config: ExperimentConfig, out_dir: Optional[str] = None) -> ReportWriter:
    """Checks ``Lbar = rho / (C - 1) T + a L`` over the loss x rho x C x model grid."""
    grid = config.risk_grid
    for C in grid.n_classes:
        for rho in grid.rhos:
            noise_constants(rho, C)
    for text in grid.losses:
        parse_loss(text)
    options = parameter_grid({"loss": grid.losses, "n_classes": grid.n_classes, "rho": grid.rhos,
                              "model": list(range(grid.n_models))})
    for option in options:
        option.update(n_samples=grid.n_samples, d=grid.d, seed=config.seeds[0])
    rows = run_grid(_risk_item, options, config.n_jobs, desc="risk identity")
    table = pd.DataFrame(rows)
    muh_rows = table[table["loss"] == MUH().to_config()]
    max_residual = float(table["identity_residual"].max())
    report = ReportWriter("verify-risk-identity", config.to_dict(), out_dir)
    report.add_table("risk_identity", table)
    report.set_verdict(
        max_residual <= grid.tol,
        max_residual=max_residual,
        muh_max_total_label_risk=float(muh_rows["total_label_risk"].abs().max()) if len(muh_rows) else None,
    )
    return report


# ---------------------------------------------------------------------------
# robustness-muh
# ---------------------------------------------------------------------------

def _robustness_item(config: ExperimentConfig, seed: int) -> Dict:
    s = make_setup(config, seed)
    tcfg = config.train
    clean = train(Objective(s.model, s.dataset, s.loss, s.regularizer), s.model.theta, tcfg)
    noisy = train(Objective(s.model, s.dataset, s.loss, s.regularizer, noise=s.noise), s.model.theta, tcfg)
    clean_model = s.model.with_theta(clean.theta_star)
    noisy_model = s.model.with_theta(noisy.theta_star)
    # The noisy minimiser must be stationary for the clean objective with weight lambda on G.
    equivalent = Objective(s.model, s.dataset, s.loss, s.regularizer, reg_weight=s.noise.lambda_equiv)
    row = {
        "seed": seed,
        "loss": s.loss.to_config(),
        "rho": s.noise.rho,
        "a": s.noise.a,
        "lambda": s.noise.lambda_equiv,
        "gd_agreement": agreement(clean_model.predict(s.dataset), noisy_model.predict(s.dataset)),
        "gd_scaling_gap": float(np.linalg.norm(s.noise.lambda_equiv * noisy.theta_star - clean.theta_star)),
        "clean_objective_grad": float(np.linalg.norm(equivalent.grad(noisy.theta_star))),
        "clean_iterations": clean.iterations,
        "noisy_iterations": noisy.iterations,
        "clean_status": clean.status,
        "noisy_status": noisy.status,
        "closed_form_agreement": np.nan,
        "scaling_gap": np.nan,
        "gd_gap": np.nan,
    }
    closed_form = (isinstance(s.model, LinearModel) and isinstance(s.loss, MUH)
                   and isinstance(s.regularizer, Quadratic) and not s.model.reduced)
    if closed_form:
        fmap = s.model.feature_map
        theta_clean = closed_form_muh_quadratic(s.dataset, s.regularizer.A, None, fmap)
        theta_noisy = closed_form_muh_quadratic(s.dataset, s.regularizer.A, s.noise, fmap)
        row["closed_form_agreement"] = agreement(
            s.model.with_theta(theta_clean.ravel()).predict(s.dataset),
            s.model.with_theta(theta_noisy.ravel()).predict(s.dataset),
        )
        row["scaling_gap"] = float(np.linalg.norm(s.noise.lambda_equiv * theta_noisy - theta_clean))
        row["gd_gap"] = float(max(np.linalg.norm(clean.theta_star - theta_clean.ravel()),
                                  np.linalg.norm(noisy.theta_star - theta_noisy.ravel())))
    log.debug(f"robustness seed={seed}: {row}")
    return {"row": row, "traces": {"clean": clean.trace, "noisy": noisy.trace}}


def robustness_passed(table: pd.DataFrame, family: str, symmetric: bool) -> bool:
    if family != "linear":
        return bool((table["gd_agreement"] >= MLP2_AGREEMENT).all())
    ok = bool((table["gd_agreement"] == 1.0).all())
    closed = table.dropna(subset=["scaling_gap"])
    if len(closed):
        ok &= bool((closed["closed_form_agreement"] == 1.0).all())
        ok &= bool((closed["scaling_gap"] <= GAP_TOL).all() and (closed["gd_gap"] <= GAP_TOL).all())
    if symmetric:
        ok &= bool((table["clean_objective_grad"] <= GAP_TOL).all())
    return ok


def cmd_robustness_muh(config: ExperimentConfig, out_dir: Optional[str] = None) -> ReportWriter:
    """Trains on clean and on exactly-noisy labels and compares the two minimisers.

    Linear models with MUH and a quadratic regularizer are also checked
    against the closed form and the scaling ``lambda Theta_noisy = Theta_clean``.
    """
    options = [{"config": config, "seed": seed} for seed in config.seeds]
    results = run_grid(_robustness_item, options, config.n_jobs, desc="robustness")
    table = pd.DataFrame([r["row"] for r in results])
    report = ReportWriter("robustness-muh", config.to_dict(), out_dir)
    report.add_table("robustness", table)
    if config.trace:
        for result in results:
            for kind, trace in result["traces"].items():
                report.add_table(f"trace_seed{result['row']['seed']}_{kind}", trace)
    symmetric = config.make_loss().expected_symmetric()
    report.set_verdict(
        robustness_passed(table, config.model.family, symmetric),
        family=config.model.family,
        min_agreement=float(table["gd_agreement"].min()),
        max_scaling_gap=float(table["scaling_gap"].max()) if table["scaling_gap"].notna().any() else None,
        max_gd_gap=float(table["gd_gap"].max()) if table["gd_gap"].notna().any() else None,
    )
    return report


# ---------------------------------------------------------------------------
# sweep-alpha
# ---------------------------------------------------------------------------

def check_muh_compatible(loss: Loss, n_classes: int, tol: float = 1e-12):
    """Raises CompatibilityError unless ``grad_z l(0, y) = -onehot*(y)`` for every y."""
    mismatch = muh_gradient_mismatch(loss, n_classes)
    worst = int(np.argmax(mismatch))
    if mismatch[worst] > tol:
        raise CompatibilityError(
            f"loss not MUH-compatible at 0: {loss.to_config()} row y={worst} differs from -onehot* "
            f"by {mismatch[worst]:.3g}"
        )


def _distance(Z1: np.ndarray, Z2: np.ndarray) -> float:
    try:
        return normalized_output_distance(Z1, Z2)
    except DegeneracyError as e:
        log.warning(f"Distance undefined: {e}")
        return np.nan


def _reference_theta(s: Setup, alpha: float, noise: Optional[NoiseSpec], tcfg: TrainConfig) -> np.ndarray:
    """Minimiser of ``alpha l_lin + g_sq``: closed form for linear models, trained otherwise."""
    if isinstance(s.model, LinearModel):
        return closed_form_reference(s.model, s.dataset, s.loss, s.regularizer, alpha, noise)
    lin = linearize(s.loss, s.dataset.n_classes)
    objective = Objective(s.model, s.dataset, lin, quadratize(s.regularizer), alpha=alpha, noise=noise)
    return train(objective, s.model.theta, tcfg).theta_star


def _sweep_item(config: ExperimentConfig, seed: int, alpha: float) -> Dict:
    s = make_setup(config, seed)
    tcfg = config.train.replace(grad_tol=config.train.grad_tol * alpha)
    X = s.dataset.features
    noisy = train(Objective(s.model, s.dataset, s.loss, s.regularizer, alpha=alpha, noise=s.noise),
                  s.model.theta, tcfg)
    clean = train(Objective(s.model, s.dataset, s.loss, s.regularizer, alpha=alpha), s.model.theta, tcfg)
    ref_noisy = s.model.with_theta(_reference_theta(s, alpha, s.noise, tcfg))
    ref_clean = s.model.with_theta(_reference_theta(s, alpha, None, tcfg))
    noisy_model = s.model.with_theta(noisy.theta_star)
    clean_model = s.model.with_theta(clean.theta_star)
    direction = reference_direction(s.dataset, s.loss, s.regularizer, s.model, s.noise,
                                    allow_singular=not isinstance(s.model, LinearModel))
    Z_noisy = noisy_model.forward_array(X)
    reference_preds = ref_clean.predict(s.dataset)
    return {
        "alpha": alpha,
        "seed": seed,
        "dist_to_reference": _distance(Z_noisy, ref_noisy.forward_array(X)),
        "dist_to_vbar": _distance(Z_noisy, direction.Z_bar),
        "clean_pred_agreement": agreement(clean_model.predict(s.dataset), reference_preds),
        "noisy_pred_agreement": agreement(noisy_model.predict(s.dataset), reference_preds),
        "iterations": noisy.iterations,
        "status": noisy.status,
        "vbar_min_row_norm": direction.min_row_norm,
        "degenerate": bool(direction.min_row_norm < DISTANCE_FLOOR),
    }


def _probe_item(config: ExperimentConfig, seed: int) -> Dict:
    s = make_setup(config, seed)
    objective = Objective(s.model, s.dataset, s.loss, s.regularizer, alpha=0.0, noise=s.noise)
    result = alpha_threshold(objective, s.model.theta, alpha_max=config.alpha_schedule.alpha0,
                             n_dirs=config.probe_dirs, seed=seed)
    return {
        "seed": seed,
        "min_rayleigh_at_zero": result["min_rayleigh_at_zero"],
        "alpha0": result["alpha0"],
        "capped": result["capped"],
    }


def decreasing_with_one_inversion(values: np.ndarray) -> bool:
    """Non-increasing up to one rise of at most 10% between neighbours.

    Rises below ``1e-8`` are optimizer noise and are not counted.
    """
    inversions = 0
    for prev, cur in zip(values[:-1], values[1:]):
        if cur > prev + DISTANCE_FLOOR:
            inversions += 1
            if inversions > 1 or cur > (1.0 + INVERSION_SLACK) * prev:
                return False
    return True


def sweep_passed(table: pd.DataFrame, probes: pd.DataFrame, family: str) -> bool:
    distances = table[["dist_to_reference", "dist_to_vbar"]].to_numpy()
    finite = distances[np.isfinite(distances)]
    ok = bool(np.all((finite >= 0) & (finite <= 2)))
    if family != "linear":
        return ok
    ok &= bool((probes["min_rayleigh_at_zero"] > 0).all() and (probes["alpha0"] > 0).all())
    for _, rows in table.groupby("seed", sort=True):
        rows = rows.sort_values("alpha", ascending=False)
        last = rows.iloc[-1]
        ok &= decreasing_with_one_inversion(rows["dist_to_reference"].to_numpy())
        ok &= bool(last["dist_to_reference"] <= SWEEP_FINAL_TOL and last["dist_to_vbar"] <= SWEEP_FINAL_TOL)
        ok &= bool(last["noisy_pred_agreement"] >= MLP2_AGREEMENT)
    return ok


def cmd_sweep_alpha(config: ExperimentConfig, out_dir: Optional[str] = None) -> ReportWriter:
    """Trains ``alpha l + g`` along the alpha schedule and measures the distance
    to the reference minimiser of ``alpha l_lin + g_sq``.

    Raises:
        CompatibilityError: If the loss gradient at 0 is not ``-onehot*(y)``.
    """
    C = config.dataset.n_classes or config.dataset.load(config.seeds[0]).n_classes
    check_muh_compatible(config.make_loss(), C)
    alphas = config.alpha_schedule.values()
    options = [{"config": config, "seed": seed, "alpha": alpha} for seed in config.seeds for alpha in alphas]
    rows = run_grid(_sweep_item, options, config.n_jobs, desc="alpha sweep")
    table = pd.DataFrame(rows).sort_values(["alpha", "seed"], ascending=[False, True], kind="mergesort")
    probes = pd.DataFrame(run_grid(_probe_item, [{"config": config, "seed": seed} for seed in config.seeds],
                                   config.n_jobs, desc="hessian probe"))
    report = ReportWriter("sweep-alpha", config.to_dict(), out_dir)
    report.disclaimer = SWEEP_DISCLAIMER
    report.add_table("sweep", table)
    report.add_table("hessian_probe", probes)
    smallest = table[table["alpha"] == min(alphas)]
    report.set_verdict(
        sweep_passed(table, probes, config.model.family),
        family=config.model.family,
        final_dist_to_reference=float(smallest["dist_to_reference"].max()),
        final_dist_to_vbar=float(smallest["dist_to_vbar"].max()),
        final_noisy_pred_agreement=float(smallest["noisy_pred_agreement"].min()),
        degenerate_rows=int(table["degenerate"].sum()),
        alpha0=float(probes["alpha0"].min()),
    )
    return report


# ---------------------------------------------------------------------------
# demo-mitigation
# ---------------------------------------------------------------------------

def _mitigation_item(config: ExperimentConfig, penalty: str, coefficient: float, rho: float, seed: int) -> Dict:
    dataset = config.dataset.load(seed)
    C = dataset.n_classes
    train_set, test_set = dataset.split(config.mitigation.test_fraction, seed)
    noisy_labels = inject_noise(train_set.labels, noise_constants(rho, C), derive_seed(seed, 1))
    noisy_train = train_set.with_labels(noisy_labels)
    regularizer = parse_regularizer(penalty, C)
    fmap = config.dataset.make_feature_map(noisy_train, seed)
    model = config.model.build(noisy_train, fmap, regularizer.reduced, seed)
    objective = Objective(model, noisy_train, config.make_loss(), regularizer, alpha=1.0, reg_weight=coefficient)
    m = config.mitigation
    result = train(objective, model.theta, config.train.replace(grad_tol=m.grad_tol, max_iters=m.max_iters))
    metrics = model.with_theta(result.theta_star).evaluate(test_set)
    return {
        "penalty": penalty,
        "rho": rho,
        "coefficient": coefficient,
        "seed": seed,
        "accuracy": metrics["accuracy"],
        "iterations": result.iterations,
        "status": result.status,
    }


def cmd_demo_mitigation(config: ExperimentConfig, out_dir: Optional[str] = None) -> ReportWriter:
    """Clean-test accuracy of noisy-trained models across penalty coefficients.

    A noise-free control row (rho = 0) is reported but not asserted.
    """
    m = config.mitigation
    if 0.0 not in [float(c) for c in m.coefficients] or len(m.coefficients) < 2:
        raise ConfigError("mitigation.coefficients must include 0 and at least one positive value.")
    rhos = [config.rho, 0.0] if m.control and config.rho != 0 else [config.rho]
    options = parameter_grid({"penalty": m.penalties, "rho": rhos, "coefficient": m.coefficients,
                              "seed": config.seeds})
    for option in options:
        option["config"] = config
    runs = pd.DataFrame(run_grid(_mitigation_item, options, config.n_jobs, desc="mitigation"))
    summary = []
    for (penalty, rho, coefficient), group in runs.groupby(["penalty", "rho", "coefficient"], sort=False):
        mean, sd = Sampler.mean_sd(group["accuracy"])
        summary.append({"penalty": penalty, "rho": rho, "coefficient": coefficient,
                        "mean_accuracy": mean, "sd_accuracy": sd, "n_seeds": len(group)})
    summary = pd.DataFrame(summary)
    passed = True
    best = {}
    for penalty, rows in summary[summary["rho"] == config.rho].groupby("penalty", sort=False):
        baseline = float(rows.loc[rows["coefficient"] == 0, "mean_accuracy"].iloc[0])
        best[penalty] = float(rows.loc[rows["coefficient"] > 0, "mean_accuracy"].max())
        passed &= best[penalty] >= baseline
    report = ReportWriter("demo-mitigation", config.to_dict(), out_dir)
    report.add_table("mitigation", summary)
    report.add_table("mitigation_runs", runs)
    report.set_verdict(bool(passed), best_mean_accuracy=best)
    return report
