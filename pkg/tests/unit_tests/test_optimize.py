import numpy as np
import pandas as pd
import pytest

from robust_loss_lab.core.errors import ConfigError, DegenerateOutputError, DivergenceError, RankError
from robust_loss_lab.dataset import Dataset, SyntheticSpec, make_blobs, noise_constants
from robust_loss_lab.harness.experiments import random_linear_instance
from robust_loss_lab.losses import MAE, MUH, SoftmaxCE, parse_loss
from robust_loss_lab.models import MLP2, LinearModel, Objective, agreement
from robust_loss_lab.optimize import (
    TrainConfig,
    alpha_threshold,
    clean_risk,
    closed_form_muh_quadratic,
    closed_form_reference,
    exact_noisy_risk,
    hessian_pd_probe,
    minimize,
    normalized_output_distance,
    reference_direction,
    reg_hessian_theta,
    risk_identity_report,
    solve_dense,
)
from robust_loss_lab.processing import IdentityMap
from robust_loss_lab.regularizers import Entropy, Quadratic
from robust_loss_lab.utils import make_rng, numeric_hessian, relative_error

ZOO = ["muh", "mae", "gce:q=0.7", "sce:lambda=1.0", "softmax_ce", "square_star"]


def shifted_quadratic(c):
    return lambda theta: (0.5 * float((theta - c) @ (theta - c)), theta - c)


def rosenbrock(theta):
    x, y = theta
    value = (1 - x) ** 2 + 100 * (y - x * x) ** 2
    grad = np.array([-2 * (1 - x) - 400 * x * (y - x * x), 200 * (y - x * x)])
    return value, grad


class TestMinimize:
    def test_convex_quadratic(self):
        c = np.array([1.0, -2.0, 3.0])
        result = minimize(shifted_quadratic(c), np.zeros(3))
        assert result.converged
        assert np.linalg.norm(result.theta_star - c) <= 1e-8

    def test_stationary_start(self):
        c = np.array([0.5, 0.5])
        result = minimize(shifted_quadratic(c), c)
        assert result.iterations == 0
        assert result.status == "converged"
        assert len(result.trace) == 1

    def test_trace_is_monotone(self):
        result = minimize(rosenbrock, np.array([-1.2, 1.0]), TrainConfig(max_iters=3000, grad_tol=1e-8))
        f = result.trace["objective"].to_numpy()
        assert np.all(np.diff(f) <= 0.0)
        assert list(result.trace.columns) == ["iter", "objective", "grad_norm", "step"]

    @pytest.mark.parametrize("offset", [0.0, 1.0, 1e3, 1e6])
    def test_no_increase_at_rounding_floor(self, offset):
        def shifted(theta):
            value, grad = rosenbrock(theta)
            return value + offset, grad

        result = minimize(shifted, np.array([-1.2, 1.0]), TrainConfig(grad_tol=1e-12, max_iters=20000))
        assert np.all(np.diff(result.trace["objective"].to_numpy()) <= 0.0)
        assert result.status in ("converged", "stalled", "max_iters")

    def test_max_iters_is_reported(self):
        result = minimize(rosenbrock, np.array([-1.2, 1.0]), TrainConfig(max_iters=5))
        assert result.status == "max_iters"
        assert result.iterations == 5
        assert not result.converged

    def test_non_finite_start(self):
        with pytest.raises(DivergenceError):
            minimize(lambda t: (np.nan, np.zeros(1)), np.zeros(1))

    def test_divergence_carries_trace(self):
        def unbounded(theta):
            return (-np.inf if theta[0] > 0.5 else -float(theta[0])), np.array([-1.0])

        with pytest.raises(DivergenceError) as e:
            minimize(unbounded, np.zeros(1))
        assert isinstance(e.value.trace, pd.DataFrame)
        assert len(e.value.trace) == 1

    @pytest.mark.parametrize("kwargs", [{"max_iters": 0}, {"grad_tol": 0.0}, {"shrink": 1.0}, {"init": "ones"}])
    def test_config_validation(self, kwargs):
        with pytest.raises(ConfigError):
            TrainConfig(**kwargs)

    def test_gaussian_init(self):
        config = TrainConfig(init="gaussian", init_scale=0.5, init_seed=3)
        np.testing.assert_array_equal(config.initial_theta(np.zeros(4)), config.initial_theta(np.zeros(4)))
        assert np.all(TrainConfig().initial_theta(np.ones(2)) == 1.0)

    def test_trace_csv(self, tmp_path):
        result = minimize(shifted_quadratic(np.ones(2)), np.zeros(2))
        result.save_trace(tmp_path / "trace.csv")
        assert (tmp_path / "trace.csv").read_text().startswith("iter,objective,grad_norm,step\n")


class TestLinalg:
    def test_solve(self):
        M = np.array([[2.0, 1.0], [1.0, 3.0]])
        np.testing.assert_allclose(M @ solve_dense(M, np.array([1.0, 2.0])), [1.0, 2.0])

    def test_singular(self):
        with pytest.raises(RankError):
            solve_dense(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))


class TestRisk:
    def setup_method(self):
        self.ds, self.model = random_linear_instance(20, 3, 3, seed=4)

    def test_noise_free(self):
        for text in ZOO:
            loss = parse_loss(text)
            spec = noise_constants(0.0, 3)
            assert exact_noisy_risk(self.model, self.ds, loss, spec) == clean_risk(self.model, self.ds, loss)

    def test_muh_scales_by_a(self):
        spec = noise_constants(0.3, 3)
        noisy = exact_noisy_risk(self.model, self.ds, MUH(), spec)
        assert noisy == pytest.approx(spec.a * clean_risk(self.model, self.ds, MUH()), abs=1e-14)

    def test_mae_total_label_risk(self):
        report = risk_identity_report(self.model, self.ds, MAE(), noise_constants(0.3, 3))
        assert report.total_label_risk == pytest.approx(4.0)
        assert report.total_label_spread <= 1e-12

    @pytest.mark.parametrize("text", ZOO)
    @pytest.mark.parametrize("rho", [0.1, 0.3])
    @pytest.mark.parametrize("C", [2, 3, 5])
    def test_identity(self, text, rho, C):
        loss = parse_loss(text)
        for seed in range(5):
            ds, model = random_linear_instance(20, 3, C, seed=seed)
            report = risk_identity_report(model, ds, loss, noise_constants(rho, C))
            assert 0.0 <= report.identity_residual <= 1e-12
            if loss.expected_symmetric():
                assert report.total_label_spread <= 1e-12


class TestClosedForm:
    def setup_method(self):
        self.ds = make_blobs(SyntheticSpec(n_per_class=100, seed=0))
        self.A = 0.5 * np.eye(3)
        self.spec = noise_constants(0.4, 3)

    def test_single_class_example(self):
        ds = Dataset(np.ones((4, 1)), np.zeros(4, dtype=int), 2)
        np.testing.assert_allclose(closed_form_muh_quadratic(ds, 0.5 * np.eye(2)), [[0.5], [-0.5]], atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_noisy_minimiser_is_scaled_clean_minimiser(self, seed):
        ds = make_blobs(SyntheticSpec(seed=seed))
        clean = closed_form_muh_quadratic(ds, self.A)
        noisy = closed_form_muh_quadratic(ds, self.A, self.spec)
        assert np.linalg.norm(self.spec.lambda_equiv * noisy - clean) <= 1e-8
        assert agreement((ds.features @ clean.T).argmax(axis=1), (ds.features @ noisy.T).argmax(axis=1)) == 1.0

    def test_gradient_descent_matches(self):
        model = LinearModel(IdentityMap().fit(self.ds.features), 3)
        objective = Objective(model, self.ds, MUH(), Quadratic(self.A), noise=self.spec)
        result = minimize(objective, model.theta)
        expected = closed_form_muh_quadratic(self.ds, self.A, self.spec)
        assert np.linalg.norm(result.theta_star - expected.ravel()) <= 1e-6

    def test_convex_minimiser_ignores_init(self):
        model = LinearModel(IdentityMap().fit(self.ds.features), 3)
        objective = Objective(model, self.ds, SoftmaxCE(), Quadratic(self.A), alpha=0.3, noise=self.spec)
        outputs = []
        for config in (TrainConfig(), TrainConfig(init="gaussian", init_scale=1.0, init_seed=7)):
            theta = minimize(objective, config.initial_theta(model.theta), config).theta_star
            outputs.append(model.with_theta(theta).forward_array(self.ds.features))
        assert np.max(np.abs(outputs[0] - outputs[1])) <= 1e-6

    def test_singular_second_moment(self):
        ds = Dataset(np.zeros((5, 2)), np.array([0, 1, 2, 0, 1]), 3)
        with pytest.raises(RankError):
            closed_form_muh_quadratic(ds, self.A)

    def test_reference_of_muh_is_muh_minimiser(self):
        model = LinearModel(IdentityMap().fit(self.ds.features), 3)
        reference = closed_form_reference(model, self.ds, MUH(), Quadratic(self.A), beta=0.1)
        direct = closed_form_muh_quadratic(self.ds, self.A, beta=0.1)
        assert normalized_output_distance(self.ds.features @ reference.reshape(3, 3).T,
                                          self.ds.features @ direct.T) <= 1e-12


class TestAnalysis:
    def setup_method(self):
        self.ds = make_blobs(SyntheticSpec(n_per_class=30, seed=1))
        self.reg = Quadratic(0.5 * np.eye(3))
        self.model = LinearModel(IdentityMap().fit(self.ds.features), 3)

    def test_distance(self):
        Z = make_rng(0).standard_normal((10, 3))
        assert normalized_output_distance(Z, 3 * Z) == pytest.approx(0.0, abs=1e-15)
        assert normalized_output_distance(Z, -Z) == pytest.approx(2.0)
        e1 = np.array([[1.0, 0.0]])
        assert normalized_output_distance(e1, np.array([[0.0, 1.0]])) == pytest.approx(np.sqrt(2))
        with pytest.raises(DegenerateOutputError):
            normalized_output_distance(Z, np.zeros_like(Z))

    def test_single_class_direction(self):
        ds = Dataset(np.ones((4, 1)), np.zeros(4, dtype=int), 2)
        model = LinearModel(IdentityMap().fit(ds.features), 2)
        direction = reference_direction(ds, MUH(), Quadratic(0.5 * np.eye(2)), model)
        np.testing.assert_allclose(direction.v_bar / np.linalg.norm(direction.v_bar), [1 / np.sqrt(2), -1 / np.sqrt(2)])
        assert not direction.singular

    def test_muh_direction_is_noise_invariant(self):
        spec = noise_constants(0.4, 3)
        clean = reference_direction(self.ds, MUH(), self.reg, self.model).v_bar
        noisy = reference_direction(self.ds, MUH(), self.reg, self.model, noise=spec).v_bar
        np.testing.assert_allclose(noisy, spec.a * clean, atol=1e-12)

    @pytest.mark.parametrize("family", ["linear", "mlp2"])
    def test_hessian_matches_finite_differences(self, family):
        if family == "linear":
            model, reg = LinearModel(IdentityMap().fit(self.ds.features), 2, reduced=True), Entropy(3)
        else:
            model, reg = MLP2.at_origin(3, 3, hidden=4, seed=0), self.reg
        H = reg_hessian_theta(model, self.ds, reg)
        grad = Objective(model, self.ds, MUH(), reg, alpha=0.0).grad
        assert relative_error(H, numeric_hessian(grad, model.theta)) <= 1e-5

    def test_mlp_direction_needs_pseudo_inverse(self):
        model = MLP2.at_origin(3, 3, hidden=4, seed=0)
        direction = reference_direction(self.ds, SoftmaxCE(), self.reg, model, allow_singular=True)
        assert direction.singular
        assert direction.Z_bar.shape == (self.ds.n, 3)

    def test_probe_on_quadratic(self):
        A = np.diag([0.3, 1.0, 2.0])
        probe = hessian_pd_probe(lambda t: float(t @ A @ t), np.zeros(3), n_dirs=200, seed=1)
        assert probe["min_rayleigh"] >= 2 * 0.3 - 1e-6

    def test_probe_positive_at_alpha_zero(self):
        objective = Objective(self.model, self.ds, SoftmaxCE(), self.reg, alpha=0.0)
        assert hessian_pd_probe(objective, self.model.theta, n_dirs=50, seed=0)["min_rayleigh"] > 0

    def test_alpha_threshold(self):
        objective = Objective(self.model, self.ds, MAE(), self.reg, noise=noise_constants(0.3, 3))
        result = alpha_threshold(objective, self.model.theta, alpha_max=1e3, n_dirs=50, seed=0)
        assert result["min_rayleigh_at_zero"] > 0
        assert 0 < result["alpha0"] < 1e3
        assert not result["capped"]
        passing = [p for p in result["probes"] if p["alpha"] == result["alpha0"]]
        assert passing and passing[0]["min_rayleigh"] > 0
