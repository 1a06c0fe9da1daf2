import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from robust_loss_lab.core.errors import ConfigError, DegeneracyError, ParseError
from robust_loss_lab.dataset import softmax
from robust_loss_lab.regularizers import (
    Entropy,
    LabelSmoothing,
    Quadratic,
    embed,
    parse_regularizer,
    quadratize,
    reduce_outputs,
    reg_eval,
    reg_hessian_at_min,
)
from robust_loss_lab.utils import make_rng, numeric_gradient, numeric_hessian, relative_error

finite_rows = arrays(np.float64, st.integers(2, 6), elements=st.floats(-20, 20))


class TestReduced:
    @settings(max_examples=50, deadline=None)
    @given(finite_rows)
    def test_reduce_embed_inverse(self, z):
        np.testing.assert_array_equal(reduce_outputs(embed(z)), z)

    @settings(max_examples=50, deadline=None)
    @given(finite_rows)
    def test_reduction_keeps_softmax(self, z):
        np.testing.assert_allclose(softmax(embed(reduce_outputs(z))), softmax(z), rtol=1e-10, atol=1e-14)

    def test_batch(self):
        Z = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]])
        np.testing.assert_array_equal(reduce_outputs(Z), [[-2.0, -1.0], [0.0, 0.0]])

    def test_public_helpers(self):
        import robust_loss_lab.regularizers.reduced as reduced

        public = {name for name in vars(reduced) if callable(vars(reduced)[name]) and not name.startswith("_")}
        assert public - {"DomainError"} == {"reduce_outputs", "embed"}


class TestQuadratic:
    def setup_method(self):
        self.A = np.array([[1.0, 0.2], [0.2, 0.5]])
        self.reg = Quadratic(self.A)

    def test_value_grad(self):
        z = np.array([1.0, -2.0])
        ev = reg_eval(self.reg, z)
        assert ev.value == pytest.approx(z @ self.A @ z)
        np.testing.assert_allclose(ev.grad, 2 * self.A @ z)
        np.testing.assert_array_equal(reg_hessian_at_min(self.reg), 2 * self.A)

    def test_rejects_indefinite(self):
        with pytest.raises(ConfigError):
            Quadratic(np.diag([1.0, -1.0]))

    def test_rejects_asymmetric(self):
        with pytest.raises(ConfigError):
            Quadratic(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_quadratize_doubles(self):
        np.testing.assert_array_equal(quadratize(self.reg).A, 2 * self.A)


class TestConfidencePenalties:
    @pytest.mark.parametrize("cls, minimum", [(Entropy, lambda C: -np.log(C)), (LabelSmoothing, np.log)])
    def test_minimum_at_zero(self, cls, minimum):
        for C in (2, 3, 6):
            ev = reg_eval(cls(C), np.zeros(C - 1))
            assert ev.value == pytest.approx(minimum(C))
            np.testing.assert_allclose(ev.grad, 0.0, atol=1e-15)

    @pytest.mark.parametrize("cls", [Entropy, LabelSmoothing])
    def test_hessian_matches_finite_differences(self, cls):
        for C in (2, 3, 5):
            reg = cls(C)
            numeric = numeric_hessian(lambda z: reg_eval(reg, z).grad, np.zeros(C - 1))
            assert relative_error(reg.hessian_at_min(), numeric) <= 1e-5

    def test_two_class_hessian(self):
        np.testing.assert_allclose(Entropy(2).hessian_at_min(), [[0.25]])
        np.testing.assert_allclose(LabelSmoothing(2).hessian_at_min(), [[0.25]])

    @pytest.mark.parametrize("cls", [Entropy, LabelSmoothing])
    def test_quadratize_is_positive_definite(self, cls):
        quad = quadratize(cls(4))
        assert quad.reduced and quad.dim == 3
        assert np.linalg.eigvalsh(quad.A).min() > 0

    def test_quadratize_degenerate(self):
        class Flat(Entropy):
            def hessian_at_min(self):
                return np.zeros((self.dim, self.dim))

        with pytest.raises(DegeneracyError):
            quadratize(Flat(3))


class TestGradients:
    @pytest.mark.parametrize("text", ["quad:identity", "quad:scale=0.5", "entropy", "label_smoothing"])
    def test_matches_central_differences(self, text):
        rng = make_rng(2)
        for _ in range(100):
            C = int(rng.integers(2, 6))
            reg = parse_regularizer(text, C)
            z = 2.0 * rng.standard_normal(reg.dim)
            numeric = numeric_gradient(lambda t: reg_eval(reg, t).value, z)
            assert relative_error(reg_eval(reg, z).grad, numeric) <= 1e-6


class TestRegistry:
    def test_quadratic_forms(self, tmp_path):
        np.testing.assert_array_equal(parse_regularizer("quad:identity", 3).A, np.eye(3))
        np.testing.assert_array_equal(parse_regularizer("quad:scale=0.5", 2).A, 0.5 * np.eye(2))
        path = tmp_path / "A.csv"
        path.write_text("2.0,0.0\n0.0,1.0\n")
        np.testing.assert_array_equal(parse_regularizer(f"quad:file={path}", 2).A, np.diag([2.0, 1.0]))

    def test_penalties(self):
        assert isinstance(parse_regularizer("Entropy", 3), Entropy)
        assert parse_regularizer("label_smoothing", 4).dim == 3

    @pytest.mark.parametrize("text", ["ridge", "entropy:t=1", "quad:scale=x", "quad"])
    def test_bad_strings(self, text):
        with pytest.raises(ParseError):
            parse_regularizer(text, 3)

    def test_config_round_trip(self):
        for text in ("quad:scale=0.5", "entropy", "label_smoothing"):
            reg = parse_regularizer(text, 3)
            assert parse_regularizer(reg.to_config(), 3).to_config() == reg.to_config()
