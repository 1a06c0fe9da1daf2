import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robust_loss_lab.core.errors import ConfigError, DomainError, LabelIndexError, NoiseError, ShapeError
from robust_loss_lab.dataset import (
    Dataset,
    SyntheticSpec,
    flip_distribution,
    inject_noise,
    log_softmax,
    make_blobs,
    noise_constants,
    onehot_star,
    softmax,
    transition_matrix,
)


class TestEncoding:
    def test_onehot_star(self):
        h = onehot_star(0, 3)
        np.testing.assert_allclose(h, [2 / 3, -1 / 3, -1 / 3])
        assert abs(h.sum()) < 1e-15
        assert h @ h == pytest.approx(2 / 3)

    def test_onehot_star_batch(self):
        H = onehot_star(np.array([0, 2, 1]), 3)
        assert H.shape == (3, 3)
        np.testing.assert_allclose(H.sum(axis=1), 0.0, atol=1e-15)

    @pytest.mark.parametrize("y", [3, -1])
    def test_onehot_star_out_of_range(self, y):
        with pytest.raises(LabelIndexError):
            onehot_star(y, 3)

    def test_too_few_classes(self):
        with pytest.raises(ConfigError):
            onehot_star(0, 1)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-50, 50), min_size=2, max_size=8), st.floats(-100, 100))
    def test_softmax_shift_invariance(self, z, c):
        z = np.array(z)
        np.testing.assert_allclose(softmax(z + c), softmax(z), rtol=1e-10, atol=1e-12)

    def test_softmax_large_logits(self):
        p = softmax(np.array([1000.0, 0.0, 0.0]))
        assert np.all(np.isfinite(p))
        np.testing.assert_allclose(p, [1.0, 0.0, 0.0], atol=1e-300)

    def test_softmax_rejects_nan(self):
        with pytest.raises(DomainError):
            softmax(np.array([0.0, np.nan]))

    def test_log_softmax(self):
        z = np.array([[0.3, -1.2, 2.0], [5.0, 5.0, 5.0]])
        np.testing.assert_allclose(log_softmax(z), np.log(softmax(z)), atol=1e-14)


class TestNoise:
    def test_constants(self):
        spec = noise_constants(0.4, 3)
        assert spec.a == pytest.approx(0.4)
        assert spec.lambda_equiv == pytest.approx(2.5)

    def test_noise_free(self):
        spec = noise_constants(0.0, 4)
        assert spec.a == 1.0 and spec.lambda_equiv == 1.0

    @pytest.mark.parametrize("rho, C", [(0.5, 2), (2 / 3, 3), (-0.1, 3), (0.9, 5)])
    def test_rejects_signal_free_levels(self, rho, C):
        with pytest.raises(NoiseError):
            noise_constants(rho, C)

    def test_flip_distribution(self):
        p = flip_distribution(0, noise_constants(0.3, 3))
        np.testing.assert_allclose(p, [0.7, 0.15, 0.15])
        assert p.sum() == pytest.approx(1.0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 8), st.floats(0.0, 0.95))
    def test_expected_centred_target_scales_by_a(self, C, frac):
        spec = noise_constants(frac * (C - 1) / C, C)
        H = onehot_star(np.arange(C), C)
        T = transition_matrix(spec)
        np.testing.assert_allclose(T.sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(T @ H, spec.a * H, atol=1e-12)

    def test_inject_noise_rho_zero(self):
        y = np.arange(50) % 3
        np.testing.assert_array_equal(inject_noise(y, noise_constants(0.0, 3), seed=1), y)

    def test_inject_noise_deterministic(self):
        y = np.arange(200) % 4
        spec = noise_constants(0.3, 4)
        np.testing.assert_array_equal(inject_noise(y, spec, 7), inject_noise(y, spec, 7))

    def test_inject_noise_rate(self):
        y = np.arange(20000) % 3
        spec = noise_constants(0.4, 3)
        noisy = inject_noise(y, spec, 0)
        # 5 standard deviations of a Binomial(20000, 0.4) share
        assert abs(np.mean(noisy != y) - 0.4) < 5 * np.sqrt(0.24 / 20000)
        changed = noisy[noisy != y]
        assert np.all((changed >= 0) & (changed < 3))


class TestSynthetic:
    def test_balanced_blobs(self):
        ds = make_blobs(SyntheticSpec())
        assert (ds.n, ds.d, ds.n_classes) == (300, 3, 3)
        np.testing.assert_array_equal(ds.class_counts(), [100, 100, 100])

    def test_deterministic(self):
        assert make_blobs(SyntheticSpec(seed=3)) == make_blobs(SyntheticSpec(seed=3))
        assert make_blobs(SyntheticSpec(seed=3)) != make_blobs(SyntheticSpec(seed=4))

    def test_default_centers_need_enough_dimensions(self):
        with pytest.raises(ConfigError):
            make_blobs(SyntheticSpec(n_classes=4, d=3))

    def test_custom_centers(self):
        centers = np.array([[0.0, 0.0], [5.0, 5.0]])
        ds = make_blobs(SyntheticSpec(n_classes=2, d=2, n_per_class=500, sigma=0.1, centers=centers))
        np.testing.assert_allclose(ds.features[ds.labels == 1].mean(axis=0), [5.0, 5.0], atol=0.05)


class TestDataset:
    def setup_method(self):
        self.ds = make_blobs(SyntheticSpec(n_per_class=20))

    def test_split_is_stratified(self):
        train, test = self.ds.split(0.5, seed=0)
        assert train.n + test.n == self.ds.n
        np.testing.assert_array_equal(test.class_counts(), [10, 10, 10])

    def test_with_labels(self):
        flipped = self.ds.with_labels((self.ds.labels + 1) % 3)
        np.testing.assert_array_equal(flipped.features, self.ds.features)
        assert flipped != self.ds

    def test_validation(self):
        with pytest.raises(ShapeError):
            Dataset(np.zeros(3), np.zeros(3, dtype=int))
        with pytest.raises(DomainError):
            Dataset(np.array([[np.inf]]), np.array([0]), 2)
        with pytest.raises(LabelIndexError):
            Dataset(np.zeros((2, 1)), np.array([0, 2]), 2)
