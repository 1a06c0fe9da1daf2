import json

import numpy as np
import pytest

from robust_loss_lab.core.errors import CompatibilityError, ConfigError
from robust_loss_lab.harness import AlphaSchedule, ExperimentConfig
from robust_loss_lab.harness.experiments import (
    check_muh_compatible,
    cmd_check_symmetry,
    cmd_sweep_alpha,
    decreasing_with_one_inversion,
)
from robust_loss_lab.harness.grid import parameter_grid, run_grid
from robust_loss_lab.dataset import make_blobs
from robust_loss_lab.losses import MAE, SoftmaxCE, parse_loss


def square(x):
    return x * x


class TestConfig:
    def test_defaults_reproduce_acceptance_setups(self):
        config = ExperimentConfig()
        assert config.loss == "muh" and config.rho == 0.4 and len(config.seeds) == 5
        assert config.dataset.n_per_class * config.dataset.n_classes == 300
        sweep = ExperimentConfig.for_command("sweep-alpha")
        assert sweep.loss == "softmax_ce" and sweep.rho == 0.3 and sweep.seeds == [0, 1, 2]
        assert sweep.alpha_schedule.values()[-1] < 1e-3

    def test_from_json(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"rho": 0.2, "dataset": {"n_per_class": 20}, "train": {"max_iters": 50}}))
        config = ExperimentConfig.from_json(path)
        assert config.rho == 0.2
        assert config.dataset.n_per_class == 20 and config.dataset.n_classes == 3
        assert config.train.max_iters == 50

    @pytest.mark.parametrize("data", [{"lr": 0.1}, {"dataset": {"colour": "red"}}, {"rho": "high"},
                                      {"train": {"max_iters": 0}}, {"seeds": 3}])
    def test_rejected(self, data):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(data).validate()

    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigError, match="dataset.colour"):
            ExperimentConfig.from_dict({"dataset": {"colour": "red"}})

    @pytest.mark.parametrize("kwargs", [{"alpha0": 0.0}, {"ratio": 1.0}, {"count": 1}])
    def test_alpha_schedule(self, kwargs):
        with pytest.raises(ConfigError):
            AlphaSchedule(**kwargs).validate()

    def test_alpha_values(self):
        np.testing.assert_allclose(AlphaSchedule(1.0, 0.3, 3).values(), [1.0, 0.3, 0.09])

    def test_bad_loss_string(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"loss": "hinge"}).validate()

    def test_multi_seed_commands_run_in_parallel(self):
        assert ExperimentConfig.for_command("sweep-alpha").n_jobs == -1
        assert ExperimentConfig.for_command("demo-mitigation").n_jobs == -1
        assert ExperimentConfig.for_command("robustness-muh").n_jobs == 1
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"n_jobs": 0}).validate()

    def test_mitigation_blobs_are_separable(self):
        config = ExperimentConfig.for_command("demo-mitigation")
        assert config.mitigation.max_iters < config.train.max_iters
        for seed in config.seeds:
            spec = config.dataset.synthetic_spec(seed)
            ds = make_blobs(spec)
            centers = spec.resolved_centers()
            nearest = np.argmin(np.linalg.norm(ds.features[:, None, :] - centers[None], axis=-1), axis=1)
            assert np.mean(nearest == ds.labels) >= 0.99


class TestGrid:
    def test_parameter_grid_order(self):
        grid = parameter_grid({"a": [1, 2], "b": ["x", "y"]})
        assert grid == [{"a": 1, "b": "x"}, {"a": 1, "b": "y"}, {"a": 2, "b": "x"}, {"a": 2, "b": "y"}]

    def test_parallel_keeps_order(self):
        options = [{"x": x} for x in range(6)]
        assert run_grid(square, options, n_jobs=2) == run_grid(square, options, n_jobs=1) == [0, 1, 4, 9, 16, 25]


class TestChecks:
    def test_compatibility(self):
        check_muh_compatible(SoftmaxCE(), 4)
        check_muh_compatible(parse_loss("muh"), 4)
        with pytest.raises(CompatibilityError, match="row y="):
            check_muh_compatible(MAE(), 3)

    @pytest.mark.parametrize("values, expected", [
        ([0.5, 0.3, 0.1], True),
        ([0.5, 0.3, 0.31, 0.1], True),
        ([0.5, 0.3, 0.4, 0.1], False),
        ([0.5, 0.3, 0.31, 0.2, 0.21], False),
        ([1e-12, 3e-12, 2e-12], True),
    ])
    def test_monotone_with_one_inversion(self, values, expected):
        assert decreasing_with_one_inversion(np.array(values)) is expected

    def test_check_symmetry_table(self):
        report = cmd_check_symmetry(["muh", "mae", "square_star", "softmax_ce"], [4], trials=100)
        table = report.tables["symmetry"].set_index("loss")
        assert report.passed
        assert table.loc["muh", "symmetric"] and table.loc["mae", "symmetric"]
        assert not table.loc["softmax_ce", "symmetric"]
        assert table.loc["square_star", "decomposition_residual"] == pytest.approx(0.75)
        assert table.loc["square_star", "decomposition_spread"] <= 1e-12
        assert table.loc["softmax_ce", "linearization_sum"] == pytest.approx(-4.0)
        assert table.loc["muh", "max_deviation"] <= 1e-12


class TestSweep:
    def test_muh_is_its_own_reference(self):
        config = ExperimentConfig.from_dict(
            {"loss": "muh", "seeds": [0], "n_jobs": 1, "probe_dirs": 10, "dataset": {"n_per_class": 30}},
            base=ExperimentConfig.for_command("sweep-alpha"),
        ).validate()
        table = cmd_sweep_alpha(config).tables["sweep"]
        assert len(table) == config.alpha_schedule.count
        assert (table["dist_to_reference"] <= 1e-8).all()
