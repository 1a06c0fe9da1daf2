"""Deterministic full-batch gradient descent with backtracking line search."""
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Tuple

import numpy as np
import pandas as pd

from robust_loss_lab.core.errors import ConfigError, DivergenceError
from robust_loss_lab.utils.sampling import make_rng

log = logging.getLogger(__name__)

ValueGrad = Callable[[np.ndarray], Tuple[float, np.ndarray]]

TRACE_COLUMNS = ["iter", "objective", "grad_norm", "step"]


@dataclass
class TrainConfig:
    """Settings of ``minimize``.

    Attributes:
        max_iters: The iteration cap.
        grad_tol: Stop when ``||grad|| <= grad_tol * max(1, ||theta||)``.
        init: ``"zeros"`` starts at the family's zero-output point theta0;
            ``"gaussian"`` adds seeded noise scaled by ``init_scale``.
        init_scale: The standard deviation of the Gaussian init.
        init_seed: Seed of the Gaussian init.
        initial_step: The first trial step, and the cap on every trial step.
        shrink: The backtracking factor.
        sufficient_decrease: The Armijo constant.
        min_step: Below this trial step the search gives up (status ``"stalled"``).
        warm_start: Start each search at twice the last accepted step.
    """
    max_iters: int = 20000
    grad_tol: float = 1e-10
    init: str = "zeros"
    init_scale: float = 0.1
    init_seed: int = 0
    initial_step: float = 1.0
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    min_step: float = 1e-20
    warm_start: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be at least 1, got {self.max_iters}.")
        if not (self.grad_tol > 0 and self.initial_step > 0 and self.min_step > 0):
            raise ConfigError("grad_tol, initial_step and min_step must be positive.")
        if not 0 < self.shrink < 1 or not 0 < self.sufficient_decrease < 0.5:
            raise ConfigError("Need 0 < shrink < 1 and 0 < sufficient_decrease < 0.5.")
        if self.init not in ("zeros", "gaussian"):
            raise ConfigError(f"init must be 'zeros' or 'gaussian', got {self.init!r}.")

    def initial_theta(self, theta0: np.ndarray) -> np.ndarray:
        """The starting point: theta0 itself, or theta0 plus seeded Gaussian noise."""
        theta0 = np.asarray(theta0, dtype=float)
        if self.init == "zeros":
            return theta0.copy()
        return theta0 + self.init_scale * make_rng(self.init_seed).standard_normal(theta0.size)

    def replace(self, **changes) -> "TrainConfig":
        return replace(self, **changes)


@dataclass
class MinimizeResult:
    """The outcome of ``minimize``.

    Attributes:
        theta_star: The final iterate.
        iterations: Accepted steps taken.
        final_grad_norm: ``||grad||`` at ``theta_star``.
        status: ``"converged"``, ``"max_iters"`` or ``"stalled"``.
        trace: One row per iterate: iter, objective, grad_norm, step.
    """
    theta_star: np.ndarray
    iterations: int
    final_grad_norm: float
    status: str
    trace: pd.DataFrame = field(repr=False)

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def save_trace(self, path):
        self.trace.to_csv(path, index=False, lineterminator="\n")


def _finite(f: float, g: np.ndarray) -> bool:
    return bool(np.isfinite(f) and np.all(np.isfinite(g)))


def minimize(objective: ValueGrad, theta0: np.ndarray, config: TrainConfig = None) -> MinimizeResult:
    """Minimises a smooth objective by gradient descent with backtracking.

    A trial step ``t`` is accepted when it satisfies the Armijo condition
    ``f(theta - t g) <= f - c t ||g||^2``. When that test falls below the
    objective's rounding floor, a step is accepted if the value did not rise,
    fell by less than the floor, and the directional derivative still
    certifies a decrease (``<g, g_new> >= -(1 - 2c) ||g||^2``). Accepted
    iterates therefore never increase the objective.

    Args:
        objective: Maps theta to ``(value, gradient)``.
        theta0: The starting point.
        config (optional): The TrainConfig. Defaults to TrainConfig().

    Returns:
        The MinimizeResult.

    Raises:
        DivergenceError: If the objective or gradient is non-finite at theta0
            or the objective runs off to minus infinity.
    """
    config = config or TrainConfig()
    c = config.sufficient_decrease
    theta = np.array(theta0, dtype=float)
    f, g = objective(theta)
    rows = []
    if not _finite(f, g):
        raise DivergenceError("Non-finite objective at the starting point.", trace=pd.DataFrame(rows, columns=TRACE_COLUMNS))
    gnorm = float(np.linalg.norm(g))
    rows.append((0, f, gnorm, 0.0))
    status = "max_iters"
    step = config.initial_step
    iterations = 0
    while True:
        if gnorm <= config.grad_tol * max(1.0, float(np.linalg.norm(theta))):
            status = "converged"
            break
        if iterations >= config.max_iters:
            break
        t = min(config.initial_step, 2.0 * step) if (config.warm_start and iterations > 0) else config.initial_step
        floor = 1e-13 * max(1.0, abs(f))
        accepted = False
        while t >= config.min_step:
            candidate = theta - t * g
            fc, gc = objective(candidate)
            if fc == -np.inf or (np.isfinite(fc) and not np.all(np.isfinite(gc))):
                trace = pd.DataFrame(rows, columns=TRACE_COLUMNS)
                raise DivergenceError(f"Objective diverged at iteration {iterations + 1}.", trace=trace)
            if np.isfinite(fc):
                if fc <= f - c * t * gnorm ** 2:
                    accepted = True
                elif f - floor <= fc <= f and float(g @ gc) >= -(1.0 - 2.0 * c) * gnorm ** 2:
                    accepted = True
            if accepted:
                break
            t *= config.shrink
        if not accepted or np.array_equal(candidate, theta):
            status = "stalled"
            log.warning(f"Line search stalled at iteration {iterations}, ||g||={gnorm:.3g}")
            break
        theta, f, g, step = candidate, fc, gc, t
        gnorm = float(np.linalg.norm(g))
        iterations += 1
        rows.append((iterations, f, gnorm, t))
        if iterations % 1000 == 0:
            log.debug(f"iter {iterations}: f={f:.12g} ||g||={gnorm:.3g} step={t:.3g}")
    if status == "max_iters":
        log.warning(f"Stopped at max_iters={config.max_iters} with ||g||={gnorm:.3g}")
    return MinimizeResult(
        theta_star=theta,
        iterations=iterations,
        final_grad_norm=gnorm,
        status=status,
        trace=pd.DataFrame(rows, columns=TRACE_COLUMNS),
    )
