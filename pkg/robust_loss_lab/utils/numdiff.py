"""Central finite differences used as gradient and Hessian oracles."""
import logging
from typing import Callable, Tuple

import numpy as np

log = logging.getLogger(__name__)

ValueGrad = Callable[[np.ndarray], Tuple[float, np.ndarray]]


def fd_step(x: np.ndarray, rel: float = 1e-5) -> float:
    """The package's step rule: ``rel * max(1, ||x||)``."""
    return rel * max(1.0, float(np.linalg.norm(x)))


def numeric_gradient(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = None) -> np.ndarray:
    """Central-difference gradient of a scalar function.

    Args:
        f: The scalar function.
        x: The point of evaluation.
        h (optional): The step. Defaults to ``fd_step(x)``.

    Returns:
        An array shaped like ``x``.
    """
    x = np.asarray(x, dtype=float)
    h = fd_step(x) if h is None else h
    grad = np.zeros_like(x)
    flat = grad.reshape(-1)
    for j in range(x.size):
        e = np.zeros(x.size)
        e[j] = h
        e = e.reshape(x.shape)
        flat[j] = (f(x + e) - f(x - e)) / (2 * h)
    return grad


def numeric_hessian(grad: Callable[[np.ndarray], np.ndarray], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Hessian by central differences of an analytic gradient, symmetrised."""
    x = np.asarray(x, dtype=float)
    m = x.size
    H = np.zeros((m, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        H[:, j] = (grad(x + e) - grad(x - e)) / (2 * h)
    return 0.5 * (H + H.T)


def second_difference(f: Callable[[np.ndarray], float], x: np.ndarray, u: np.ndarray, h: float) -> float:
    """Second central difference of ``f`` at ``x`` along ``u``, divided by ``h**2``."""
    return (f(x + h * u) - 2.0 * f(x) + f(x - h * u)) / (h * h)


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """``||a - n|| / max(1, ||n||)``; the scale floor keeps near-zero gradients comparable."""
    return float(np.linalg.norm(analytic - numeric) / max(1.0, float(np.linalg.norm(numeric))))


def gradient_check(value_grad: ValueGrad, x: np.ndarray) -> float:
    """Compares an analytic gradient against central differences.

    Returns:
        The relative error between the two gradients.
    """
    _, analytic = value_grad(x)
    numeric = numeric_gradient(lambda t: value_grad(t)[0], x)
    err = relative_error(analytic, numeric)
    log.debug(f"Gradient check at ||x||={np.linalg.norm(x):.3g}: rel err {err:.3g}")
    return err
