"""Local analysis at the zero-output point theta0: the reference direction,
the Hessian probe and the normalised output distance."""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Union

import numpy as np
from scipy.linalg import pinvh

from robust_loss_lab.core.errors import (
    DegeneracyError,
    DegenerateOutputError,
    RankError,
    ShapeError,
)
from robust_loss_lab.dataset.base import Dataset
from robust_loss_lab.dataset.noise import NoiseSpec
from robust_loss_lab.losses.base import Loss
from robust_loss_lab.models.base import BaseModel, norm_L2
from robust_loss_lab.models.objective import Objective
from robust_loss_lab.optimize.linalg import solve_dense
from robust_loss_lab.regularizers.base import Regularizer
from robust_loss_lab.utils.numdiff import second_difference
from robust_loss_lab.utils.sampling import random_unit_directions

log = logging.getLogger(__name__)

ZERO_OUTPUT_TOL = 1e-12
DEGENERATE_ROW_TOL = 1e-8


def normalized_output_distance(Z1: np.ndarray, Z2: np.ndarray) -> float:
    """``|| Z1 / ||Z1|| - Z2 / ||Z2|| ||`` in the empirical L2 norm over rows.

    Returns:
        A value in ``[0, 2]``; 0 iff one field is a positive multiple of the other.

    Raises:
        DegenerateOutputError: If either field has zero norm.
    """
    Z1 = np.asarray(Z1, dtype=float)
    Z2 = np.asarray(Z2, dtype=float)
    if Z1.shape != Z2.shape:
        raise ShapeError(f"Output fields differ in shape: {Z1.shape} vs {Z2.shape}.")
    n1, n2 = norm_L2(Z1), norm_L2(Z2)
    if n1 == 0.0 or n2 == 0.0:
        raise DegenerateOutputError("Cannot normalise a zero output field.")
    return float(min(norm_L2(Z1 / n1 - Z2 / n2), 2.0))


def reg_hessian_theta(model: BaseModel, dataset: Dataset, regularizer: Regularizer) -> np.ndarray:
    """``(1/n) sum_i J_i^T H J_i``, the parameter Hessian of G at a zero-output point.

    Exact when ``Z(theta) = 0`` because the regularizer's output gradient
    vanishes at its minimum.
    """
    J = model.jacobian(dataset.features)
    H = regularizer.hessian_at_min()
    return np.einsum("ikm,kl,iln->mn", J, H, J) / J.shape[0]


@dataclass
class ReferenceDirection:
    """The direction ``v = -[hess G(theta0)]^{-1} grad L(theta0)`` and its output field.

    Attributes:
        v_bar: The parameter direction.
        Z_bar: ``J v_bar`` normalised to unit L2 norm (``n x k``).
        min_row_norm: The smallest per-sample norm of ``J v_bar`` before normalising.
        degenerate_rows: Samples where that norm is below ``1e-8``.
        singular: Whether the Hessian was singular and a pseudo-inverse was used.
    """
    v_bar: np.ndarray
    Z_bar: np.ndarray
    min_row_norm: float
    degenerate_rows: int
    singular: bool
    hessian: np.ndarray = field(repr=False)
    loss_grad: np.ndarray = field(repr=False)


def reference_direction(dataset: Dataset, loss: Loss, regularizer: Regularizer, model: BaseModel,
                        noise: Optional[NoiseSpec] = None, allow_singular: bool = False) -> ReferenceDirection:
    """Computes the reference direction at the model's parameters theta0.

    Args:
        dataset: The clean-labelled data.
        loss: The loss l.
        regularizer: The output regularizer g.
        model: The model at theta0; its outputs must vanish.
        noise (optional): Differentiate the exact noisy risk instead of the clean one.
        allow_singular (optional): Use the pseudo-inverse when the Hessian is singular.

    Raises:
        DegeneracyError: If the outputs at theta0 are not zero, the loss
            gradient vanishes, or the Hessian is singular and not allowed to be.
        DegenerateOutputError: If the output field ``J v_bar`` is zero.
    """
    theta0 = model.theta
    X = dataset.features
    if np.abs(model.forward_array(X)).max() > ZERO_OUTPUT_TOL:
        raise DegeneracyError("The reference direction needs a parameter point with zero outputs.")
    loss_grad = Objective(model, dataset, loss, None, alpha=1.0, noise=noise).grad(theta0)
    if np.linalg.norm(loss_grad) <= 1e-14:
        raise DegeneracyError(f"Loss gradient of {loss!r} vanishes at theta0.")
    H = reg_hessian_theta(model, dataset, regularizer)
    singular = False
    try:
        v_bar = solve_dense(H, -loss_grad, what="regularizer Hessian")
    except RankError as e:
        if not allow_singular:
            raise DegeneracyError(str(e))
        log.warning(f"{e} Using the pseudo-inverse.")
        v_bar = -pinvh(H) @ loss_grad
        singular = True
    Zv = np.einsum("ikm,m->ik", model.jacobian(X), v_bar)
    scale = norm_L2(Zv)
    if scale == 0.0:
        raise DegenerateOutputError("The reference output field vanishes.")
    row_norms = np.linalg.norm(Zv, axis=1)
    degenerate = int(np.sum(row_norms < DEGENERATE_ROW_TOL))
    if degenerate:
        log.warning(f"{degenerate} of {len(row_norms)} samples have a vanishing reference output row")
    return ReferenceDirection(
        v_bar=v_bar,
        Z_bar=Zv / scale,
        min_row_norm=float(row_norms.min()),
        degenerate_rows=degenerate,
        singular=singular,
        hessian=H,
        loss_grad=loss_grad,
    )


def _scalar(objective: Callable, theta: np.ndarray) -> float:
    out = objective(theta)
    return float(out[0] if isinstance(out, tuple) else out)


def hessian_pd_probe(objective: Callable, theta: np.ndarray, n_dirs: int = 50, seed: int = 0,
                     h: float = None) -> Dict[str, Union[float, np.ndarray]]:
    """Smallest second-difference Rayleigh quotient over random unit directions.

    Args:
        objective: Maps theta to a value, or to ``(value, gradient)``.
        theta: The point of evaluation.
        n_dirs (optional): The number of directions.
        seed (optional): Seed of the directions.
        h (optional): The difference step. Defaults to ``1e-3 * max(1, ||theta||)``.

    Returns:
        ``{"min_rayleigh": float, "rayleigh": per-direction quotients}``.
    """
    theta = np.asarray(theta, dtype=float)
    h = 1e-3 * max(1.0, float(np.linalg.norm(theta))) if h is None else h
    f = lambda t: _scalar(objective, t)  # noqa: E731
    U = random_unit_directions(theta.size, n_dirs, seed)
    q = np.array([second_difference(f, theta, u, h) for u in U])
    return {"min_rayleigh": float(q.min()), "rayleigh": q}


def alpha_threshold(objective: Objective, theta0: np.ndarray, alpha_max: float = 1.0, n_dirs: int = 50,
                    seed: int = 0, max_halvings: int = 30, bisect_steps: int = 20) -> Dict[str, object]:
    """Largest loss weight (up to ``alpha_max``) keeping the probe positive at theta0.

    Halves alpha from ``alpha_max`` until the probe of ``alpha L + G`` turns
    positive, then bisects between the last failing and first passing value.
    The same directions are used at every alpha.

    Returns:
        ``{"alpha0", "min_rayleigh_at_zero", "capped", "probes"}``; ``capped``
        is true when the probe already passes at ``alpha_max``.
    """
    probes = []

    def probe(alpha: float) -> float:
        r = hessian_pd_probe(objective.with_weights(alpha=alpha), theta0, n_dirs, seed)["min_rayleigh"]
        probes.append({"alpha": alpha, "min_rayleigh": r})
        log.debug(f"alpha={alpha:.6g}: min_rayleigh={r:.6g}")
        return r

    at_zero = probe(0.0)
    result = {"alpha0": 0.0, "min_rayleigh_at_zero": at_zero, "capped": False, "probes": probes}
    if at_zero <= 0:
        log.warning(f"Probe is not positive at alpha=0 (min_rayleigh={at_zero:.3g})")
        return result
    if probe(alpha_max) > 0:
        result.update(alpha0=alpha_max, capped=True)
        return result
    hi, lo = alpha_max, alpha_max / 2
    for _ in range(max_halvings):
        if probe(lo) > 0:
            break
        hi, lo = lo, lo / 2
    else:
        return result
    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        if probe(mid) > 0:
            lo = mid
        else:
            hi = mid
    result["alpha0"] = lo
    return result
