"""Dense linear solves with a pivot-based singularity test."""
import numpy as np
from scipy.linalg import lu_factor, lu_solve

from robust_loss_lab.core.errors import RankError, ShapeError

PIVOT_RTOL = 1e-12


def solve_dense(M: np.ndarray, rhs: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Solves ``M x = rhs`` by LU with partial pivoting.

    Raises:
        RankError: If the smallest pivot is below ``1e-12`` times the largest.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeError(f"Expected a square {what}, got shape {M.shape}.")
    lu, piv = lu_factor(M, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.max() == 0 or pivots.min() <= PIVOT_RTOL * pivots.max():
        raise RankError(f"Singular {what}: pivot ratio {pivots.min() / max(pivots.max(), 1e-300):.3g}.")
    return lu_solve((lu, piv), rhs)
