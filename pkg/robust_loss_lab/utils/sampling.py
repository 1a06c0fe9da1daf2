"""Seeded random sampling helpers.

Every stochastic routine in the package takes an explicit seed and builds
its own ``numpy.random.Generator`` here, so results are reproducible and
independent work items never share generator state.
"""
from typing import Optional, Sequence

import numpy as np


def make_rng(seed: Optional[int]) -> np.random.Generator:
    """Build the package's named generator (PCG64) from a seed."""
    return np.random.default_rng(seed)


def derive_seed(master: int, index: int) -> int:
    """Derives the seed of work item ``index`` from a master seed.

    Args:
        master: The experiment's master seed.
        index: The position of the work item.

    Returns:
        A 32-bit seed that depends only on ``(master, index)``.
    """
    return int(np.random.SeedSequence([int(master), int(index)]).generate_state(1)[0])


def random_unit_directions(dim: int, count: int, seed: Optional[int]) -> np.ndarray:
    """Samples ``count`` directions uniformly from the unit sphere in ``R^dim``."""
    u = make_rng(seed).standard_normal((count, dim))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


class Sampler:
    """Summary statistics over seeded repetitions."""

    @staticmethod
    def mean_sd(values: Sequence[float]):
        """Mean and sample standard deviation (ddof=1, 0 for a single value)."""
        x = np.asarray(values, dtype=float)
        sd = float(x.std(ddof=1)) if x.size > 1 else 0.0
        return float(x.mean()), sd
