"""Exception hierarchy shared by every robust_loss_lab package."""
from typing import Any, Optional

import numpy as np


class RobustLossLabError(Exception):
    """Root of all library errors."""


class ConfigError(RobustLossLabError, ValueError):
    """A parameter or configuration value is out of range."""


class ParseError(ConfigError):
    """A config string or CSV file could not be parsed.

    Args:
        message: What went wrong.
        line: The 1-based line number of the offending row, if any.
        token: The offending token, if any.
    """

    def __init__(self, message: str, line: Optional[int] = None, token: Optional[str] = None):
        self.line = line
        self.token = token
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class NoiseError(ConfigError):
    """The noise level leaves no signal (a <= 0)."""


class CompatibilityError(ConfigError):
    """A loss does not satisfy the gradient condition at z = 0."""


class LabelIndexError(RobustLossLabError, IndexError):
    """A class index lies outside ``[0, C)``."""


class DomainError(RobustLossLabError, ValueError):
    """An input contains non-finite values."""


class ShapeError(RobustLossLabError, ValueError):
    """Array dimensions do not agree."""


class RankError(RobustLossLabError, np.linalg.LinAlgError):
    """A dense system is singular up to the pivot threshold."""


class DegeneracyError(RobustLossLabError):
    """A construction needs a non-degenerate Hessian, gradient or output."""


class DegenerateOutputError(DegeneracyError):
    """An output field has zero L2 norm."""


class DivergenceError(RobustLossLabError):
    """The optimiser met a non-finite objective or gradient.

    Attributes:
        trace: The optimisation trace up to the failure.
    """

    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace
