from .base import Base
from .errors import (
    CompatibilityError,
    ConfigError,
    DegeneracyError,
    DegenerateOutputError,
    DivergenceError,
    DomainError,
    LabelIndexError,
    NoiseError,
    ParseError,
    RankError,
    RobustLossLabError,
    ShapeError,
)
