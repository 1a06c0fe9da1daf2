"""Config strings for regularizers: ``quad:identity``, ``quad:scale=0.5``,
``quad:file=<path>``, ``entropy``, ``label_smoothing``."""
import numpy as np

from robust_loss_lab.core.errors import ParseError
from robust_loss_lab.io.csv import load_matrix_csv
from robust_loss_lab.losses.registry import split_config
from robust_loss_lab.regularizers.base import Regularizer
from robust_loss_lab.regularizers.penalties import Entropy, LabelSmoothing, Quadratic

REGULARIZERS = {
    "quad": Quadratic,
    "entropy": Entropy,
    "label_smoothing": LabelSmoothing,
}


def _parse_quadratic(text: str, options: dict, n_classes: int) -> Quadratic:
    if len(options) != 1:
        raise ParseError("quad needs exactly one of identity, scale=<s>, file=<path>", token=text)
    (key, value), = options.items()
    if key == "identity" and value == "":
        A = np.eye(n_classes)
    elif key == "scale":
        try:
            A = float(value) * np.eye(n_classes)
        except ValueError:
            raise ParseError(f"quad scale must be a number, got {value!r}", token=value)
    elif key == "file":
        A = load_matrix_csv(value)
    else:
        raise ParseError(f"unknown quad option {key!r}", token=key)
    return Quadratic(A, source=text.strip())


def parse_regularizer(text: str, n_classes: int) -> Regularizer:
    """Builds a regularizer for C classes from its config string (case-insensitive)."""
    name, options = split_config(text)
    if name not in REGULARIZERS:
        raise ParseError(f"unknown regularizer {name!r}; expected one of {', '.join(REGULARIZERS)}", token=name)
    if name == "quad":
        return _parse_quadratic(text, options, n_classes)
    if options:
        raise ParseError(f"regularizer {name!r} takes no parameters", token=next(iter(options)))
    return REGULARIZERS[name](n_classes)
