"""Config strings for losses: ``muh``, ``mae``, ``gce:q=0.7``,
``sce:lambda=1.0``, ``softmax_ce``, ``square_star``."""
from typing import Dict, Tuple

from robust_loss_lab.core.errors import ParseError
from robust_loss_lab.losses.base import Loss
from robust_loss_lab.losses.zoo import GCE, MAE, MUH, SCE, SoftmaxCE, SquareStar

LOSSES = {
    "muh": MUH,
    "mae": MAE,
    "gce": GCE,
    "sce": SCE,
    "softmax_ce": SoftmaxCE,
    "square_star": SquareStar,
}

#: Config-string parameter names mapped to constructor keywords.
PARAMETERS = {
    "gce": {"q": "q"},
    "sce": {"lambda": "lambda_sce"},
}


def split_config(text: str) -> Tuple[str, Dict[str, str]]:
    """Splits ``name:key=value,key=value`` into a lower-cased name and raw options."""
    text = text.strip()
    if not text:
        raise ParseError("empty descriptor", token=text)
    name, _, rest = text.partition(":")
    options = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            options[item.lower()] = ""
        else:
            options[key.strip().lower()] = value.strip()
    return name.strip().lower(), options


def parse_loss(text: str) -> Loss:
    """Builds a loss from its config string (case-insensitive).

    Raises:
        ParseError: Naming the offending token for an unknown loss, an unknown
            parameter or a non-numeric value.
    """
    name, options = split_config(text)
    if name not in LOSSES:
        raise ParseError(f"unknown loss {name!r}; expected one of {', '.join(LOSSES)}", token=name)
    allowed = PARAMETERS.get(name, {})
    kwargs = {}
    for key, value in options.items():
        if key not in allowed:
            raise ParseError(f"unknown parameter {key!r} for loss {name!r}", token=key)
        try:
            kwargs[allowed[key]] = float(value)
        except ValueError:
            raise ParseError(f"parameter {key} of {name!r} must be a number, got {value!r}", token=value)
    return LOSSES[name](**kwargs)
