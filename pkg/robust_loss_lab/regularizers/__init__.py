from .base import RegEval, Regularizer, reg_eval, reg_hessian_at_min
from .penalties import ConfidencePenalty, Entropy, LabelSmoothing, Quadratic, quadratize
from .reduced import embed, reduce_outputs
from .registry import REGULARIZERS, parse_regularizer
