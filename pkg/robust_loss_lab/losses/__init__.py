from .base import Loss, LossEval, loss_eval
from .registry import LOSSES, parse_loss
from .symmetry import (
    is_symmetric,
    muh_square_decomposition_residual,
    simplex_linearization_sum,
    symmetry_sum,
    total_label_loss,
)
from .zoo import GCE, MAE, MUH, SCE, Linearized, SoftmaxCE, SquareStar, linearize, muh_gradient_mismatch
