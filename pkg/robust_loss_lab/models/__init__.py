from .base import METRICS, BaseModel, ModelOutput, agreement, forward, norm_L2, predict
from .linear import LinearModel
from .mlp import MLP2
from .objective import Objective, expected_loss, objective_grad
