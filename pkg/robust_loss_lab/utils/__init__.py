from .numdiff import gradient_check, numeric_gradient, numeric_hessian, relative_error, second_difference
from .sampling import Sampler, derive_seed, make_rng, random_unit_directions
