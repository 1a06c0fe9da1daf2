from .base import Dataset
from .encoding import check_labels, log_softmax, onehot, onehot_star, softmax
from .noise import NoiseSpec, flip_distribution, inject_noise, noise_constants, transition_matrix
from .synthetic import SyntheticSpec, make_blobs
