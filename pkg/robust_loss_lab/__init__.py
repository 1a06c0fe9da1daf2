"""Noise-robust losses, output regularizers and the uniform label-noise model."""
__version__ = "0.1.0"
