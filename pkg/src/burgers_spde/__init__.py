"""Spectral Galerkin / truncated exponential Euler simulation of stochastic Burgers."""

__version__ = "0.1.0"

from .spectral import OperatorSpec, hr_norm, apply_semigroup, apply_fractional_power
from .nonlinearity import BurgersSpec, burgers_f, burgers_f_exact, negative_norm_constant
from .noise import NoiseHierarchy, build_processes, stochastic_convolution
from .scheme import ModelParams, InvalidParameters, simulate_path, step, validate_params
from .analysis import BoundConstants, apriori_check, rate_fit, run_coupled, strong_error

__all__ = [
    "OperatorSpec", "hr_norm", "apply_semigroup", "apply_fractional_power",
    "BurgersSpec", "burgers_f", "burgers_f_exact", "negative_norm_constant",
    "NoiseHierarchy", "build_processes", "stochastic_convolution",
    "ModelParams", "InvalidParameters", "simulate_path", "step", "validate_params",
    "BoundConstants", "apriori_check", "rate_fit", "run_coupled", "strong_error",
]
