"""Time-fractional phase-field solvers with dissipation diagnostics."""

from .caputo import TimeGrid, caputo_derivative_series, l1_weights, mittag_leffler
from .model import DOUBLE_WELL, ZERO, ModelParams, Operator, Potential
from .solver import Trajectory, run, run_classical, step
from .spectral import PeriodicGrid, SpectralWorkspace
from .weights import WeightFunction, beta_weight, check_weight_admissible, linear_weight, power_weight

__version__ = "0.1.0"

__all__ = [
    "DOUBLE_WELL",
    "ZERO",
    "ModelParams",
    "Operator",
    "PeriodicGrid",
    "Potential",
    "SpectralWorkspace",
    "TimeGrid",
    "Trajectory",
    "WeightFunction",
    "beta_weight",
    "caputo_derivative_series",
    "check_weight_admissible",
    "l1_weights",
    "linear_weight",
    "mittag_leffler",
    "power_weight",
    "run",
    "run_classical",
    "step",
]
