"""Zeros of strongly monotone operators in finite-dimensional l_s spaces."""
from .lp_space import SpaceSpec, dual_norm, duality_map, inverse_duality_map, norm, pair
from .operators import MonotoneOperator, linear_map, power_map
from .schedules import PowerSchedule, validate
from .solver import StopRule, Status, minimize, solve_vi, solve_zero

__all__ = [
    "SpaceSpec", "norm", "dual_norm", "pair", "duality_map", "inverse_duality_map",
    "MonotoneOperator", "linear_map", "power_map", "PowerSchedule", "validate",
    "StopRule", "Status", "solve_zero", "minimize", "solve_vi",
]
__version__ = "0.1.0"
