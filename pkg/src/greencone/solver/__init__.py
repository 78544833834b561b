from .certificate import certify, slots_for
from .discretization import (
    Discretization,
    apply_L,
    discretize,
    evaluate_operator,
    evaluate_solution,
    interpolate_nodal,
)
from .fixed_points import FixedPointSearch, band_amplitudes, describe_solution, find_fixed_points, seed_amplitudes

__all__ = [
    "Discretization",
    "FixedPointSearch",
    "apply_L",
    "band_amplitudes",
    "certify",
    "describe_solution",
    "discretize",
    "evaluate_operator",
    "evaluate_solution",
    "find_fixed_points",
    "interpolate_nodal",
    "seed_amplitudes",
    "slots_for",
]
