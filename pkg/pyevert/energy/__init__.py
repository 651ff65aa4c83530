# pyevert/energy/__init__.py

"""
Discrete Willmore energy, its exact gradient and matrix-free Hessian tools.
"""

from .willmore import (
    EnergyBreakdown,
    GradientField,
    energy_and_gradient,
    energy_and_gradient_of_positions,
    energy_of_positions,
    finite_difference_gradient,
    willmore_energy,
    willmore_gradient,
)
from .hessian import (
    EigenConfig,
    EigenPair,
    FieldProjector,
    hessian_apply,
    invariance_basis,
    lowest_eigenpair,
    lowest_eigenpairs,
)

__all__ = [
    # Energy
    "EnergyBreakdown",
    "GradientField",
    "willmore_energy",
    "willmore_gradient",
    "energy_and_gradient",
    "energy_of_positions",
    "energy_and_gradient_of_positions",
    "finite_difference_gradient",
    # Second order
    "EigenConfig",
    "EigenPair",
    "FieldProjector",
    "hessian_apply",
    "invariance_basis",
    "lowest_eigenpair",
    "lowest_eigenpairs",
]
