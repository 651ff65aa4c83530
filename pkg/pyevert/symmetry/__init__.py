# pyevert/symmetry/__init__.py

"""
Cyclic symmetry groups, vertex orbit maps and symmetrisation.
"""

from .groups import SymmetryGroup, make_group, reflection_matrix, rotation_matrix
from .orbits import (
    OrbitMap,
    SymmetryConstraint,
    equivariant_projector,
    orbit_expand,
    read_orbit_sidecars,
    sidecar_paths,
    symmetrize,
    symmetrize_field,
    symmetry_deviation,
    write_orbit_sidecars,
)

__all__ = [
    # Groups
    "SymmetryGroup",
    "make_group",
    "rotation_matrix",
    "reflection_matrix",
    # Orbits
    "OrbitMap",
    "SymmetryConstraint",
    "symmetrize",
    "symmetrize_field",
    "symmetry_deviation",
    "orbit_expand",
    "equivariant_projector",
    # Sidecars
    "sidecar_paths",
    "write_orbit_sidecars",
    "read_orbit_sidecars",
]
