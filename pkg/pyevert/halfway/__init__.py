# pyevert/halfway/__init__.py

"""
Halfway models of sphere eversions and their symmetric relaxation.
"""

from .parameterizations import (
    BOY_FRAME,
    boy_surface,
    inverse_stereographic,
    morin_ends,
    morin_surface,
    stereographic,
)
from .models import (
    BOY,
    KINDS,
    MORIN,
    HalfwayModel,
    boy_double_cover,
    boy_image_surface,
    choose_inversion_center,
    initial_model,
    load_seed,
    moebius_compactify,
    morin_initial,
    relax_halfway,
    write_seed,
)

__all__ = [
    # Models
    "HalfwayModel",
    "MORIN",
    "BOY",
    "KINDS",
    "morin_initial",
    "boy_double_cover",
    "boy_image_surface",
    "initial_model",
    "relax_halfway",
    # Compactification
    "moebius_compactify",
    "choose_inversion_center",
    # Parameterisations
    "morin_surface",
    "morin_ends",
    "boy_surface",
    "BOY_FRAME",
    "stereographic",
    "inverse_stereographic",
    # Seeds
    "write_seed",
    "load_seed",
]
