# pyevert/constants.py

"""
Numerical constants and tolerances shared across pyevert.

Tolerances are relative unless the name says otherwise. Values that users
may want to change live in the config schema instead; these are the fixed
thresholds the mesh and energy invariants are stated against.
"""

import math

# Tolerance for floating point comparisons
TOL = 1e-8

# Willmore energy normalisation: smooth round sphere scores exactly 1
ENERGY_NORMALIZATION = 1.0 / (16.0 * math.pi)

# Target area enforced by pose normalisation (area of the unit sphere)
SPHERE_AREA = 4.0 * math.pi

# Faces with area below this fraction of the mean face area are degenerate
DEGENERACY_FACTOR = 1e-12

# Resource guard for icosphere subdivision
MAX_ICOSPHERE_LEVEL = 8

# Minimum sampling resolution for halfway models
MIN_HALFWAY_RESOLUTION = 16

# Backtracking gives up below this step size
MIN_STEP = 1e-14

# Deviation bound for symmetric flows
SYMMETRY_LOST_TOLERANCE = 1e-8

# Number of rigid/similarity invariance modes of the energy
N_INVARIANCE_MODES = 7

# Li-Yau audit slack: energy >= multiplicity - LI_YAU_SLACK
LI_YAU_SLACK = 0.15

# Retries of the Hessian finite-difference step on degenerate displacements
HESSIAN_RETRIES = 5

# Number of significant digits written for mesh coordinates
OBJ_FLOAT_FORMAT = "%.17g"

# Zero padding of frame file names
FRAME_DIGITS = 4
