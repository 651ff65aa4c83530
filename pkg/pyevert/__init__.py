# pyevert/__init__.py

"""
Energy-driven minimax sphere eversions (pyevert).

Relaxes symmetric halfway models to critical points of the discrete
Willmore energy, pushes them off their saddle, flows down to the round
sphere and assembles the eversion by time reversal plus the side-exchanging
symmetry. The resulting homotopy is audited for its self-intersection
events and the energy bound of its multiple points.

Main Components
---------------
TriMesh : dataclass
    Closed oriented triangle mesh with half-edge twins.
HalfwayModel : dataclass
    Symmetric immersed sphere with its group and orbits.
EversionConfig : dataclass
    Resolved settings of one run.
run_eversion : function
    Full pipeline returning a :class:`Homotopy`.

Subpackages
-----------
mesh : validation, generation, refinement, quality, metrics, OBJ I/O
energy : Willmore energy, gradient and Hessian eigenanalysis
optimize : gradient flows and saddle pushoff
symmetry : symmetry groups and orbit maps
halfway : Morin and Boy halfway models
intersections : self-intersection reports, events, energy bound audit
pipeline : eversion assembly, analysis and export

Example
-------
>>> from pyevert import EversionConfig, run_eversion
>>> homotopy = run_eversion(EversionConfig(resolution=24))
>>> homotopy.events_frame()
"""

from .mesh import TriMesh, build_and_validate, icosphere
from .energy import willmore_energy, willmore_gradient
from .halfway import HalfwayModel, relax_halfway
from .intersections import classify_events, li_yau_check, self_intersection, tri_tri_intersect
from .pipeline import EversionConfig, Homotopy, analyze_command, export_homotopy, run_eversion
from .run import analyze, evert, export, generate, relax

__all__ = [
    # Core types
    'TriMesh',
    'HalfwayModel',
    'EversionConfig',
    'Homotopy',
    # Operations
    'build_and_validate',
    'icosphere',
    'willmore_energy',
    'willmore_gradient',
    'relax_halfway',
    'self_intersection',
    'classify_events',
    'li_yau_check',
    'tri_tri_intersect',
    'run_eversion',
    'export_homotopy',
    'analyze_command',
    # Run functions
    'generate',
    'relax',
    'evert',
    'export',
    'analyze',
]

__version__ = '0.1.0'
