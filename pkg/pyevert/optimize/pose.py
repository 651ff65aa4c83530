# pyevert/optimize/pose.py

"""
Gauge fixing for the scale- and motion-invariant energy.
"""

import math

from ..constants import SPHERE_AREA
from ..mesh.halfedge import TriMesh
from ..mesh.metrics import area_weighted_centroid, pairwise_sum


def normalize_pose(mesh: TriMesh) -> TriMesh:
    """
    Move the area-weighted centroid to the origin and rescale the area to 4 pi.

    No rotation is applied. The operation is idempotent and leaves the
    Willmore energy unchanged.

    Examples
    --------
    >>> from pyevert.mesh.generation import icosphere
    >>> m = normalize_pose(icosphere(2, radius=5.0).translated([1, 2, 3]))
    >>> abs(m.face_areas().sum() - 4 * math.pi) < 1e-12
    True
    """
    centroid = area_weighted_centroid(mesh)
    scale = math.sqrt(SPHERE_AREA / pairwise_sum(mesh.face_areas()))
    return mesh.with_vertices((mesh.vertices - centroid) * scale)
