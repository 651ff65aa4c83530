# pyevert/mesh/__init__.py

"""
Half-edge triangle meshes: validation, generation, refinement, quality
maintenance, metrics and OBJ I/O.
"""

from .halfedge import FaceSoup, TriMesh, build_and_validate, compute_twins, triangle_areas
from .metrics import (
    MeshMetrics,
    area_weighted_centroid,
    corner_angles,
    face_quality,
    mesh_metrics,
    min_face_quality,
    pairwise_sum,
    signed_volume,
)
from .generation import icosphere, octasphere, octasphere_grid
from .refinement import subdivide
from .quality import ImproveConfig, ImproveReport, improve, tangential_smooth
from .io import (
    frame_path,
    list_frames,
    parse_obj,
    read_frames,
    read_obj,
    read_polylines,
    write_obj,
    write_polylines,
)

__all__ = [
    # Types
    "TriMesh",
    "FaceSoup",
    "MeshMetrics",
    "ImproveConfig",
    "ImproveReport",
    # Construction
    "build_and_validate",
    "compute_twins",
    "icosphere",
    "octasphere",
    "octasphere_grid",
    # Surgery
    "subdivide",
    "improve",
    "tangential_smooth",
    # Metrics
    "mesh_metrics",
    "pairwise_sum",
    "corner_angles",
    "face_quality",
    "min_face_quality",
    "signed_volume",
    "area_weighted_centroid",
    "triangle_areas",
    # I/O
    "write_obj",
    "read_obj",
    "parse_obj",
    "write_polylines",
    "read_polylines",
    "frame_path",
    "list_frames",
    "read_frames",
]
