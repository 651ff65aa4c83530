# pyevert/intersections/__init__.py

"""
Self-intersection analysis and topological event classification.
"""

from .primitives import PairIntersections, intersect_pairs, tri_tri_intersect
from .bvh import FaceBVH, brute_force_pairs, face_boxes
from .report import (
    IntersectionTolerances,
    QuadrupleCluster,
    SelfIntersectionReport,
    candidate_pairs,
    self_intersection,
)
from .events import (
    MIRROR,
    EventKind,
    EventRecord,
    check_frame_spacing,
    classify_events,
    events_from_frame,
    events_to_frame,
    frame_displacement,
    mirror_kinds,
)
from .li_yau import LiYauResult, li_yau_check, li_yau_table

__all__ = [
    # Primitives
    "PairIntersections",
    "intersect_pairs",
    "tri_tri_intersect",
    # Candidate pairs
    "FaceBVH",
    "brute_force_pairs",
    "face_boxes",
    "candidate_pairs",
    # Reports
    "IntersectionTolerances",
    "QuadrupleCluster",
    "SelfIntersectionReport",
    "self_intersection",
    # Events
    "EventKind",
    "EventRecord",
    "MIRROR",
    "classify_events",
    "check_frame_spacing",
    "frame_displacement",
    "mirror_kinds",
    "events_to_frame",
    "events_from_frame",
    # Energy bound
    "LiYauResult",
    "li_yau_check",
    "li_yau_table",
]
