# pyevert/mesh/refinement.py

"""
Conforming edge-length refinement.

Every edge longer than the threshold gets a midpoint. Faces with three
split edges are split 1 -> 4 (red), faces with fewer split edges are closed
with green splits, so the output is conforming after a single pass and the
surface is unchanged as a point set.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ..constants import DEGENERACY_FACTOR
from ..errors import DegenerateResult
from .halfedge import TriMesh, build_and_validate, triangle_areas

logger = logging.getLogger(__name__)


def _split_face(a: int, b: int, c: int, mid: dict, positions: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangles replacing face (a, b, c) given the midpoints of its split edges."""

    def m(u: int, v: int):
        return mid.get((min(u, v), max(u, v)))

    corners = (a, b, c)
    marks = [m(corners[k], corners[(k + 1) % 3]) for k in range(3)]
    n_marked = sum(x is not None for x in marks)
    if n_marked == 0:
        return [(a, b, c)]
    if n_marked == 3:
        mab, mbc, mca = marks
        return [(a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)]

    # rotate so the first split edge starts at corner 0
    k = next(i for i in range(3) if marks[i] is not None)
    if n_marked == 2 and marks[(k + 2) % 3] is not None and marks[(k + 1) % 3] is None:
        k = (k + 2) % 3
    p, q, r = corners[k], corners[(k + 1) % 3], corners[(k + 2) % 3]
    m0 = marks[k]
    if n_marked == 1:
        return [(p, m0, r), (m0, q, r)]

    # edges p-q and q-r are split; cut the corner at q, then the quad
    m1 = marks[(k + 1) % 3]
    d_pm1 = np.linalg.norm(positions[p] - positions[m1])
    d_m0r = np.linalg.norm(positions[m0] - positions[r])
    if d_pm1 <= d_m0r:
        return [(m0, q, m1), (p, m0, m1), (p, m1, r)]
    return [(m0, q, m1), (p, m0, r), (m0, m1, r)]


def subdivide(mesh: TriMesh, edge_length_threshold: float) -> TriMesh:
    """
    Bisect every edge longer than ``edge_length_threshold``.

    Parameters
    ----------
    mesh : TriMesh
        Valid mesh.
    edge_length_threshold : float
        Edges strictly longer than this are split; ``math.inf`` is a no-op.

    Returns
    -------
    TriMesh
        Conforming refined mesh; the input itself when nothing is split.

    Raises
    ------
    DegenerateResult
        If a new face falls below the degeneracy threshold.
    """
    if not edge_length_threshold > 0:
        raise ValueError(f"edge_length_threshold must be positive, got {edge_length_threshold}")
    edges = mesh.edges
    lengths = mesh.edge_lengths()
    split = np.flatnonzero(lengths > edge_length_threshold)
    if split.size == 0 or math.isinf(edge_length_threshold):
        return mesh

    n = mesh.n_vertices
    x = mesh.vertices
    new_points = 0.5 * (x[edges[split, 0]] + x[edges[split, 1]])
    positions = np.concatenate([x, new_points])
    mid = {
        (int(u), int(v)): n + i for i, (u, v) in enumerate(edges[split])
    }

    faces = []
    for a, b, c in mesh.faces.tolist():
        faces.extend(_split_face(a, b, c, mid, positions))
    faces = np.array(faces, dtype=np.int64)

    areas = triangle_areas(positions, faces)
    if np.any(areas < DEGENERACY_FACTOR * areas.mean()):
        raise DegenerateResult("refinement produced faces below the degeneracy threshold")

    logger.debug(
        "Subdivided %d edges: %d -> %d faces", split.size, mesh.n_faces, faces.shape[0]
    )
    return build_and_validate(faces, positions)
