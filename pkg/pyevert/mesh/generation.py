# pyevert/mesh/generation.py

"""
Sphere mesh generators.

``icosphere`` is the reference round sphere used to check the energy
normalisation and as the downhill target. ``octasphere`` is the parameter
domain for the halfway models: its vertices are built from integer
barycentric grids on the octahedron, so the octahedral rotations and the
central inversion map the vertex set onto itself bit for bit.
"""

from __future__ import annotations

import logging

import numpy as np

from ..constants import MAX_ICOSPHERE_LEVEL
from ..errors import LevelTooLarge
from .halfedge import TriMesh, build_and_validate, unique_edges

logger = logging.getLogger(__name__)

_PHI = (1.0 + 5.0 ** 0.5) / 2.0

_ICOSAHEDRON_VERTICES = np.array(
    [
        [-1, _PHI, 0], [1, _PHI, 0], [-1, -_PHI, 0], [1, -_PHI, 0],
        [0, -1, _PHI], [0, 1, _PHI], [0, -1, -_PHI], [0, 1, -_PHI],
        [_PHI, 0, -1], [_PHI, 0, 1], [-_PHI, 0, -1], [-_PHI, 0, 1],
    ],
    dtype=np.float64,
)

_ICOSAHEDRON_FACES = np.array(
    [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ],
    dtype=np.int64,
)

_OCTAHEDRON_VERTICES = np.array(
    [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
    dtype=np.int64,
)

_OCTAHEDRON_FACES = np.array(
    [
        [0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4],
        [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5],
    ],
    dtype=np.int64,
)


def _midpoint_subdivide(vertices: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split every triangle into four at its edge midpoints."""
    edges = unique_edges(faces)
    n = vertices.shape[0]
    midpoints = 0.5 * (vertices[edges[:, 0]] + vertices[edges[:, 1]])
    keys = edges[:, 0] * n + edges[:, 1]

    def midpoint_index(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        k = np.minimum(a, b) * n + np.maximum(a, b)
        return n + np.searchsorted(keys, k)

    a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
    ab = midpoint_index(a, b)
    bc = midpoint_index(b, c)
    ca = midpoint_index(c, a)
    new_faces = np.concatenate(
        [
            np.column_stack([a, ab, ca]),
            np.column_stack([ab, b, bc]),
            np.column_stack([ca, bc, c]),
            np.column_stack([ab, bc, ca]),
        ]
    )
    return np.concatenate([vertices, midpoints]), new_faces


def icosphere(level: int, radius: float = 1.0) -> TriMesh:
    """
    Subdivided icosahedron projected to a sphere centred at the origin.

    Parameters
    ----------
    level : int
        Number of 1-to-4 subdivisions, at most 8.
    radius : float, default 1.0
        Sphere radius.

    Returns
    -------
    TriMesh
        Mesh with ``10 * 4**level + 2`` vertices and ``20 * 4**level`` faces.

    Raises
    ------
    LevelTooLarge
        If ``level`` exceeds the resource guard.
    ValueError
        If ``level`` is negative or ``radius`` is not positive.
    """
    if level < 0:
        raise ValueError(f"level must be non-negative, got {level}")
    if level > MAX_ICOSPHERE_LEVEL:
        raise LevelTooLarge(f"icosphere level {level} exceeds {MAX_ICOSPHERE_LEVEL}")
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")

    vertices = _ICOSAHEDRON_VERTICES / np.linalg.norm(_ICOSAHEDRON_VERTICES, axis=1)[:, None]
    faces = _ICOSAHEDRON_FACES
    for _ in range(level):
        vertices, faces = _midpoint_subdivide(vertices, faces)
        vertices = vertices / np.linalg.norm(vertices, axis=1)[:, None]
    logger.debug("icosphere level %d: %d vertices", level, vertices.shape[0])
    return build_and_validate(faces, radius * vertices)


def octasphere_grid(frequency: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Integer lattice points and faces of the ``frequency``-subdivided octahedron.

    Returns
    -------
    points : np.ndarray
        (V, 3) int64 lattice coordinates; each point ``p`` lies on the
        octahedron ``|x| + |y| + |z| = frequency``.
    faces : np.ndarray
        (F, 3) outward-oriented faces, ``F = 8 * frequency**2``.
    """
    if frequency < 1:
        raise ValueError(f"frequency must be at least 1, got {frequency}")
    n = frequency
    raw_points = []
    raw_faces = []
    offset = 0
    for face in _OCTAHEDRON_FACES:
        A, B, C = (_OCTAHEDRON_VERTICES[i] for i in face)
        index = {}
        local = []
        for a in range(n + 1):
            for b in range(n + 1 - a):
                c = n - a - b
                index[(a, b)] = offset + len(local)
                local.append(a * A + b * B + c * C)
        for a in range(n):
            for b in range(n - a):
                # up triangle (a+1,b,c) (a,b+1,c) (a,b,c+1)
                raw_faces.append((index[(a + 1, b)], index[(a, b + 1)], index[(a, b)]))
        for a in range(n - 1):
            for b in range(n - 1 - a):
                # down triangle (a,b+1,c+1) (a+1,b,c+1) (a+1,b+1,c)
                raw_faces.append((index[(a, b + 1)], index[(a + 1, b)], index[(a + 1, b + 1)]))
        raw_points.extend(local)
        offset += len(local)

    raw_points = np.array(raw_points, dtype=np.int64)
    points, inverse = np.unique(raw_points, axis=0, return_inverse=True)
    faces = inverse.reshape(-1)[np.array(raw_faces, dtype=np.int64)]
    return points, faces


def octasphere(frequency: int, radius: float = 1.0) -> TriMesh:
    """
    Octahedron-based geodesic sphere.

    Parameters
    ----------
    frequency : int
        Segments per octahedron edge; the mesh has ``8 * frequency**2`` faces.
    radius : float, default 1.0
        Sphere radius.

    Returns
    -------
    TriMesh
        Sphere mesh whose vertex set is exactly invariant under
        ``(x, y, z) -> (-y, x, z)``, ``(x, y, z) -> (z, x, y)`` and
        ``x -> -x``.
    """
    points, faces = octasphere_grid(frequency)
    p = points.astype(np.float64)
    vertices = p / np.sqrt(np.sum(p * p, axis=1))[:, None]
    return build_and_validate(faces, radius * vertices)
