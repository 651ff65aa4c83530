# pyevert/mesh/halfedge.py

"""
Half-edge triangle mesh.

A :class:`TriMesh` is an immutable closed, oriented, manifold triangle mesh.
Half-edges are implicit: half-edge ``h = 3 * f + k`` starts at
``faces[f, k]`` and its ``next`` is ``3 * f + (k + 1) % 3``. Only the twin
table is stored explicitly. Self-intersections are allowed; validity is
purely combinatorial plus per-face nondegeneracy.

Meshes are values: every operation returns a new mesh, arrays are marked
read-only, and derived combinatorial tables are cached per instance.

Example
-------
>>> import numpy as np
>>> from pyevert.mesh.halfedge import build_and_validate
>>> tet = build_and_validate(
...     [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
...     np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], float),
... )
>>> tet.euler_characteristic
2
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import networkx as nx
import numpy as np
from scipy import sparse

from ..constants import DEGENERACY_FACTOR
from ..errors import (
    DegenerateFace,
    MeshError,
    NonManifoldEdge,
    NotOrientable,
    OpenBoundary,
)

logger = logging.getLogger(__name__)


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _directed_keys(faces: np.ndarray, n_vertices: int) -> tuple[np.ndarray, np.ndarray]:
    origin = faces.reshape(-1)
    dest = faces[:, [1, 2, 0]].reshape(-1)
    return origin, dest


def compute_twins(faces: np.ndarray, n_vertices: int) -> np.ndarray:
    """
    Twin table for a closed, consistently oriented face list.

    Parameters
    ----------
    faces : np.ndarray
        (F, 3) vertex indices.
    n_vertices : int
        Number of vertices.

    Returns
    -------
    np.ndarray
        (3F,) array, ``twin[h]`` is the half-edge running opposite to ``h``.

    Raises
    ------
    MeshError
        If some half-edge has no opposite partner.
    """
    origin, dest = _directed_keys(faces, n_vertices)
    keys = origin.astype(np.int64) * n_vertices + dest
    reverse = dest.astype(np.int64) * n_vertices + origin
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    pos = np.searchsorted(sorted_keys, reverse)
    pos = np.clip(pos, 0, len(sorted_keys) - 1)
    found = sorted_keys[pos] == reverse
    if not np.all(found):
        bad = int(np.flatnonzero(~found)[0])
        raise MeshError(
            f"half-edge ({origin[bad]}, {dest[bad]}) has no opposite half-edge"
        )
    return order[pos]


def triangle_areas(positions: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Face areas of a triangle list."""
    p0 = positions[faces[:, 0]]
    cross = np.cross(positions[faces[:, 1]] - p0, positions[faces[:, 2]] - p0)
    return 0.5 * np.linalg.norm(cross, axis=1)


def unique_edges(faces: np.ndarray) -> np.ndarray:
    """Sorted (E, 2) array of undirected edges of a face list."""
    pairs = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    pairs = np.sort(pairs, axis=1)
    return np.unique(pairs, axis=0)


@dataclass(frozen=True, eq=False)
class FaceSoup:
    """
    Immersed triangle list without orientation or manifold requirements.

    Used for surfaces that are not oriented spheres, such as the immersed
    projective plane underneath a Boy double cover. Self-intersection
    analysis accepts either a :class:`TriMesh` or a :class:`FaceSoup`.

    Attributes
    ----------
    vertices : np.ndarray
        (V, 3) positions.
    faces : np.ndarray
        (F, 3) vertex indices.
    """

    vertices: np.ndarray
    faces: np.ndarray

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_faces(self) -> int:
        return int(self.faces.shape[0])

    @cached_property
    def edges(self) -> np.ndarray:
        return unique_edges(self.faces)

    @property
    def mean_edge_length(self) -> float:
        e = self.edges
        return float(np.mean(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)))

    @property
    def bounding_box_diagonal(self) -> float:
        used = self.vertices[np.unique(self.faces)]
        return float(np.linalg.norm(used.max(axis=0) - used.min(axis=0)))

    @cached_property
    def vertex_face_incidence(self) -> sparse.csr_matrix:
        n_faces = self.faces.shape[0]
        rows = self.faces.reshape(-1)
        cols = np.repeat(np.arange(n_faces), 3)
        data = np.ones(rows.shape[0], dtype=np.int8)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n_vertices, n_faces))


@dataclass(frozen=True, eq=False)
class TriMesh:
    """
    Closed oriented manifold triangle mesh.

    Build instances through :func:`build_and_validate`; the constructor does
    not re-check invariants.

    Attributes
    ----------
    vertices : np.ndarray
        (V, 3) float64 positions, read-only.
    faces : np.ndarray
        (F, 3) int64 vertex indices, counter-clockwise seen from the
        positive side, read-only.
    twin : np.ndarray
        (3F,) twin half-edge table, read-only.
    orbit_tag : np.ndarray, optional
        Per-vertex orbit id written by the symmetry module.
    """

    vertices: np.ndarray
    faces: np.ndarray
    twin: np.ndarray
    orbit_tag: Optional[np.ndarray] = None

    # ------------------------------------------------------------------
    # Combinatorics
    # ------------------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_faces(self) -> int:
        return int(self.faces.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.faces.shape[0] * 3 // 2)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def halfedge_origin(self) -> np.ndarray:
        """Origin vertex of every half-edge."""
        return self.faces.reshape(-1)

    @cached_property
    def halfedge_next(self) -> np.ndarray:
        h = np.arange(3 * self.n_faces)
        return _readonly(3 * (h // 3) + (h + 1) % 3)

    @property
    def face_halfedge(self) -> np.ndarray:
        """One half-edge per face."""
        return 3 * np.arange(self.n_faces)

    @cached_property
    def edges(self) -> np.ndarray:
        """(E, 2) undirected edges, one per twin pair, lower index first."""
        origin = self.halfedge_origin
        dest = self.faces[:, [1, 2, 0]].reshape(-1)
        keep = origin < dest
        return _readonly(np.column_stack([origin[keep], dest[keep]]))

    @cached_property
    def edge_halfedges(self) -> np.ndarray:
        """(E,) half-edge running from ``edges[:, 0]`` to ``edges[:, 1]``."""
        origin = self.halfedge_origin
        dest = self.faces[:, [1, 2, 0]].reshape(-1)
        return _readonly(np.flatnonzero(origin < dest))

    @cached_property
    def vertex_face_incidence(self) -> sparse.csr_matrix:
        """Sparse (V, F) incidence matrix."""
        rows = self.faces.reshape(-1)
        cols = np.repeat(np.arange(self.n_faces), 3)
        data = np.ones(rows.shape[0], dtype=np.int8)
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n_vertices, self.n_faces))

    @cached_property
    def vertex_adjacency(self) -> sparse.csr_matrix:
        """Symmetric sparse (V, V) adjacency matrix of the edge graph."""
        e = self.edges
        data = np.ones(2 * e.shape[0])
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sparse.csr_matrix((data, (rows, cols)), shape=(self.n_vertices, self.n_vertices))

    @property
    def vertex_degrees(self) -> np.ndarray:
        return np.asarray(self.vertex_adjacency.sum(axis=1)).ravel()

    # ------------------------------------------------------------------
    # Geometry
    # ------------------------------------------------------------------

    def face_cross(self) -> np.ndarray:
        """Unnormalised face normals (twice the area vector)."""
        x = self.vertices
        f = self.faces
        return np.cross(x[f[:, 1]] - x[f[:, 0]], x[f[:, 2]] - x[f[:, 0]])

    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.face_cross(), axis=1)

    def face_normals(self) -> np.ndarray:
        """Unit face normals."""
        n = self.face_cross()
        return n / np.linalg.norm(n, axis=1)[:, None]

    def vertex_normals(self) -> np.ndarray:
        """Area-weighted unit vertex normals."""
        n = self.face_cross()
        acc = np.zeros((self.n_vertices, 3))
        for k in range(3):
            for c in range(3):
                acc[:, c] += np.bincount(self.faces[:, k], weights=n[:, c], minlength=self.n_vertices)
        norm = np.linalg.norm(acc, axis=1)
        norm[norm == 0.0] = 1.0
        return acc / norm[:, None]

    def edge_lengths(self) -> np.ndarray:
        e = self.edges
        return np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)

    @property
    def mean_edge_length(self) -> float:
        return float(np.mean(self.edge_lengths()))

    @property
    def bounding_box_diagonal(self) -> float:
        return float(np.linalg.norm(self.vertices.max(axis=0) - self.vertices.min(axis=0)))

    def degenerate_faces(self, factor: float = DEGENERACY_FACTOR) -> np.ndarray:
        """Indices of faces with area below ``factor`` times the mean face area."""
        areas = self.face_areas()
        return np.flatnonzero(areas < factor * areas.mean())

    # ------------------------------------------------------------------
    # New meshes
    # ------------------------------------------------------------------

    def with_vertices(self, positions: np.ndarray) -> "TriMesh":
        """Same connectivity, new positions."""
        positions = np.array(positions, dtype=np.float64).reshape(-1, 3)
        if positions.shape[0] != self.n_vertices:
            raise MeshError(
                f"expected {self.n_vertices} positions, got {positions.shape[0]}"
            )
        return TriMesh(_readonly(positions), self.faces, self.twin, self.orbit_tag)

    def with_orbit_tag(self, tag: Optional[np.ndarray]) -> "TriMesh":
        if tag is not None:
            tag = _readonly(np.array(tag, dtype=np.int64))
        return TriMesh(self.vertices, self.faces, self.twin, tag)

    def transformed(self, matrix: np.ndarray, offset: Optional[np.ndarray] = None) -> "TriMesh":
        """Apply ``x -> matrix @ x + offset`` to every vertex."""
        positions = self.vertices @ np.asarray(matrix, dtype=np.float64).T
        if offset is not None:
            positions = positions + np.asarray(offset, dtype=np.float64)
        return self.with_vertices(positions)

    def translated(self, offset: np.ndarray) -> "TriMesh":
        return self.with_vertices(self.vertices + np.asarray(offset, dtype=np.float64))

    def scaled(self, factor: float) -> "TriMesh":
        return self.with_vertices(self.vertices * float(factor))

    def flipped(self) -> "TriMesh":
        """Same surface with reversed orientation."""
        faces = _readonly(np.ascontiguousarray(self.faces[:, [0, 2, 1]]))
        twin = _readonly(compute_twins(faces, self.n_vertices))
        return TriMesh(self.vertices, faces, twin, self.orbit_tag)

    def as_soup(self) -> FaceSoup:
        return FaceSoup(self.vertices, self.faces)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _orient_faces(faces: np.ndarray, edge_faces: np.ndarray, same_direction: np.ndarray) -> np.ndarray:
    """
    Flip faces so that every interior edge is traversed oppositely.

    Faces are flooded component by component from the lowest face index,
    which keeps its orientation.
    """
    graph = nx.Graph()
    graph.add_nodes_from(range(faces.shape[0]))
    for (f, g), same in zip(edge_faces, same_direction):
        graph.add_edge(int(f), int(g), flip=bool(same))

    sign = np.zeros(faces.shape[0], dtype=np.int8)
    for component in nx.connected_components(graph):
        root = min(component)
        sign[root] = 1
        for parent, child in nx.bfs_edges(graph, root):
            flip = graph.edges[parent, child]["flip"]
            sign[child] = -sign[parent] if flip else sign[parent]
        for f, g, data in graph.subgraph(component).edges(data=True):
            expected = -sign[f] if data["flip"] else sign[f]
            if sign[g] != expected:
                raise NotOrientable(
                    f"faces {f} and {g} cannot be oriented consistently"
                )

    flip = sign < 0
    if np.any(flip):
        logger.info("Reoriented %d of %d faces", int(flip.sum()), faces.shape[0])
        faces = faces.copy()
        faces[flip] = faces[flip][:, [0, 2, 1]]
    return faces


def build_and_validate(
    faces,
    positions,
    check_degenerate: bool = True,
) -> TriMesh:
    """
    Build a validated half-edge mesh.

    Parameters
    ----------
    faces : array-like
        (F, 3) vertex-index triples (0-based).
    positions : array-like
        (V, 3) vertex positions.
    check_degenerate : bool, default True
        Reject faces with area below ``1e-12`` times the mean face area.

    Returns
    -------
    TriMesh
        Closed, manifold mesh with globally consistent orientation.

    Raises
    ------
    OpenBoundary
        An edge has a single incident face.
    NonManifoldEdge
        An edge has more than two incident faces.
    NotOrientable
        No consistent orientation exists.
    DegenerateFace
        A face is degenerate (repeated vertex or vanishing area).
    MeshError
        Malformed arrays, indices out of range or unreferenced vertices.
    """
    positions = np.array(positions, dtype=np.float64)
    faces = np.array(faces, dtype=np.int64)
    if positions.ndim != 2 or positions.shape[1] != 3:
        raise MeshError(f"positions must have shape (V, 3), got {positions.shape}")
    if faces.ndim != 2 or faces.shape[1] != 3 or faces.shape[0] == 0:
        raise MeshError(f"faces must have shape (F, 3) with F > 0, got {faces.shape}")
    if not np.all(np.isfinite(positions)):
        raise MeshError("positions contain non-finite values")
    n_vertices = positions.shape[0]
    if faces.min() < 0 or faces.max() >= n_vertices:
        raise MeshError(f"face indices must lie in [0, {n_vertices})")
    repeated = (faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 2] == faces[:, 0])
    if np.any(repeated):
        raise DegenerateFace(f"face {int(np.flatnonzero(repeated)[0])} repeats a vertex")
    if np.unique(faces).shape[0] != n_vertices:
        raise MeshError("mesh has unreferenced vertices")

    # Undirected edge multiplicities
    origin, dest = _directed_keys(faces, n_vertices)
    lo = np.minimum(origin, dest)
    hi = np.maximum(origin, dest)
    keys = lo * n_vertices + hi
    order = np.argsort(keys, kind="stable")
    uniq, start, counts = np.unique(keys[order], return_index=True, return_counts=True)
    if np.any(counts == 1):
        k = int(uniq[counts == 1][0])
        raise OpenBoundary(f"edge ({k // n_vertices}, {k % n_vertices}) is on the boundary")
    if np.any(counts > 2):
        k = int(uniq[counts > 2][0])
        n = int(counts[counts > 2][0])
        raise NonManifoldEdge(
            f"edge ({k // n_vertices}, {k % n_vertices}) has {n} incident faces"
        )

    # Orientation consistency across each edge
    first = order[start]
    second = order[start + 1]
    same_direction = origin[first] == origin[second]
    if np.any(same_direction):
        edge_faces = np.column_stack([first // 3, second // 3])
        faces = _orient_faces(faces, edge_faces, same_direction)

    twin = compute_twins(faces, n_vertices)
    mesh = TriMesh(_readonly(positions), _readonly(faces), _readonly(twin))

    if check_degenerate:
        bad = mesh.degenerate_faces()
        if bad.size:
            raise DegenerateFace(
                f"{bad.size} face(s) below the degeneracy threshold, first is {int(bad[0])}"
            )
    return mesh
