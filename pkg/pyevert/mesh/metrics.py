# pyevert/mesh/metrics.py

"""
Global mesh metrics with deterministic reductions.

All totals go through :func:`pairwise_sum`, a fixed-order pairwise tree, so
results do not depend on how the per-face terms were produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from .halfedge import TriMesh


def pairwise_sum(values: np.ndarray) -> float:
    """
    Sum a 1-D array with a fixed pairwise reduction tree.

    The array is zero-padded to a power of two and halved by adding
    neighbouring entries until one value remains.
    """
    a = np.asarray(values, dtype=np.float64).ravel()
    if a.size == 0:
        return 0.0
    size = 1 << (a.size - 1).bit_length()
    if size != a.size:
        a = np.concatenate([a, np.zeros(size - a.size)])
    while a.size > 1:
        a = a[0::2] + a[1::2]
    return float(a[0])


def corner_angles(mesh: TriMesh) -> np.ndarray:
    """(F, 3) interior angle at every face corner, in radians."""
    x = mesh.vertices
    f = mesh.faces
    angles = np.empty(f.shape, dtype=np.float64)
    for c in range(3):
        u = x[f[:, (c + 1) % 3]] - x[f[:, c]]
        w = x[f[:, (c + 2) % 3]] - x[f[:, c]]
        angles[:, c] = np.arctan2(np.linalg.norm(np.cross(u, w), axis=1), np.einsum("ij,ij->i", u, w))
    return angles


def face_quality(mesh: TriMesh) -> np.ndarray:
    """
    Per-face shape quality ``4 sqrt(3) A / (l0^2 + l1^2 + l2^2)``.

    Equals 1 for equilateral triangles and tends to 0 for slivers.
    """
    x = mesh.vertices
    f = mesh.faces
    sq = np.zeros(f.shape[0])
    for c in range(3):
        d = x[f[:, (c + 1) % 3]] - x[f[:, c]]
        sq += np.einsum("ij,ij->i", d, d)
    return 4.0 * math.sqrt(3.0) * mesh.face_areas() / sq


def min_face_quality(mesh: TriMesh) -> float:
    return float(face_quality(mesh).min())


def signed_volume(mesh: TriMesh) -> float:
    """Divergence-theorem volume, negated by orientation reversal."""
    x = mesh.vertices
    f = mesh.faces
    triple = np.einsum("ij,ij->i", x[f[:, 0]], np.cross(x[f[:, 1]], x[f[:, 2]]))
    return pairwise_sum(triple) / 6.0


def area_weighted_centroid(mesh: TriMesh) -> np.ndarray:
    x = mesh.vertices
    f = mesh.faces
    areas = mesh.face_areas()
    centers = (x[f[:, 0]] + x[f[:, 1]] + x[f[:, 2]]) / 3.0
    total = pairwise_sum(areas)
    return np.array([pairwise_sum(areas * centers[:, c]) for c in range(3)]) / total


@dataclass(frozen=True)
class MeshMetrics:
    """
    Global invariants of a mesh.

    Attributes
    ----------
    euler_characteristic : int
        V - E + F.
    total_area : float
        Sum of face areas.
    signed_volume : float
        (1/6) sum of scalar triple products over faces.
    total_angle_defect : float
        Sum over vertices of 2 pi minus incident corner angles.
    """

    euler_characteristic: int
    total_area: float
    signed_volume: float
    total_angle_defect: float

    @property
    def gauss_bonnet_residual(self) -> float:
        return abs(self.total_angle_defect - 2.0 * math.pi * self.euler_characteristic)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "euler_characteristic": self.euler_characteristic,
            "total_area": self.total_area,
            "signed_volume": self.signed_volume,
            "total_angle_defect": self.total_angle_defect,
        }


def mesh_metrics(mesh: TriMesh) -> MeshMetrics:
    """
    Compute χ, area, signed volume and total angle defect.

    Parameters
    ----------
    mesh : TriMesh
        Valid mesh.

    Returns
    -------
    MeshMetrics

    Examples
    --------
    >>> from pyevert.mesh.generation import icosphere
    >>> m = mesh_metrics(icosphere(3))
    >>> abs(m.total_angle_defect - 4 * math.pi) < 1e-9
    True
    """
    angles = corner_angles(mesh)
    vertex_angle = np.zeros(mesh.n_vertices)
    for c in range(3):
        vertex_angle += np.bincount(mesh.faces[:, c], weights=angles[:, c], minlength=mesh.n_vertices)
    defect = pairwise_sum(2.0 * math.pi - vertex_angle)
    return MeshMetrics(
        euler_characteristic=mesh.euler_characteristic,
        total_area=pairwise_sum(mesh.face_areas()),
        signed_volume=signed_volume(mesh),
        total_angle_defect=defect,
    )
