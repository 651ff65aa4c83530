# pyevert/intersections/primitives.py

"""
Triangle-triangle intersection.

The batch kernel :func:`intersect_pairs` tests many face pairs of one mesh
at once. Every predicate it evaluates depends on a single (vertex, face) or
(edge, face-edge) combination written in canonical vertex order, so the two
face pairs that share a segment endpoint compute that endpoint from the same
floating point operations and obtain bitwise equal results. Values within
``eps`` of zero are treated as positive (symbolic perturbation), which keeps
the decisions of neighbouring pairs consistent on degenerate input.

Endpoint keys are ``(edge_lo, edge_hi, other_face)``: the mesh edge that
pierces the other face.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import CoplanarCase


@dataclass(frozen=True)
class PairIntersections:
    """
    Result of :func:`intersect_pairs`.

    Attributes
    ----------
    hit : np.ndarray
        (P,) bool, pair intersects in a segment.
    points : np.ndarray
        (P, 2, 3) segment endpoints (rows of non-hits are zero).
    keys : np.ndarray
        (P, 2, 3) int64 endpoint keys ``(edge_lo, edge_hi, other_face)``.
    coplanar : np.ndarray
        (P,) bool, the two triangles share a plane.
    inconsistent : np.ndarray
        (P,) bool, an odd number of edge crossings was found.
    """

    hit: np.ndarray
    points: np.ndarray
    keys: np.ndarray
    coplanar: np.ndarray
    inconsistent: np.ndarray


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def _plane_distances(x: np.ndarray, fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
    """(P, 3) signed distances of the vertices of ``fa`` to the planes of ``fb``."""
    p0 = x[fb[:, 0]]
    n = np.cross(x[fb[:, 1]] - p0, x[fb[:, 2]] - p0)
    n = n / np.sqrt(_dot(n, n))[:, None]
    return np.stack([_dot(x[fa[:, k]] - p0, n) for k in range(3)], axis=1)


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    return _dot(np.cross(b - a, c - a), d - a)


def _edge_crossings(x: np.ndarray, fa: np.ndarray, fb: np.ndarray, other: np.ndarray, eps: float):
    """Edges of ``fa`` that pierce triangle ``fb``: masks (P, 3), points (P, 3, 3), keys (P, 3, 3)."""
    n_pairs = fa.shape[0]
    d = _plane_distances(x, fa, fb)
    crosses = np.zeros((n_pairs, 3), dtype=bool)
    points = np.zeros((n_pairs, 3, 3))
    keys = np.zeros((n_pairs, 3, 3), dtype=np.int64)
    for k in range(3):
        k1 = (k + 1) % 3
        swap = fa[:, k] > fa[:, k1]
        lo = np.where(swap, fa[:, k1], fa[:, k])
        hi = np.where(swap, fa[:, k], fa[:, k1])
        d_lo = np.where(swap, d[:, k1], d[:, k])
        d_hi = np.where(swap, d[:, k], d[:, k1])
        across = (d_lo >= -eps) != (d_hi >= -eps)

        a = x[lo]
        b = x[hi]
        signs = []
        for m in range(3):
            u0, v0 = fb[:, m], fb[:, (m + 1) % 3]
            flip = u0 > v0
            u = np.where(flip, v0, u0)
            v = np.where(flip, u0, v0)
            raw = np.where(_orient(a, b, x[u], x[v]) >= 0.0, 1, -1)
            signs.append(np.where(flip, -raw, raw))
        through = (signs[0] == signs[1]) & (signs[1] == signs[2])

        crosses[:, k] = across & through
        denom = np.where(across, d_lo - d_hi, 1.0)
        t = np.clip(np.where(across, d_lo / denom, 0.0), 0.0, 1.0)
        points[:, k] = a + t[:, None] * (b - a)
        keys[:, k, 0] = lo
        keys[:, k, 1] = hi
        keys[:, k, 2] = other
    coplanar = np.all(np.abs(d) <= eps, axis=1)
    return crosses, points, keys, coplanar


def intersect_pairs(
    positions: np.ndarray,
    faces: np.ndarray,
    pairs: np.ndarray,
    eps: float,
) -> PairIntersections:
    """
    Intersect face pairs of one mesh.

    Parameters
    ----------
    positions : np.ndarray
        (V, 3) vertex positions.
    faces : np.ndarray
        (F, 3) faces.
    pairs : np.ndarray
        (P, 2) face index pairs, assumed vertex-disjoint.
    eps : float
        Absolute plane tolerance; smaller distances count as positive.

    Returns
    -------
    PairIntersections
    """
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    x = np.asarray(positions, dtype=np.float64)
    f = faces[pairs[:, 0]]
    g = faces[pairs[:, 1]]
    cf, pf, kf, coplanar_f = _edge_crossings(x, f, g, pairs[:, 1], eps)
    cg, pg, kg, coplanar_g = _edge_crossings(x, g, f, pairs[:, 0], eps)

    crosses = np.concatenate([cf, cg], axis=1)
    points = np.concatenate([pf, pg], axis=1)
    keys = np.concatenate([kf, kg], axis=1)
    coplanar = coplanar_f | coplanar_g
    count = crosses.sum(axis=1)
    crosses[coplanar] = False
    hit = (count == 2) & ~coplanar
    inconsistent = (count % 2 == 1) & ~coplanar

    first = np.argsort(~crosses, axis=1, kind="stable")[:, :2]
    rows = np.arange(pairs.shape[0])[:, None]
    seg_points = np.where(hit[:, None, None], points[rows, first], 0.0)
    seg_keys = np.where(hit[:, None, None], keys[rows, first], 0)
    return PairIntersections(hit, seg_points, seg_keys, coplanar, inconsistent)


def tri_tri_intersect(t1, t2, eps: Optional[float] = None) -> Optional[np.ndarray]:
    """
    Intersection segment of two triangles.

    Parameters
    ----------
    t1, t2 : array-like
        (3, 3) vertex coordinates.
    eps : float, optional
        Plane tolerance; defaults to ``1e-12`` times the combined bounding
        box diagonal.

    Returns
    -------
    np.ndarray or None
        (2, 3) segment endpoints, or ``None`` when the triangles are
        disjoint. Triangles sharing two vertices return the shared edge.

    Raises
    ------
    CoplanarCase
        If both triangles lie in one plane.

    Examples
    --------
    >>> flat = [[-1, -1, 0], [2, -1, 0], [-1, 2, 0]]
    >>> wall = [[0.2, 0.1, -1], [0.2, 0.6, -1], [0.2, 0.35, 1]]
    >>> tri_tri_intersect(flat, wall).round(3).tolist()
    [[0.2, 0.475, 0.0], [0.2, 0.225, 0.0]]
    """
    a = np.asarray(t1, dtype=np.float64).reshape(3, 3)
    b = np.asarray(t2, dtype=np.float64).reshape(3, 3)
    shared = [i for i in range(3) if np.any(np.all(b == a[i], axis=1))]
    if len(shared) >= 2:
        return a[shared[:2]].copy()

    x = np.vstack([a, b])
    if eps is None:
        eps = 1e-12 * float(np.linalg.norm(x.max(axis=0) - x.min(axis=0)))
    faces = np.array([[0, 1, 2], [3, 4, 5]])
    result = intersect_pairs(x, faces, np.array([[0, 1]]), eps)
    if result.coplanar[0]:
        raise CoplanarCase("triangles are coplanar")
    if not result.hit[0]:
        return None
    return result.points[0].copy()
