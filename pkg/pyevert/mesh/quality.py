# pyevert/mesh/quality.py

"""
Triangulation maintenance during energy flows.

``improve`` runs three passes on a copy of the mesh:

1. collapse the shortest edge of every degenerate face (link condition
   checked, so the result stays a manifold sphere);
2. Delaunay edge flips (equiangulation) until no flippable edge is left or
   the pass budget is spent;
3. tangential uniform-Laplacian smoothing, with each vertex update projected
   onto the tangent plane of its area-weighted normal.

The result is compared against the input's Willmore energy and discarded
when the energy rose by more than ``energy_tolerance``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..constants import DEGENERACY_FACTOR
from ..errors import ConfigError, MeshError, NumericalError
from .halfedge import TriMesh, build_and_validate, triangle_areas

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ImproveConfig:
    """Settings of :func:`improve`."""

    flip_passes: int = 4
    smoothing_iterations: int = 3
    smoothing_weight: float = 0.5
    energy_tolerance: float = 0.0
    degenerate_factor: float = DEGENERACY_FACTOR
    flip_margin: float = 1e-10

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.flip_passes < 0:
            raise ConfigError(f"improve.flip_passes must be >= 0, got {self.flip_passes}")
        if self.smoothing_iterations < 0:
            raise ConfigError(
                f"improve.smoothing_iterations must be >= 0, got {self.smoothing_iterations}"
            )
        if not 0.0 <= self.smoothing_weight <= 1.0:
            raise ConfigError(
                f"improve.smoothing_weight must lie in [0, 1], got {self.smoothing_weight}"
            )
        if not self.energy_tolerance >= 0.0:
            raise ConfigError(
                f"improve.energy_tolerance must be >= 0, got {self.energy_tolerance}"
            )
        if not self.degenerate_factor > 0.0:
            raise ConfigError("improve.degenerate_factor must be positive")
        if self.flip_margin < 0.0:
            raise ConfigError("improve.flip_margin must be >= 0")


@dataclass(frozen=True)
class ImproveReport:
    """What :func:`improve` did; ``rolled_back`` means the input was returned."""

    collapses: int = 0
    flips: int = 0
    max_displacement: float = 0.0
    energy_before: float = math.nan
    energy_after: float = math.nan
    rolled_back: bool = False
    reason: Optional[str] = None

    @property
    def changed(self) -> bool:
        return not self.rolled_back and (
            self.collapses > 0 or self.flips > 0 or self.max_displacement > 0.0
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


# ---------------------------------------------------------------------------
# Edge collapse
# ---------------------------------------------------------------------------

def _neighbours(faces: np.ndarray, n_vertices: int) -> list[set]:
    nbrs = [set() for _ in range(n_vertices)]
    for a, b, c in faces.tolist():
        nbrs[a].update((b, c))
        nbrs[b].update((a, c))
        nbrs[c].update((a, b))
    return nbrs


def _collapse_degenerate(
    positions: np.ndarray, faces: np.ndarray, factor: float
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Collapse the shortest edge of each degenerate face that passes the link condition."""
    collapses = 0
    while True:
        areas = triangle_areas(positions, faces)
        bad = np.flatnonzero(areas < factor * areas.mean())
        if bad.size == 0:
            break
        nbrs = _neighbours(faces, positions.shape[0])
        done = False
        for f in bad.tolist():
            a, b, c = faces[f]
            pairs = [(a, b), (b, c), (c, a)]
            pairs.sort(key=lambda e: float(np.linalg.norm(positions[e[0]] - positions[e[1]])))
            for keep, drop in pairs:
                if len(nbrs[keep] & nbrs[drop]) != 2:
                    continue
                if len(nbrs[keep]) <= 3 or len(nbrs[drop]) <= 3:
                    continue
                positions = positions.copy()
                positions[keep] = 0.5 * (positions[keep] + positions[drop])
                faces = np.where(faces == drop, keep, faces)
                faces = faces[~((faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 2] == faces[:, 0]))]
                # renumber to drop the removed vertex
                positions = np.delete(positions, drop, axis=0)
                faces = faces - (faces > drop)
                collapses += 1
                done = True
                break
            if done:
                break
        if not done:
            break
    return positions, faces, collapses


# ---------------------------------------------------------------------------
# Edge flips
# ---------------------------------------------------------------------------

def _flip_candidates(mesh: TriMesh, margin: float) -> np.ndarray:
    """Half-edges (one per edge) whose opposite angles sum above pi."""
    x = mesh.vertices
    f = mesh.faces
    h = mesh.edge_halfedges
    t = mesh.twin[h]
    # the corner opposite half-edge 3f+k is corner (k+2) % 3 of face f
    c = f[h // 3, (h % 3 + 2) % 3]
    d = f[t // 3, (t % 3 + 2) % 3]
    a = f[h // 3, h % 3]
    b = f[h // 3, (h % 3 + 1) % 3]

    def cot(apex, p, q):
        u = x[p] - x[apex]
        w = x[q] - x[apex]
        return np.einsum("ij,ij->i", u, w) / np.linalg.norm(np.cross(u, w), axis=1)

    score = cot(c, a, b) + cot(d, a, b)
    return h[score < -margin]


def _flip_pass(mesh: TriMesh, margin: float) -> Tuple[np.ndarray, int]:
    """One pass of non-conflicting flips; returns new faces and the flip count."""
    candidates = _flip_candidates(mesh, margin)
    if candidates.size == 0:
        return mesh.faces, 0
    x = mesh.vertices
    faces = np.array(mesh.faces)
    degrees = mesh.vertex_degrees.astype(np.int64).copy()
    existing = {(int(u), int(v)) for u, v in mesh.edges}
    touched = np.zeros(mesh.n_faces, dtype=bool)
    flips = 0
    for h in candidates.tolist():
        t = int(mesh.twin[h])
        f1, f2 = h // 3, t // 3
        if touched[f1] or touched[f2]:
            continue
        a = int(faces[f1, h % 3])
        b = int(faces[f1, (h % 3 + 1) % 3])
        c = int(faces[f1, (h % 3 + 2) % 3])
        d = int(faces[f2, (t % 3 + 2) % 3])
        key = (min(c, d), max(c, d))
        if key in existing or degrees[a] <= 3 or degrees[b] <= 3:
            continue
        n_old = np.cross(x[b] - x[a], x[c] - x[a]) + np.cross(x[a] - x[b], x[d] - x[b])
        n1 = np.cross(x[d] - x[a], x[c] - x[a])
        n2 = np.cross(x[b] - x[d], x[c] - x[d])
        if np.dot(n1, n_old) <= 0.0 or np.dot(n2, n_old) <= 0.0:
            continue
        faces[f1] = (a, d, c)
        faces[f2] = (d, b, c)
        touched[f1] = touched[f2] = True
        existing.discard((min(a, b), max(a, b)))
        existing.add(key)
        degrees[a] -= 1
        degrees[b] -= 1
        degrees[c] += 1
        degrees[d] += 1
        flips += 1
    return faces, flips


# ---------------------------------------------------------------------------
# Smoothing
# ---------------------------------------------------------------------------

def tangential_smooth(mesh: TriMesh, iterations: int, weight: float) -> TriMesh:
    """
    Uniform-Laplacian smoothing restricted to vertex tangent planes.

    Parameters
    ----------
    mesh : TriMesh
        Mesh to smooth.
    iterations : int
        Number of Jacobi sweeps.
    weight : float
        Fraction of the tangential Laplacian applied per sweep.
    """
    adjacency = mesh.vertex_adjacency
    degree = np.asarray(adjacency.sum(axis=1)).ravel()
    current = mesh
    for _ in range(iterations):
        x = current.vertices
        lap = adjacency @ x / degree[:, None] - x
        n = current.vertex_normals()
        lap -= np.einsum("ij,ij->i", lap, n)[:, None] * n
        current = current.with_vertices(x + weight * lap)
    return current


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _safe_energy(mesh: TriMesh) -> float:
    from ..energy.willmore import willmore_energy

    try:
        return willmore_energy(mesh).total
    except NumericalError:
        return math.inf
    except MeshError:
        return math.inf


def improve(mesh: TriMesh, config: Optional[ImproveConfig] = None) -> Tuple[TriMesh, ImproveReport]:
    """
    Repair and equiangulate a mesh, keeping the Willmore energy in check.

    Parameters
    ----------
    mesh : TriMesh
        Valid mesh (degenerate faces allowed; they are what gets collapsed).
    config : ImproveConfig, optional
        Pass budgets and the rollback tolerance.

    Returns
    -------
    (TriMesh, ImproveReport)
        The improved mesh, or the input itself with ``rolled_back=True`` when
        the energy rose beyond ``config.energy_tolerance`` or a pass failed.
        Orbit tags are dropped whenever connectivity changed.

    Examples
    --------
    >>> from pyevert.mesh.generation import icosphere
    >>> out, report = improve(icosphere(2))
    >>> out.euler_characteristic
    2
    """
    config = config or ImproveConfig()
    energy_before = _safe_energy(mesh)

    try:
        positions, faces, collapses = _collapse_degenerate(
            np.array(mesh.vertices), np.array(mesh.faces), config.degenerate_factor
        )
        if collapses:
            current = build_and_validate(faces, positions, check_degenerate=False)
        else:
            current = mesh

        flips = 0
        for _ in range(config.flip_passes):
            new_faces, n_flips = _flip_pass(current, config.flip_margin)
            if n_flips == 0:
                break
            flips += n_flips
            current = build_and_validate(new_faces, current.vertices, check_degenerate=False)

        if collapses or flips:
            current = current.with_orbit_tag(None)
        elif mesh.orbit_tag is not None:
            current = current.with_orbit_tag(mesh.orbit_tag)

        before_smoothing = current.vertices
        current = tangential_smooth(current, config.smoothing_iterations, config.smoothing_weight)
        displacement = float(np.linalg.norm(current.vertices - before_smoothing, axis=1).max())
    except MeshError as exc:
        logger.warning("improve failed, keeping the input mesh: %s", exc)
        return mesh, ImproveReport(
            energy_before=energy_before,
            energy_after=energy_before,
            rolled_back=True,
            reason=str(exc),
        )

    energy_after = _safe_energy(current)
    if current.euler_characteristic != mesh.euler_characteristic:
        reason = "euler characteristic changed"
    elif not math.isfinite(energy_after):
        reason = "improved mesh has degenerate faces"
    elif energy_after > energy_before + config.energy_tolerance:
        reason = f"energy rose from {energy_before:.6g} to {energy_after:.6g}"
    else:
        reason = None

    if reason is not None:
        logger.info("improve rolled back: %s", reason)
        return mesh, ImproveReport(
            collapses=collapses,
            flips=flips,
            max_displacement=displacement,
            energy_before=energy_before,
            energy_after=energy_after,
            rolled_back=True,
            reason=reason,
        )

    logger.debug(
        "improve: %d collapses, %d flips, max displacement %.3e, energy %.6g -> %.6g",
        collapses, flips, displacement, energy_before, energy_after,
    )
    return current, ImproveReport(
        collapses=collapses,
        flips=flips,
        max_displacement=displacement,
        energy_before=energy_before,
        energy_after=energy_after,
    )
