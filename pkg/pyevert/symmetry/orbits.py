# pyevert/symmetry/orbits.py

"""
Vertex orbit maps and symmetry enforcement by group averaging.

An :class:`OrbitMap` stores the vertex permutation ``pi`` induced by the
group generator ``G``: a symmetric mesh satisfies ``x[pi[v]] = G x[v]`` for
every vertex. Orbits are the cycles of ``pi``; each has a representative
``r`` and every vertex is ``pi^j(r)`` for its element index ``j``.

Symmetry is enforced by projection: ``symmetrize`` replaces every orbit by
the group average pulled back through its representative, which is the
orthogonal projection onto group-invariant configurations.

Usage:
	orbits = OrbitMap.from_geometry(mesh, group)
	mesh = symmetrize(mesh, group, orbits)
	write_orbit_sidecars("models/morin_r24", group, orbits)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd
import yaml
from scipy.spatial import cKDTree

from ..errors import FixedPointInconsistency, IoFailure, OrbitMismatch, SeedMeshMissing
from ..mesh.halfedge import TriMesh
from .groups import SymmetryGroup

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

ORBIT_COLUMNS = ["VERTEX", "ORBIT", "ELEMENT"]


@dataclass(frozen=True, eq=False)
class OrbitMap:
    """
    Orbits of a cyclic group acting on mesh vertices.

    Attributes
    ----------
    permutation : np.ndarray
        (V,) image of each vertex under the generator.
    orbit_id : np.ndarray
        (V,) orbit index of each vertex.
    element : np.ndarray
        (V,) power ``j`` with ``v = pi^j(representative)``.
    representatives : np.ndarray
        (n_orbits,) representative vertex of each orbit (its smallest index).
    order : int
        Order of the acting group.
    """

    permutation: np.ndarray
    orbit_id: np.ndarray
    element: np.ndarray
    representatives: np.ndarray
    order: int

    @property
    def n_vertices(self) -> int:
        return int(self.permutation.shape[0])

    @property
    def n_orbits(self) -> int:
        return int(self.representatives.shape[0])

    def orbit_sizes(self) -> np.ndarray:
        return np.bincount(self.orbit_id, minlength=self.n_orbits)

    def power(self, j: int) -> np.ndarray:
        """Permutation of ``generator ** j``."""
        j = int(j) % self.order
        out = np.arange(self.n_vertices)
        for _ in range(j):
            out = self.permutation[out]
        return out

    def check_automorphism(self, faces: np.ndarray) -> None:
        """
        Raise :class:`OrbitMismatch` unless ``pi`` maps faces onto faces.

        Faces are compared as vertex sets, so orientation-reversing actions
        are accepted.
        """
        faces = np.asarray(faces)
        original = np.sort(faces, axis=1)
        mapped = np.sort(self.permutation[faces], axis=1)
        n = self.n_vertices
        key = lambda f: (f[:, 0] * n + f[:, 1]) * n + f[:, 2]
        if not np.array_equal(np.sort(key(original)), np.sort(key(mapped))):
            raise OrbitMismatch("orbit permutation is not a combinatorial automorphism of the mesh")

    def subgroup(self, step: int) -> "OrbitMap":
        """Orbit map of the subgroup generated by ``generator ** step``."""
        if step < 1 or self.order % step != 0:
            raise OrbitMismatch(f"step {step} does not divide order {self.order}")
        return OrbitMap.from_permutation(self.power(step), self.order // step)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_permutation(cls, permutation, order: int) -> "OrbitMap":
        """
        Build orbits from the generator's vertex permutation.

        Raises
        ------
        OrbitMismatch
            If ``permutation`` is not a bijection or its ``order``-th power
            is not the identity.
        """
        perm = np.asarray(permutation, dtype=np.int64).reshape(-1)
        n = perm.shape[0]
        if n == 0 or perm.min() < 0 or perm.max() >= n or np.unique(perm).shape[0] != n:
            raise OrbitMismatch("orbit permutation is not a bijection of the vertices")
        orbit_id = np.full(n, -1, dtype=np.int64)
        element = np.zeros(n, dtype=np.int64)
        reps = []
        for v in range(n):
            if orbit_id[v] >= 0:
                continue
            oid = len(reps)
            reps.append(v)
            u, j = v, 0
            while orbit_id[u] < 0:
                orbit_id[u] = oid
                element[u] = j
                u = int(perm[u])
                j += 1
            if u != v or order % j != 0:
                raise OrbitMismatch(
                    f"orbit of vertex {v} has length {j}, which does not divide order {order}"
                )
        return cls(
            permutation=perm,
            orbit_id=orbit_id,
            element=element,
            representatives=np.array(reps, dtype=np.int64),
            order=int(order),
        )

    @classmethod
    def from_geometry(
        cls, mesh: TriMesh, group: SymmetryGroup, rel_tolerance: float = 1e-6
    ) -> "OrbitMap":
        """
        Match every rotated vertex ``G x_v`` to its nearest vertex.

        Parameters
        ----------
        mesh : TriMesh
            Mesh that is (approximately) invariant under the group.
        group : SymmetryGroup
            Acting group.
        rel_tolerance : float, default 1e-6
            Largest accepted match distance relative to the mean edge length.

        Raises
        ------
        OrbitMismatch
            If some image has no vertex nearby, two images share a vertex,
            or the matched permutation is not an automorphism.
        """
        x = mesh.vertices
        images = x @ group.generator.T
        dist, perm = cKDTree(x).query(images)
        limit = rel_tolerance * mesh.mean_edge_length
        if np.any(dist > limit):
            worst = int(np.argmax(dist))
            raise OrbitMismatch(
                f"vertex {worst} has no symmetric partner (distance {dist[worst]:.3e} > {limit:.3e})"
            )
        orbits = cls.from_permutation(perm, group.order)
        orbits.check_automorphism(mesh.faces)
        return orbits

    # ------------------------------------------------------------------
    # Tables
    # ------------------------------------------------------------------

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "VERTEX": np.arange(self.n_vertices),
                "ORBIT": self.orbit_id,
                "ELEMENT": self.element,
            }
        )

    @classmethod
    def from_frame(cls, df: pd.DataFrame, order: int) -> "OrbitMap":
        """Rebuild an orbit map from its (VERTEX, ORBIT, ELEMENT) table."""
        missing = [c for c in ORBIT_COLUMNS if c not in df.columns]
        if missing:
            raise OrbitMismatch(f"orbit table missing columns: {missing}")
        df = df.sort_values("VERTEX")
        vertex = df["VERTEX"].to_numpy(dtype=np.int64)
        if not np.array_equal(vertex, np.arange(vertex.shape[0])):
            raise OrbitMismatch("orbit table VERTEX column must enumerate 0..V-1")
        orbit = df["ORBIT"].to_numpy(dtype=np.int64)
        element = df["ELEMENT"].to_numpy(dtype=np.int64)
        sizes = np.bincount(orbit)
        lookup = {(int(o), int(e)): int(v) for v, o, e in zip(vertex, orbit, element)}
        perm = np.empty_like(vertex)
        for v, o, e in zip(vertex, orbit, element):
            key = (int(o), int((e + 1) % sizes[o]))
            if key not in lookup:
                raise OrbitMismatch(f"orbit {o} has no element {key[1]}")
            perm[v] = lookup[key]
        return cls.from_permutation(perm, order)


# ---------------------------------------------------------------------------
# Group averaging
# ---------------------------------------------------------------------------

def _check(n_vertices: int, orbits: OrbitMap, group: SymmetryGroup) -> None:
    if orbits.n_vertices != n_vertices:
        raise OrbitMismatch(
            f"orbit map covers {orbits.n_vertices} vertices, mesh has {n_vertices}"
        )
    if orbits.order != group.order:
        raise OrbitMismatch(f"orbit map order {orbits.order} != group order {group.order}")


def symmetrize_field(field: np.ndarray, group: SymmetryGroup, orbits: OrbitMap) -> np.ndarray:
    """
    Orthogonal projection of a (V, 3) field onto equivariant fields.

    Equivariant means ``f[pi[v]] = G f[v]``; positions of a symmetric mesh
    and gradients of invariant energies are equivariant.
    """
    f = np.asarray(field, dtype=np.float64)
    _check(f.shape[0], orbits, group)
    reps = orbits.representatives
    powers = group.elements()
    index = reps.copy()
    acc = np.zeros((reps.shape[0], 3))
    indices = []
    for j in range(group.order):
        indices.append(index)
        acc += f[index] @ powers[j]
        index = orbits.permutation[index]
    avg = acc / group.order
    out = np.empty_like(f)
    for j in range(group.order):
        out[indices[j]] = avg @ powers[j].T
    return out


def symmetrize(mesh: TriMesh, group: SymmetryGroup, orbits: OrbitMap) -> TriMesh:
    """
    Replace each orbit by its group average pulled back through the representative.

    Raises
    ------
    OrbitMismatch
        If the orbit map does not fit the mesh or the group.
    """
    return mesh.with_vertices(symmetrize_field(mesh.vertices, group, orbits))


def symmetry_deviation(mesh: TriMesh, group: SymmetryGroup, orbits: OrbitMap) -> float:
    """Largest ``|G x_v - x_{pi(v)}|`` over vertices, in model units."""
    x = mesh.vertices
    _check(x.shape[0], orbits, group)
    return float(np.linalg.norm(x @ group.generator.T - x[orbits.permutation], axis=1).max())


def orbit_expand(domain_positions: np.ndarray, group: SymmetryGroup, orbits: OrbitMap) -> np.ndarray:
    """
    Generate all vertex positions from one position per orbit representative.

    Raises
    ------
    FixedPointInconsistency
        If a vertex fixed by some group element receives images that
        disagree by more than 1e-12.
    """
    p = np.asarray(domain_positions, dtype=np.float64).reshape(-1, 3)
    if p.shape[0] != orbits.n_orbits:
        raise OrbitMismatch(f"expected {orbits.n_orbits} representative positions, got {p.shape[0]}")
    if orbits.order != group.order:
        raise OrbitMismatch(f"orbit map order {orbits.order} != group order {group.order}")
    out = np.full((orbits.n_vertices, 3), np.nan)
    index = orbits.representatives.copy()
    for g in group.elements():
        values = p @ g.T
        fresh = np.isnan(out[index, 0])
        out[index[fresh]] = values[fresh]
        if np.any(~fresh):
            gap = np.linalg.norm(out[index[~fresh]] - values[~fresh], axis=1)
            if gap.max() > 1e-12:
                v = int(index[~fresh][np.argmax(gap)])
                raise FixedPointInconsistency(
                    f"vertex {v} receives images {gap.max():.3e} apart"
                )
        index = orbits.permutation[index]
    return out


def equivariant_projector(group: SymmetryGroup, orbits: OrbitMap):
    """Return ``field -> symmetrize_field(field, group, orbits)``."""
    return lambda field: symmetrize_field(field, group, orbits)


@dataclass(frozen=True, eq=False)
class SymmetryConstraint:
    """
    A group with its orbit map, used to constrain flows and eigenproblems.

    ``project`` is the orthogonal projector onto equivariant vector fields.
    """

    group: SymmetryGroup
    orbits: OrbitMap

    def project(self, field: np.ndarray) -> np.ndarray:
        return symmetrize_field(field, self.group, self.orbits)

    def symmetrize(self, mesh: TriMesh) -> TriMesh:
        return symmetrize(mesh, self.group, self.orbits)

    def deviation(self, mesh: TriMesh) -> float:
        return symmetry_deviation(mesh, self.group, self.orbits)

    def subgroup(self, step: int) -> "SymmetryConstraint":
        return SymmetryConstraint(self.group.subgroup(step), self.orbits.subgroup(step))

    def rebuild(self, mesh: TriMesh) -> "SymmetryConstraint":
        """Constraint of the same group on a remeshed surface."""
        return SymmetryConstraint(self.group, OrbitMap.from_geometry(mesh, self.group))


# ---------------------------------------------------------------------------
# Sidecars
# ---------------------------------------------------------------------------

def sidecar_paths(stem: PathLike) -> Tuple[Path, Path]:
    """``(<stem>.orbits.csv, <stem>.group.yaml)``."""
    stem = Path(stem)
    if stem.suffix == ".obj":
        stem = stem.with_suffix("")
    return stem.with_name(stem.name + ".orbits.csv"), stem.with_name(stem.name + ".group.yaml")


def write_orbit_sidecars(stem: PathLike, group: SymmetryGroup, orbits: OrbitMap) -> Tuple[Path, Path]:
    """Write the orbit table and group description next to a mesh file."""
    table, meta = sidecar_paths(stem)
    try:
        table.parent.mkdir(parents=True, exist_ok=True)
        orbits.to_frame().to_csv(table, index=False, lineterminator="\n")
        with open(meta, "w", encoding="utf-8") as fh:
            yaml.safe_dump(group.to_dict(), fh, sort_keys=True)
    except OSError as exc:
        raise IoFailure(f"cannot write orbit sidecars for {stem}: {exc}") from exc
    return table, meta


def read_orbit_sidecars(stem: PathLike) -> Tuple[SymmetryGroup, OrbitMap]:
    """
    Read sidecars written by :func:`write_orbit_sidecars`.

    Raises
    ------
    SeedMeshMissing
        If either sidecar file does not exist.
    """
    table, meta = sidecar_paths(stem)
    for p in (table, meta):
        if not p.exists():
            raise SeedMeshMissing(f"orbit sidecar not found: {p}")
    with open(meta, "r", encoding="utf-8") as fh:
        group = SymmetryGroup.from_dict(yaml.safe_load(fh))
    orbits = OrbitMap.from_frame(pd.read_csv(table), group.order)
    return group, orbits
