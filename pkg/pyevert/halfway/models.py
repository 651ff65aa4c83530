# pyevert/halfway/models.py

"""
Halfway models: symmetric immersed spheres that are critical points of the
Willmore energy and sit exactly half way through an eversion.

Morin2Fold
	Closed-form minimal sphere with four planar ends, compactified by a
	sphere inversion centred on its symmetry axis. The ends meet at a
	quadruple point; the quarter turn about the axis maps the surface to
	itself with its sides exchanged.
Boy3Fold
	Boy's surface traversed twice (the sphere double-covers the projective
	plane), with the two sheets pushed apart along their normals.

Usage:
	model = relax_halfway(morin_initial(24), FlowConfig(max_steps=3000))
	model.energy
	write_seed(model, "models/morin_r24")
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import yaml

from ..constants import MIN_HALFWAY_RESOLUTION
from ..energy.willmore import energy_and_gradient, willmore_energy
from ..errors import (
    CenterOnSurface,
    HalfwayError,
    IoFailure,
    ResolutionTooLow,
    SeedMeshMissing,
)
from ..mesh.generation import octasphere_grid
from ..mesh.halfedge import FaceSoup, TriMesh, build_and_validate, triangle_areas
from ..mesh.io import read_obj, write_obj
from ..optimize.config import FlowConfig
from ..optimize.descent import FlowTrace, TerminationReason, flow_until
from ..optimize.pose import normalize_pose
from ..symmetry.groups import SymmetryGroup, make_group
from ..symmetry.orbits import (
    OrbitMap,
    SymmetryConstraint,
    read_orbit_sidecars,
    symmetrize,
    symmetry_deviation,
    write_orbit_sidecars,
)
from .parameterizations import boy_surface, morin_surface

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MORIN = "Morin2Fold"
BOY = "Boy3Fold"
KINDS = (MORIN, BOY)

_Z_AXIS = np.array([0.0, 0.0, 1.0])

# Lattice maps of the octasphere parameter domain
_QUARTER_SWAP = np.array([[0, -1, 0], [1, 0, 0], [0, 0, -1]], dtype=np.int64)
_CYCLIC = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class HalfwayModel:
    """
    A symmetric immersed sphere with its symmetry data.

    Attributes
    ----------
    mesh : TriMesh
        The surface.
    group : SymmetryGroup
        Full symmetry group, side exchange included.
    orbits : OrbitMap
        Vertex orbits of ``group`` on ``mesh``.
    kind : str
        ``"Morin2Fold"`` or ``"Boy3Fold"``.
    energy : float
        Willmore energy of ``mesh``.
    exchange_matrix : np.ndarray
        Motion of the side exchange used to build the second half of an
        eversion: the group generator for Morin, the identity for the Boy
        double cover.
    gradient_norm : float
        Constrained gradient norm at ``mesh`` (NaN before relaxation).
    converged : bool
        Whether relaxation reached its tolerance.
    antipode : np.ndarray, optional
        Deck transformation of a double cover as a vertex permutation.
    provenance : dict
        Construction record (route, parameters, relaxation summary).
    relaxation : FlowTrace, optional
        Trace of the symmetric flow that produced ``mesh``.
    """

    mesh: TriMesh
    group: SymmetryGroup
    orbits: OrbitMap
    kind: str
    energy: float
    exchange_matrix: np.ndarray = field(default_factory=lambda: np.eye(3))
    gradient_norm: float = math.nan
    converged: bool = False
    antipode: Optional[np.ndarray] = None
    provenance: Dict[str, Any] = field(default_factory=dict)
    relaxation: Optional[FlowTrace] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise HalfwayError(f"unknown halfway model kind {self.kind!r}; expected one of {KINDS}")

    @property
    def constraint(self) -> SymmetryConstraint:
        return SymmetryConstraint(self.group, self.orbits)

    def eversion_constraint(self) -> SymmetryConstraint:
        """
        Symmetry kept along the eversion: the side-preserving subgroup.

        For Morin this is the half turn; the Boy group already preserves
        sides.
        """
        if self.group.side_exchanging:
            return self.constraint.subgroup(2)
        return self.constraint

    def symmetry_deviation(self) -> float:
        return symmetry_deviation(self.mesh, self.group, self.orbits)

    def exchange(self, mesh: TriMesh) -> TriMesh:
        """
        Apply the side exchange to any frame.

        The motion is ``exchange_matrix``; faces are reversed when the motion
        is proper, so the result is the same image surface as ``mesh`` at
        the halfway model and has the opposite orientation at a round
        sphere.
        """
        moved = mesh.transformed(self.exchange_matrix)
        if np.linalg.det(self.exchange_matrix) > 0:
            moved = moved.flipped()
        return moved

    def summary(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "energy": float(self.energy),
            "gradient_norm": float(self.gradient_norm),
            "converged": bool(self.converged),
            "n_vertices": self.mesh.n_vertices,
            "n_faces": self.mesh.n_faces,
            "symmetry_deviation": self.symmetry_deviation(),
            **{f"group_{k}": v for k, v in self.group.to_dict().items()},
        }


# ---------------------------------------------------------------------------
# Domain helpers
# ---------------------------------------------------------------------------

def _check_resolution(resolution: int) -> None:
    if resolution < MIN_HALFWAY_RESOLUTION:
        raise ResolutionTooLow(
            f"resolution {resolution} is below the minimum {MIN_HALFWAY_RESOLUTION}"
        )


def _lattice_permutation(points: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Vertex permutation induced by an integer matrix on octasphere lattice points."""
    n = int(np.abs(points).sum(axis=1).max())
    base = 2 * n + 1

    def key(p: np.ndarray) -> np.ndarray:
        shifted = p + n
        return (shifted[:, 0] * base + shifted[:, 1]) * base + shifted[:, 2]

    keys = key(points)
    order = np.argsort(keys)
    images = key(points @ matrix.T)
    found = order[np.searchsorted(keys, images, sorter=order)]
    if not np.array_equal(keys[found], images):
        raise HalfwayError("lattice map does not preserve the octasphere vertex set")
    return found


def _match_permutation(
    positions: np.ndarray, group: SymmetryGroup, candidates, tolerance: float
) -> Optional[np.ndarray]:
    """First candidate ``pi`` with ``x[pi] = x G^T`` up to ``tolerance`` (relative)."""
    images = positions @ group.generator.T
    scale = 1.0 + np.linalg.norm(positions, axis=1)
    for perm in candidates:
        gap = np.linalg.norm(positions[perm] - images, axis=1) / scale
        if gap.max() <= tolerance:
            return perm
    return None


def _finish(
    faces: np.ndarray,
    positions: np.ndarray,
    group: SymmetryGroup,
    permutation: np.ndarray,
) -> Tuple[TriMesh, OrbitMap]:
    mesh = build_and_validate(faces, positions)
    orbits = OrbitMap.from_permutation(permutation, group.order)
    orbits.check_automorphism(mesh.faces)
    mesh = symmetrize(normalize_pose(mesh), group, orbits)
    return mesh.with_orbit_tag(orbits.orbit_id), orbits


# ---------------------------------------------------------------------------
# Moebius compactification
# ---------------------------------------------------------------------------

def _invert(positions: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = positions - center
    d2 = np.sum(diff * diff, axis=1)
    nearest = float(np.sqrt(d2.min()))
    if nearest < 1e-9:
        raise CenterOnSurface(
            f"inversion center {center.tolist()} lies {nearest:.3e} from the surface"
        )
    return diff / d2[:, None]


def moebius_compactify(mesh: TriMesh, center) -> TriMesh:
    """
    Sphere inversion ``x -> (x - c) / |x - c|^2``.

    Combinatorics are unchanged; the orientation of the image is reversed.

    Raises
    ------
    CenterOnSurface
        If a vertex lies within 1e-9 of ``center``.
    """
    center = np.asarray(center, dtype=np.float64).reshape(3)
    return mesh.with_vertices(_invert(mesh.vertices, center))


def _scale_free_diameter(positions: np.ndarray, faces: np.ndarray) -> float:
    areas = triangle_areas(positions, faces)
    if areas.min() < 1e-12 * areas.mean():
        return math.inf
    diag = np.linalg.norm(positions.max(axis=0) - positions.min(axis=0))
    return float(diag * diag / areas.sum())


def choose_inversion_center(
    positions: np.ndarray,
    faces: np.ndarray,
    axis: np.ndarray = _Z_AXIS,
    samples: int = 81,
    span: float = 2.0,
) -> np.ndarray:
    """
    Point on the symmetry axis whose inversion gives the roundest image.

    Heights ``t * scale`` for ``t`` in ``[-span, span]`` (``scale`` the median
    vertex radius) are scanned for the smallest ``diameter^2 / area`` of the
    inverted surface, then the best interval is scanned again more finely.

    Raises
    ------
    CenterOnSurface
        If every candidate lies on the surface or degenerates it.
    """
    axis = np.asarray(axis, dtype=np.float64) / np.linalg.norm(axis)
    scale = float(np.median(np.linalg.norm(positions, axis=1)))

    def score(t: float) -> float:
        try:
            image = _invert(positions, t * scale * axis)
        except CenterOnSurface:
            return math.inf
        return _scale_free_diameter(image, faces)

    grid = np.linspace(-span, span, samples)
    scores = np.array([score(t) for t in grid])
    if not np.isfinite(scores).any():
        raise CenterOnSurface("no admissible inversion center on the symmetry axis")
    best = int(np.argmin(scores))
    step = grid[1] - grid[0]
    fine = np.linspace(grid[best] - step, grid[best] + step, 41)
    fine_scores = np.array([score(t) for t in fine])
    t = float(fine[int(np.argmin(fine_scores))])
    logger.info(
        "Inversion center at height %.6g (diameter^2/area %.6g)", t * scale, float(fine_scores.min())
    )
    return t * scale * axis


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def morin_initial(resolution: int, seed_path: Optional[PathLike] = None) -> HalfwayModel:
    """
    Unrelaxed Morin halfway model.

    Parameters
    ----------
    resolution : int
        Octasphere frequency of the parameter domain (``8 * resolution**2``
        faces), at least 16.
    seed_path : path, optional
        Load a seed mesh with orbit sidecars instead of sampling the closed
        form (see :func:`load_seed`).

    Returns
    -------
    HalfwayModel
        Model with the order-4 side-exchanging quarter-turn group.

    Raises
    ------
    ResolutionTooLow
        If ``resolution`` is below 16.
    SeedMeshMissing
        If ``seed_path`` is given but the mesh or a sidecar is missing.
    """
    _check_resolution(resolution)
    if seed_path:
        return load_seed(seed_path, kind=MORIN)

    points, faces = octasphere_grid(resolution)
    p = points.astype(np.float64)
    p = p / np.sqrt(np.sum(p * p, axis=1))[:, None]
    minimal = morin_surface(p)

    group = make_group(4, _Z_AXIS, rotoreflect=False, side_exchanging=True)
    quarter = _lattice_permutation(points, _QUARTER_SWAP)
    inverse = np.argsort(quarter)
    permutation = _match_permutation(minimal, group, [quarter, inverse], 1e-9)
    if permutation is None:
        raise HalfwayError("minimal surface samples are not quarter-turn symmetric")

    center = choose_inversion_center(minimal, faces)
    mesh, orbits = _finish(faces, _invert(minimal, center), group, permutation)
    energy = float(willmore_energy(mesh).total)
    logger.info("Morin initial model: %d faces, energy %.6g", mesh.n_faces, energy)
    return HalfwayModel(
        mesh=mesh,
        group=group,
        orbits=orbits,
        kind=MORIN,
        energy=energy,
        exchange_matrix=group.generator,
        provenance={
            "route": "closed-form",
            "surface": "minimal sphere with four planar ends",
            "resolution": int(resolution),
            "inversion_center": [float(c) for c in center],
        },
    )


def boy_double_cover(resolution: int, offset: float = 0.005) -> HalfwayModel:
    """
    Unrelaxed Boy double-cover halfway model.

    Parameters
    ----------
    resolution : int
        Octasphere frequency of the parameter domain, at least 16.
    offset : float, default 0.005
        Sheet separation along vertex normals as a fraction of the bounding
        radius. With 0 the antipodal vertices coincide exactly.

    Returns
    -------
    HalfwayModel
        Model with the order-3 rotation group about z and the antipodal
        vertex permutation.

    Raises
    ------
    ResolutionTooLow
        If ``resolution`` is below 16.
    """
    _check_resolution(resolution)
    if offset < 0:
        raise ValueError(f"offset must be non-negative, got {offset}")
    points, faces = octasphere_grid(resolution)
    p = points.astype(np.float64)
    p = p / np.sqrt(np.sum(p * p, axis=1))[:, None]
    surface = boy_surface(p)

    group = make_group(3, _Z_AXIS)
    cyclic = _lattice_permutation(points, _CYCLIC)
    permutation = _match_permutation(surface, group, [cyclic, np.argsort(cyclic)], 1e-9)
    if permutation is None:
        raise HalfwayError("Boy surface samples are not three-fold symmetric")
    antipode = _lattice_permutation(points, -np.eye(3, dtype=np.int64))

    positions = surface
    if offset > 0:
        sheets = build_and_validate(faces, surface)
        radius = float(np.linalg.norm(surface - surface.mean(axis=0), axis=1).max())
        positions = surface + offset * radius * sheets.vertex_normals()
    mesh, orbits = _finish(faces, positions, group, permutation)
    energy = float(willmore_energy(mesh).total)
    logger.info("Boy double cover: %d faces, offset %.3g, energy %.6g", mesh.n_faces, offset, energy)
    return HalfwayModel(
        mesh=mesh,
        group=group,
        orbits=orbits,
        kind=BOY,
        energy=energy,
        exchange_matrix=np.eye(3),
        antipode=antipode,
        provenance={
            "route": "closed-form",
            "surface": "Bryant-Kusner Boy surface, double cover",
            "resolution": int(resolution),
            "offset": float(offset),
        },
    )


def boy_image_surface(model: HalfwayModel) -> FaceSoup:
    """
    The immersed projective plane under a Boy double cover.

    Antipodal vertices are merged at their midpoint and one face is kept per
    antipodal face pair.

    Raises
    ------
    HalfwayError
        If the model carries no antipodal permutation (e.g. after remeshing).
    """
    if model.antipode is None:
        raise HalfwayError("model has no antipodal vertex map")
    antipode = model.antipode
    n = model.mesh.n_vertices
    rep = np.minimum(np.arange(n), antipode)
    kept, new_index = np.unique(rep, return_inverse=True)
    x = model.mesh.vertices
    positions = 0.5 * (x[kept] + x[antipode[kept]])
    faces = new_index[model.mesh.faces]
    _, first = np.unique(np.sort(faces, axis=1), axis=0, return_index=True)
    return FaceSoup(positions, faces[np.sort(first)])


def initial_model(
    kind: str,
    resolution: int,
    boy_offset: float = 0.005,
    seed_path: Optional[PathLike] = None,
) -> HalfwayModel:
    """Dispatch on ``kind``; seeds are loaded for either kind when ``seed_path`` is set."""
    if kind == MORIN:
        return morin_initial(resolution, seed_path=seed_path)
    if kind == BOY:
        _check_resolution(resolution)
        if seed_path:
            return load_seed(seed_path, kind=BOY)
        return boy_double_cover(resolution, offset=boy_offset)
    raise HalfwayError(f"unknown halfway model kind {kind!r}; expected one of {KINDS}")


# ---------------------------------------------------------------------------
# Relaxation
# ---------------------------------------------------------------------------

def relax_halfway(initial: HalfwayModel, config: Optional[FlowConfig] = None) -> HalfwayModel:
    """
    Symmetric flow of a halfway model to a critical point.

    Every trial configuration is averaged over the full group, side
    exchange included, so the result keeps all symmetries of ``initial``.

    Parameters
    ----------
    initial : HalfwayModel
        Starting model.
    config : FlowConfig, optional
        Flow settings (``relax.*`` config keys).

    Returns
    -------
    HalfwayModel
        Relaxed model; ``relaxation`` holds the flow trace.

    Raises
    ------
    SymmetryLost
        If the deviation exceeds 1e-8 during the flow.
    """
    config = config or FlowConfig()
    logger.info("Relaxing %s halfway model (%d faces)", initial.kind, initial.mesh.n_faces)
    trace = flow_until(initial.mesh, config, constraint=initial.constraint)
    constraint = trace.constraint or initial.constraint
    mesh = trace.final_mesh.with_orbit_tag(constraint.orbits.orbit_id)
    energy, gradient = energy_and_gradient(mesh)
    gradient_norm = float(np.linalg.norm(constraint.project(gradient.vectors)))
    remeshed = mesh.n_vertices != initial.mesh.n_vertices or any(e.accepted for e in trace.events)
    provenance = dict(initial.provenance)
    provenance.update(
        relax_steps=trace.n_steps,
        relax_terminated_by=trace.terminated_by.value,
        relax_energy=float(energy),
        relax_gradient_norm=gradient_norm,
    )
    logger.info(
        "Relaxed %s: energy %.8g, gradient norm %.3e (%s)",
        initial.kind, energy, gradient_norm, trace.terminated_by.value,
    )
    return replace(
        initial,
        mesh=mesh,
        orbits=constraint.orbits,
        energy=float(energy),
        gradient_norm=gradient_norm,
        converged=trace.terminated_by is TerminationReason.CONVERGED,
        antipode=None if remeshed else initial.antipode,
        provenance=provenance,
        relaxation=trace,
    )


# ---------------------------------------------------------------------------
# Seeds
# ---------------------------------------------------------------------------

def _model_sidecar(stem: Path) -> Path:
    return stem.with_name(stem.name + ".model.yaml")


def _stem(path: PathLike) -> Path:
    path = Path(path)
    return path.with_suffix("") if path.suffix == ".obj" else path


def write_seed(model: HalfwayModel, path: PathLike) -> Path:
    """
    Write ``<stem>.obj`` with orbit, group and model sidecars.

    Returns the mesh path.
    """
    stem = _stem(path)
    mesh_path = write_obj(model.mesh, stem.with_suffix(".obj"), header=f"{model.kind} halfway model")
    write_orbit_sidecars(stem, model.group, model.orbits)
    record = {
        "kind": model.kind,
        "energy": float(model.energy),
        "gradient_norm": None if math.isnan(model.gradient_norm) else float(model.gradient_norm),
        "converged": bool(model.converged),
        "exchange_matrix": np.asarray(model.exchange_matrix).tolist(),
        "provenance": model.provenance,
    }
    if model.antipode is not None:
        record["antipode"] = np.asarray(model.antipode).tolist()
    try:
        with open(_model_sidecar(stem), "w", encoding="utf-8") as fh:
            yaml.safe_dump(record, fh, sort_keys=True)
    except OSError as exc:
        raise IoFailure(f"cannot write model sidecar for {stem}: {exc}") from exc
    logger.info("Wrote %s seed to %s", model.kind, mesh_path)
    return mesh_path


def load_seed(path: PathLike, kind: Optional[str] = None) -> HalfwayModel:
    """
    Read a seed written by :func:`write_seed`.

    The orbit and group sidecars are required; the model sidecar is
    optional (``kind`` is then required).

    Raises
    ------
    SeedMeshMissing
        If the mesh or an orbit sidecar does not exist.
    OrbitMismatch
        If the orbit map does not fit the mesh.
    """
    stem = _stem(path)
    mesh_path = stem.with_suffix(".obj")
    if not mesh_path.exists():
        raise SeedMeshMissing(f"seed mesh not found: {mesh_path}")
    mesh = read_obj(mesh_path)
    group, orbits = read_orbit_sidecars(stem)
    orbits.check_automorphism(mesh.faces)

    record: Dict[str, Any] = {}
    sidecar = _model_sidecar(stem)
    if sidecar.exists():
        with open(sidecar, "r", encoding="utf-8") as fh:
            record = yaml.safe_load(fh) or {}
    kind = kind or record.get("kind")
    if kind is None:
        raise HalfwayError(f"seed {mesh_path} has no model sidecar; pass kind explicitly")
    if record.get("kind", kind) != kind:
        raise HalfwayError(f"seed {mesh_path} holds a {record['kind']} model, not {kind}")

    mesh = symmetrize(mesh, group, orbits).with_orbit_tag(orbits.orbit_id)
    default_exchange = group.generator if group.side_exchanging else np.eye(3)
    antipode = record.get("antipode")
    gradient_norm = record.get("gradient_norm")
    provenance = dict(record.get("provenance") or {})
    provenance["seed_path"] = str(mesh_path)
    return HalfwayModel(
        mesh=mesh,
        group=group,
        orbits=orbits,
        kind=kind,
        energy=float(willmore_energy(mesh).total),
        exchange_matrix=np.asarray(record.get("exchange_matrix", default_exchange), dtype=np.float64),
        gradient_norm=math.nan if gradient_norm is None else float(gradient_norm),
        converged=bool(record.get("converged", False)),
        antipode=None if antipode is None else np.asarray(antipode, dtype=np.int64),
        provenance=provenance,
    )
