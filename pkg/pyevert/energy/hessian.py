# pyevert/energy/hessian.py

"""
Matrix-free second-order information of the Willmore energy.

``hessian_apply`` differentiates the exact gradient by central differences.
``lowest_eigenpair`` runs Lanczos (``scipy.sparse.linalg.eigsh``) on the
Hessian restricted to the complement of the seven invariance modes
(translations, rotations, scaling), optionally further restricted to a
symmetry class by a linear projector on vector fields.

By default the eigenproblem lives in all 3V vertex coordinates and the
residual ``|H v - lambda v|`` is checked there. ``subspace="normal"``
restricts variations to scalar fields along the vertex normals instead;
its eigenpairs then belong to the normal-restricted operator and residuals
are measured in those coordinates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Protocol, Tuple

import numpy as np
from scipy import linalg as sla
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ..constants import HESSIAN_RETRIES, N_INVARIANCE_MODES
from ..errors import ConfigError, DegenerateFace, NotConverged, NotCritical
from ..mesh.halfedge import TriMesh
from ..mesh.metrics import area_weighted_centroid
from .willmore import energy_and_gradient_of_positions

logger = logging.getLogger(__name__)


class FieldProjector(Protocol):
    """Anything that orthogonally projects (V, 3) vector fields onto a subspace."""

    def project(self, field: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class EigenConfig:
    """
    Settings of the lowest-eigenpair computation.

    Attributes
    ----------
    max_iterations : int
        Lanczos restart budget handed to ``eigsh``.
    tolerance : float
        Residual bound ``|H v - lambda v|`` relative to the spectral radius.
    critical_gradient : float
        Largest gradient norm accepted as "approximately critical".
    subspace : str
        ``"full"`` (all 3V coordinates) or ``"normal"`` (scalar normal fields).
    rel_step : float
        Finite-difference step relative to the mean edge length.
    power_iterations : int
        Sweeps used to estimate the spectral radius for the deflation shift.
    seed : int
        Seed of the Lanczos start vector.
    """

    max_iterations: int = 5000
    tolerance: float = 1e-4
    critical_gradient: float = 1e-2
    subspace: str = "full"
    rel_step: float = 1e-5
    power_iterations: int = 30
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.max_iterations < 1:
            raise ConfigError("eigen.max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ConfigError("eigen.tolerance must be positive")
        if not self.critical_gradient > 0:
            raise ConfigError("eigen.critical_gradient must be positive")
        if self.subspace not in ("normal", "full"):
            raise ConfigError(f"eigen.subspace must be 'normal' or 'full', got {self.subspace!r}")
        if not self.rel_step > 0:
            raise ConfigError("eigen.rel_step must be positive")
        if self.power_iterations < 1:
            raise ConfigError("eigen.power_iterations must be >= 1")


@dataclass(frozen=True)
class EigenPair:
    """
    Eigenvalue with its unit eigenvector field.

    Unpacks as ``(value, vector)``.
    """

    value: float
    vector: np.ndarray
    residual: float

    def __iter__(self) -> Iterator:
        yield self.value
        yield self.vector


def hessian_apply(mesh: TriMesh, direction: np.ndarray, rel_step: float = 1e-5) -> np.ndarray:
    """
    Hessian-vector product by central differences of the exact gradient.

    Parameters
    ----------
    mesh : TriMesh
        Base configuration.
    direction : np.ndarray
        (V, 3) direction field.
    rel_step : float, default 1e-5
        Step size relative to the mean edge length, divided by the largest
        per-vertex norm of ``direction``.

    Returns
    -------
    np.ndarray
        (V, 3) field ``H d``.

    Raises
    ------
    DegenerateFace
        If a displaced configuration stays degenerate after 5 step halvings.
    """
    d = np.asarray(direction, dtype=np.float64).reshape(mesh.n_vertices, 3)
    scale = float(np.linalg.norm(d, axis=1).max())
    if scale == 0.0:
        return np.zeros_like(d)
    eps = rel_step * mesh.mean_edge_length / scale
    x = mesh.vertices
    last_error: Optional[DegenerateFace] = None
    for attempt in range(HESSIAN_RETRIES + 1):
        try:
            _, g_plus = energy_and_gradient_of_positions(x + eps * d, mesh.faces)
            _, g_minus = energy_and_gradient_of_positions(x - eps * d, mesh.faces)
            return (g_plus - g_minus) / (2.0 * eps)
        except DegenerateFace as exc:
            last_error = exc
            logger.debug("hessian_apply: degenerate at eps=%.3e (attempt %d)", eps, attempt)
            eps *= 0.5
    raise DegenerateFace(
        f"displaced configuration degenerate after {HESSIAN_RETRIES} step halvings: {last_error}"
    )


def invariance_basis(mesh: TriMesh) -> np.ndarray:
    """
    Orthonormal (3V, 7) basis of translations, rotations and scaling.

    Rotations and scaling are taken about the area-weighted centroid.
    """
    x = mesh.vertices - area_weighted_centroid(mesh)
    n = mesh.n_vertices
    columns = []
    for k in range(3):
        t = np.zeros((n, 3))
        t[:, k] = 1.0
        columns.append(t.ravel())
    for k in range(3):
        axis = np.zeros(3)
        axis[k] = 1.0
        columns.append(np.cross(axis, x).ravel())
    columns.append(x.ravel())
    q, _ = np.linalg.qr(np.column_stack(columns))
    return q[:, :N_INVARIANCE_MODES]


class _ReducedSpace:
    """Coordinates of the eigenproblem: full 3V fields or scalar normal fields."""

    def __init__(self, mesh: TriMesh, subspace: str):
        self.n_vertices = mesh.n_vertices
        self.normals = mesh.vertex_normals() if subspace == "normal" else None

    @property
    def size(self) -> int:
        return self.n_vertices if self.normals is not None else 3 * self.n_vertices

    def lift(self, y: np.ndarray) -> np.ndarray:
        if self.normals is None:
            return y.reshape(self.n_vertices, 3)
        return y[:, None] * self.normals

    def restrict(self, field: np.ndarray) -> np.ndarray:
        field = np.asarray(field).reshape(self.n_vertices, 3)
        if self.normals is None:
            return field.ravel()
        return np.einsum("ij,ij->i", field, self.normals)


def _projector(
    mesh: TriMesh, space: _ReducedSpace, constraint: Optional[FieldProjector]
) -> Callable[[np.ndarray], np.ndarray]:
    """Projector onto (constraint class) minus (invariance modes), in reduced coordinates."""

    def constrain(y: np.ndarray) -> np.ndarray:
        if constraint is None:
            return y
        return space.restrict(constraint.project(space.lift(y)))

    modes = invariance_basis(mesh)
    reduced = np.column_stack([constrain(space.restrict(modes[:, j])) for j in range(modes.shape[1])])
    q, r, _ = sla.qr(reduced, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > 1e-8 * max(diag.max(initial=0.0), 1e-300)))
    basis = q[:, :rank]

    def project(y: np.ndarray) -> np.ndarray:
        y = constrain(y)
        return y - basis @ (basis.T @ y)

    return project


def _gradient_norm(mesh: TriMesh, constraint: Optional[FieldProjector]) -> float:
    _, g = energy_and_gradient_of_positions(mesh.vertices, mesh.faces)
    if constraint is not None:
        g = constraint.project(g)
    return float(np.linalg.norm(g))


def lowest_eigenpairs(
    mesh: TriMesh,
    config: Optional[EigenConfig] = None,
    k: int = 1,
    constraint: Optional[FieldProjector] = None,
) -> List[EigenPair]:
    """
    The ``k`` lowest eigenpairs of the deflated, constrained Hessian.

    Parameters
    ----------
    mesh : TriMesh
        Approximately critical mesh.
    config : EigenConfig, optional
        Iteration settings.
    k : int, default 1
        Number of pairs, in ascending order of eigenvalue.
    constraint : FieldProjector, optional
        Orthogonal projector restricting variations to a symmetry class.

    Returns
    -------
    list of EigenPair
        Unit-norm (V, 3) eigenvector fields, ascending eigenvalues.

    Raises
    ------
    NotCritical
        If the (constrained) gradient norm exceeds ``config.critical_gradient``.
    NotConverged
        If Lanczos exhausts its budget or a residual exceeds the tolerance.
    """
    config = config or EigenConfig()
    grad_norm = _gradient_norm(mesh, constraint)
    if grad_norm > config.critical_gradient:
        raise NotCritical(
            f"gradient norm {grad_norm:.3e} exceeds critical_gradient {config.critical_gradient:.3e}"
        )

    space = _ReducedSpace(mesh, config.subspace)
    project = _projector(mesh, space, constraint)
    n = space.size
    if k >= n:
        raise ConfigError(f"requested {k} eigenpairs of a {n}-dimensional problem")

    def hess(y: np.ndarray) -> np.ndarray:
        return space.restrict(hessian_apply(mesh, space.lift(y), config.rel_step))

    def deflated(y: np.ndarray) -> np.ndarray:
        py = project(y)
        return project(hess(py))

    rng = np.random.default_rng(config.seed)

    # spectral radius of the deflated operator
    v = project(rng.standard_normal(n))
    rho = 0.0
    for _ in range(config.power_iterations):
        norm = np.linalg.norm(v)
        if norm == 0.0:
            break
        v = deflated(v / norm)
        rho = float(np.linalg.norm(v))
    shift = 2.0 * rho + 1.0

    def matvec(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64).ravel()
        py = project(y)
        return project(hess(py)) + shift * (y - py)

    operator = LinearOperator((n, n), matvec=matvec, dtype=np.float64)
    v0 = project(rng.standard_normal(n))
    try:
        values, vectors = eigsh(
            operator, k=k, which="SA", tol=config.tolerance * 1e-2,
            maxiter=config.max_iterations, v0=v0,
        )
    except ArpackNoConvergence as exc:
        raise NotConverged(f"Lanczos did not converge within {config.max_iterations} iterations") from exc

    order = np.argsort(values)
    pairs = []
    bound = config.tolerance * max(rho, 1e-300)
    for j in order:
        lam = float(values[j])
        y = vectors[:, j]
        residual = float(np.linalg.norm(matvec(y) - lam * y))
        if residual > bound:
            raise NotConverged(
                f"eigenpair residual {residual:.3e} exceeds {bound:.3e} (lambda={lam:.6g})"
            )
        field = space.lift(y)
        field = field / np.linalg.norm(field)
        pairs.append(EigenPair(value=lam, vector=field, residual=residual))
    logger.info(
        "Lowest eigenvalues %s (spectral radius %.3e, %d unknowns)",
        ", ".join(f"{p.value:.6g}" for p in pairs), rho, n,
    )
    return pairs


def lowest_eigenpair(
    mesh: TriMesh,
    config: Optional[EigenConfig] = None,
    constraint: Optional[FieldProjector] = None,
) -> EigenPair:
    """
    Lowest eigenpair of the Hessian with the invariance modes projected out.

    See :func:`lowest_eigenpairs` for parameters and errors.

    Examples
    --------
    >>> from pyevert.mesh.generation import icosphere
    >>> config = EigenConfig(critical_gradient=math.inf, subspace="normal")
    >>> value, vector = lowest_eigenpair(icosphere(1), config)
    >>> value > 0
    True
    """
    return lowest_eigenpairs(mesh, config, k=1, constraint=constraint)[0]
