# pyevert/optimize/saddle.py

"""
Escape from a saddle point along a negative Hessian mode.
"""

from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np

from ..energy.hessian import EigenConfig, EigenPair, FieldProjector, lowest_eigenpair
from ..energy.willmore import willmore_energy
from ..errors import DegenerateFace, EnergyIncreased, NotASaddle
from ..mesh.halfedge import TriMesh

logger = logging.getLogger(__name__)


def saddle_pushoff(
    mesh: TriMesh,
    magnitude: float,
    sign: int = 1,
    eigenpair: Optional[EigenPair] = None,
    constraint: Optional[FieldProjector] = None,
    eigen_config: Optional[EigenConfig] = None,
    negative_tolerance: float = 0.0,
) -> TriMesh:
    """
    Displace a critical mesh along its lowest Hessian eigenvector.

    Parameters
    ----------
    mesh : TriMesh
        Approximately critical mesh.
    magnitude : float
        Largest per-vertex displacement (a length).
    sign : {1, -1}
        Which of the two downhill directions to take.
    eigenpair : EigenPair, optional
        Precomputed ``(value, vector)``; computed with ``lowest_eigenpair``
        when omitted.
    constraint : FieldProjector, optional
        Projector applied to the eigenvector (and to the eigenproblem).
    eigen_config : EigenConfig, optional
        Settings when the eigenpair is computed here.
    negative_tolerance : float, default 0.0
        The eigenvalue must be below ``-negative_tolerance``.

    Returns
    -------
    TriMesh
        Displaced mesh with strictly lower energy.

    Raises
    ------
    NotASaddle
        If the eigenvalue is not negative.
    EnergyIncreased
        If the energy does not drop (the caller should shrink ``magnitude``).
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    if not magnitude > 0:
        raise ValueError(f"magnitude must be positive, got {magnitude}")
    if eigenpair is None:
        eigenpair = lowest_eigenpair(mesh, eigen_config, constraint=constraint)
    value, vector = eigenpair
    if value >= -negative_tolerance:
        raise NotASaddle(f"lowest eigenvalue {value:.6g} is not negative")

    direction = np.asarray(vector, dtype=np.float64).reshape(mesh.vertices.shape)
    if constraint is not None:
        direction = constraint.project(direction)
    peak = float(np.max(np.linalg.norm(direction, axis=1)))
    if not peak > 0:
        raise NotASaddle("eigenvector vanishes inside the constraint subspace")
    displaced = mesh.with_vertices(mesh.vertices + (sign * magnitude / peak) * direction)

    before = willmore_energy(mesh).total
    try:
        after = willmore_energy(displaced).total
    except DegenerateFace as exc:
        raise EnergyIncreased(f"pushoff of magnitude {magnitude:.3e} degenerates the mesh: {exc}") from exc
    if not after < before:
        raise EnergyIncreased(
            f"pushoff of magnitude {magnitude:.3e} changed the energy {before:.12g} -> {after:.12g}"
        )
    logger.info(
        "Pushoff sign %+d, magnitude %.3e: energy %.10g -> %.10g (lambda=%.6g)",
        sign, magnitude, before, after, value,
    )
    return displaced


def pushoff_with_backoff(
    mesh: TriMesh,
    magnitude: float,
    sign: int = 1,
    eigenpair: Optional[EigenPair] = None,
    constraint: Optional[FieldProjector] = None,
    eigen_config: Optional[EigenConfig] = None,
    max_halvings: int = 20,
) -> Tuple[TriMesh, float]:
    """
    :func:`saddle_pushoff`, halving the magnitude on :class:`EnergyIncreased`.

    Returns the displaced mesh and the magnitude used.
    """
    if eigenpair is None:
        eigenpair = lowest_eigenpair(mesh, eigen_config, constraint=constraint)
    for attempt in range(max_halvings + 1):
        try:
            return saddle_pushoff(mesh, magnitude, sign, eigenpair, constraint), magnitude
        except EnergyIncreased as exc:
            if attempt == max_halvings:
                raise
            logger.warning("%s; halving the magnitude", exc)
            magnitude *= 0.5
    raise AssertionError("unreachable")
