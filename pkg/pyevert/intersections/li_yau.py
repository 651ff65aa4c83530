# pyevert/intersections/li_yau.py

"""
Energy lower bound audit: a surface with a k-fold point has normalised
Willmore energy at least k. Discrete energies are accepted down to
``k - LI_YAU_SLACK``.
"""

import logging
from typing import NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd

from ..constants import LI_YAU_SLACK
from ..energy.willmore import willmore_energy
from ..mesh.halfedge import TriMesh
from .report import IntersectionTolerances, SelfIntersectionReport, self_intersection

logger = logging.getLogger(__name__)


class LiYauResult(NamedTuple):
    k: int
    energy: float
    passed: bool


def li_yau_check(
    mesh: TriMesh,
    tolerances: Optional[IntersectionTolerances] = None,
    report: Optional[SelfIntersectionReport] = None,
) -> LiYauResult:
    """
    Compare the energy of ``mesh`` with its largest multiplicity.

    Examples
    --------
    >>> from pyevert.mesh.generation import icosphere
    >>> k, energy, passed = li_yau_check(icosphere(3))
    >>> k, passed
    (1, True)
    """
    if report is None:
        report = self_intersection(mesh, tolerances)
    k = int(report.max_multiplicity)
    energy = float(willmore_energy(mesh).total)
    passed = energy >= k - LI_YAU_SLACK
    if not passed:
        logger.warning("Energy %.4f below the bound for a %d-fold point", energy, k)
    return LiYauResult(k, energy, bool(passed))


def li_yau_table(
    frames: Sequence[TriMesh],
    reports: Sequence[SelfIntersectionReport],
    times: Optional[Sequence[float]] = None,
) -> pd.DataFrame:
    """One audit row per frame."""
    if times is None:
        times = np.linspace(0.0, 1.0, len(frames)) if len(frames) > 1 else [0.0] * len(frames)
    rows = []
    for i, (mesh, report) in enumerate(zip(frames, reports)):
        k, energy, passed = li_yau_check(mesh, report=report)
        rows.append((i, float(times[i]), k, energy, k - LI_YAU_SLACK, passed))
    return pd.DataFrame(rows, columns=["FRAME", "TIME", "MULTIPLICITY", "ENERGY", "BOUND", "PASSED"])
