# tests/conftest.py

"""
Shared fixtures and helpers for the pyevert test suite.

Surfaces are built in memory from icospheres; tests that relax halfway
models or run full eversions are marked ``slow`` and only run with
``--runslow``.
"""

import matplotlib
import numpy as np
import pytest

matplotlib.use("Agg")

from pyevert.energy import willmore_energy
from pyevert.intersections import EventKind, EventRecord
from pyevert.mesh import FaceSoup, TriMesh, build_and_validate, icosphere
from pyevert.pipeline import Homotopy
from pyevert.symmetry.groups import rotation_matrix


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow acceptance tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

# Generic rotation so that no vertex of one sphere lies on a face plane of the other
GENERIC_ROTATION = rotation_matrix(np.array([1.0, 2.0, 3.0]), 0.3)


def tetrahedron() -> TriMesh:
    """Regular tetrahedron with outward faces."""
    positions = np.array(
        [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
    )
    faces = np.array([[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]])
    return build_and_validate(faces, positions)


def two_spheres(distance: float, level: int = 2) -> FaceSoup:
    """
    Two unit icospheres whose centres lie ``distance`` apart on the x axis.

    The second sphere is rotated generically so the two triangulations
    share no special alignment.
    """
    a = icosphere(level)
    b = icosphere(level).transformed(GENERIC_ROTATION, offset=[distance, 0.0, 0.0])
    positions = np.vstack([a.vertices, b.vertices])
    faces = np.vstack([a.faces, b.faces + a.n_vertices])
    return FaceSoup(positions, faces)


def three_spheres(height: float, level: int = 3) -> FaceSoup:
    """
    Unit icospheres centred at the origin, at ``(1, 0, 0)`` and at
    ``(0.5, 0, height)``.

    The three double circles meet in a pair of triple points exactly when
    ``height`` is below ``1 + sqrt(3) / 2``.
    """
    spheres = [
        icosphere(level),
        icosphere(level).transformed(GENERIC_ROTATION, offset=[1.0, 0.0, 0.0]),
        icosphere(level).transformed(GENERIC_ROTATION.T, offset=[0.5, 0.0, height]),
    ]
    offsets = np.cumsum([0] + [s.n_vertices for s in spheres[:-1]])
    positions = np.vstack([s.vertices for s in spheres])
    faces = np.vstack([s.faces + o for s, o in zip(spheres, offsets)])
    return FaceSoup(positions, faces)


def drifting_homotopy(n_frames: int = 5, level: int = 2) -> Homotopy:
    """
    Small stand-in homotopy: an icosphere drifting along x, with one event.

    Not an eversion; it only exercises bundling, export and plotting.
    """
    frames = [icosphere(level).translated([0.02 * i, 0.0, 0.0]) for i in range(n_frames)]
    return Homotopy(
        frames=frames,
        times=np.linspace(0.0, 1.0, n_frames),
        energies=np.array([willmore_energy(m).total for m in frames]),
        events=[EventRecord(EventKind.ISLAND, (1, 2), np.array([0.1, 0.2, 0.3]))],
        provenance={"kind": "Morin2Fold", "config_hash": "0" * 64, "seed": 0, "halfway_energy": 4.0},
    )


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture
def sphere() -> TriMesh:
    """Level-2 unit icosphere (162 vertices, 320 faces)."""
    return icosphere(2)


@pytest.fixture
def fine_sphere() -> TriMesh:
    """Level-3 unit icosphere (642 vertices, 1280 faces)."""
    return icosphere(3)


@pytest.fixture
def tet() -> TriMesh:
    return tetrahedron()
