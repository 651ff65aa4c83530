# tests/test_energy/test_willmore.py

"""
Tests for the discrete Willmore energy and its exact gradient.

Covers:
- normalisation on icospheres and convergence under refinement
- scale and rigid-motion invariance
- exact gradient against central finite differences
- translation, rotation and scaling identities of the gradient
"""

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from pyevert.energy import (
    energy_and_gradient,
    energy_of_positions,
    finite_difference_gradient,
    willmore_energy,
    willmore_gradient,
)
from pyevert.errors import DegenerateFace
from pyevert.mesh import build_and_validate, icosphere
from tests.conftest import tetrahedron


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_blob(seed: int, n_points: int = 60):
    """Convex hull of points on the unit sphere, then bumped radially."""
    rng = np.random.default_rng(seed)
    points = rng.normal(size=(n_points, 3))
    points /= np.linalg.norm(points, axis=1)[:, None]
    mesh = build_and_validate(ConvexHull(points).simplices, points)
    bumps = 1.0 + 0.15 * rng.uniform(size=(mesh.n_vertices, 1))
    return mesh.with_vertices(mesh.vertices * bumps)


# ---------------------------------------------------------------------------
# Energy
# ---------------------------------------------------------------------------

class TestNormalisation:
    """A finely sampled round sphere scores 1."""

    def test_level_three_icosphere(self, fine_sphere):
        assert willmore_energy(fine_sphere).total == pytest.approx(1.0, abs=0.02)

    def test_error_decreases_with_refinement(self):
        errors = [abs(willmore_energy(icosphere(level)).total - 1.0) for level in (2, 3, 4)]
        assert errors[0] > errors[1] > errors[2]

    def test_energy_is_non_negative(self):
        assert willmore_energy(random_blob(0)).total >= 0.0

    def test_per_vertex_terms_sum_to_total(self, sphere):
        breakdown = willmore_energy(sphere)
        assert breakdown.per_vertex_energy.sum() == pytest.approx(breakdown.total, rel=1e-12)

    def test_voronoi_areas_tile_the_surface(self, sphere):
        breakdown = willmore_energy(sphere)
        assert breakdown.voronoi_area.sum() == pytest.approx(sphere.face_areas().sum(), rel=1e-12)

    def test_raw_positions_match_mesh_api(self, sphere):
        assert energy_of_positions(sphere.vertices, sphere.faces) == willmore_energy(sphere).total

    def test_to_frame_has_one_row_per_vertex(self, sphere):
        df = willmore_energy(sphere).to_frame()
        assert len(df) == sphere.n_vertices
        assert list(df.columns) == ["VERTEX", "MX", "MY", "MZ", "AREA", "H", "ENERGY"]

    def test_degenerate_face_raises(self):
        tet = tetrahedron()
        positions = np.array(tet.vertices)
        positions[3] = 0.5 * (positions[1] + positions[2])
        flat = build_and_validate(tet.faces, positions, check_degenerate=False)
        with pytest.raises(DegenerateFace):
            willmore_energy(flat)


class TestInvariance:
    """Scale and rigid-motion invariance to 1e-12 relative."""

    def setup_method(self):
        self.mesh = random_blob(1)
        self.energy = willmore_energy(self.mesh).total

    @pytest.mark.parametrize("factor", [0.1, 7.0, 1000.0])
    def test_scale_invariance(self, factor):
        scaled = willmore_energy(self.mesh.scaled(factor)).total
        assert scaled == pytest.approx(self.energy, rel=1e-12)

    def test_rigid_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            moved = self.mesh.transformed(random_rotation(rng), offset=rng.normal(size=3))
            assert willmore_energy(moved).total == pytest.approx(self.energy, rel=1e-12)


# ---------------------------------------------------------------------------
# Gradient
# ---------------------------------------------------------------------------

class TestGradient:
    """The analytic gradient is the derivative of the discrete energy."""

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_matches_central_differences(self, seed):
        mesh = random_blob(seed)
        exact = willmore_gradient(mesh).vectors
        errors = []
        for step in (1e-4, 1e-5, 1e-6, 1e-7):
            approx = finite_difference_gradient(mesh, step).vectors
            errors.append(np.linalg.norm(approx - exact) / np.linalg.norm(exact))
        assert min(errors) <= 1e-5

    def test_directional_derivative(self):
        mesh = random_blob(5)
        rng = np.random.default_rng(9)
        direction = rng.normal(size=mesh.vertices.shape)
        slope = float(np.sum(willmore_gradient(mesh).vectors * direction))
        h = 1e-6
        e_plus = energy_of_positions(mesh.vertices + h * direction, mesh.faces)
        e_minus = energy_of_positions(mesh.vertices - h * direction, mesh.faces)
        assert (e_plus - e_minus) / (2.0 * h) == pytest.approx(slope, rel=1e-5)

    def test_energy_and_gradient_single_pass(self, sphere):
        energy, gradient = energy_and_gradient(sphere)
        assert energy == willmore_energy(sphere).total
        assert np.array_equal(gradient.vectors, willmore_gradient(sphere).vectors)


class TestGradientIdentities:
    """Invariances of the energy show up as linear identities of the gradient."""

    def setup_method(self):
        self.mesh = random_blob(6)
        self.gradient = willmore_gradient(self.mesh)
        self.scale = np.abs(self.gradient.vectors).sum()

    def test_sum_vanishes(self):
        assert np.abs(self.gradient.vectors.sum(axis=0)).max() <= 1e-9 * self.scale

    def test_torque_vanishes(self):
        torque = np.cross(self.mesh.vertices, self.gradient.vectors).sum(axis=0)
        assert np.abs(torque).max() <= 1e-9 * self.scale

    def test_scaling_mode_vanishes(self):
        radial = np.einsum("ij,ij->", self.mesh.vertices, self.gradient.vectors)
        assert abs(radial) <= 1e-9 * self.scale

    def test_norms(self):
        gradient = self.gradient
        assert gradient.norm == pytest.approx(np.linalg.norm(gradient.vectors))
        assert gradient.max_norm <= gradient.norm
        assert gradient.dot(gradient.vectors) == pytest.approx(gradient.norm ** 2, rel=1e-12)
