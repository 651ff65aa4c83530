# tests/test_mesh/test_quality.py

"""
Tests for improve(): equiangulating flips, tangential smoothing and the
energy rollback guard.
"""

import numpy as np
import pytest

from pyevert.errors import ConfigError
from pyevert.mesh import ImproveConfig, build_and_validate, corner_angles, icosphere, improve, tangential_smooth


def _flip_edge(mesh, h):
    """Flip the edge of half-edge ``h``; returns a new mesh."""
    t = int(mesh.twin[h])
    f1, f2 = h // 3, t // 3
    faces = np.array(mesh.faces)
    a = faces[f1, h % 3]
    b = faces[f1, (h % 3 + 1) % 3]
    c = faces[f1, (h % 3 + 2) % 3]
    d = faces[f2, (t % 3 + 2) % 3]
    faces[f1] = (a, d, c)
    faces[f2] = (d, b, c)
    return build_and_validate(faces, mesh.vertices)


class TestImproveConfig:
    """Settings are validated on construction."""

    def test_defaults_are_valid(self):
        config = ImproveConfig()
        assert config.flip_passes >= 1

    def test_negative_flip_passes_rejected(self):
        with pytest.raises(ConfigError):
            ImproveConfig(flip_passes=-1)

    def test_smoothing_weight_above_one_rejected(self):
        with pytest.raises(ConfigError):
            ImproveConfig(smoothing_weight=1.5)


class TestImprove:
    """improve keeps topology and never raises the energy beyond tolerance."""

    def test_delaunay_sphere_is_a_fixed_point(self, sphere):
        out, report = improve(sphere, ImproveConfig(smoothing_iterations=0))
        assert report.flips == 0
        assert report.collapses == 0
        assert report.max_displacement <= 1e-12
        assert not report.rolled_back
        assert not report.changed
        assert np.array_equal(out.faces, sphere.faces)

    def test_bad_flip_is_undone(self, sphere):
        h = int(sphere.edge_halfedges[0])
        bad = _flip_edge(sphere, h)
        before = corner_angles(bad).min()
        out, report = improve(bad, ImproveConfig(smoothing_iterations=0, energy_tolerance=1.0))
        assert report.flips >= 1
        assert not report.rolled_back
        assert corner_angles(out).min() > before

    def test_euler_characteristic_preserved(self, sphere):
        stretched = sphere.transformed(np.diag([1.0, 1.0, 3.0]))
        out, _ = improve(stretched)
        assert out.euler_characteristic == 2

    def test_energy_never_rises_beyond_tolerance(self, sphere):
        stretched = sphere.transformed(np.diag([1.0, 0.6, 2.0]))
        out, report = improve(stretched, ImproveConfig(energy_tolerance=0.0))
        if report.rolled_back:
            assert out is stretched
        else:
            assert report.energy_after <= report.energy_before

    def test_report_to_dict(self, sphere):
        _, report = improve(sphere, ImproveConfig(smoothing_iterations=0))
        d = report.to_dict()
        assert d["flips"] == 0
        assert d["rolled_back"] is False

    def test_orbit_tag_kept_without_remeshing(self, sphere):
        tagged = sphere.with_orbit_tag(np.arange(sphere.n_vertices))
        out, report = improve(tagged, ImproveConfig(smoothing_iterations=0))
        assert report.flips == 0
        assert np.array_equal(out.orbit_tag, np.arange(sphere.n_vertices))


class TestTangentialSmooth:
    """Smoothing moves vertices only within their tangent planes."""

    def test_zero_iterations_is_identity(self, sphere):
        assert np.array_equal(tangential_smooth(sphere, 0, 0.5).vertices, sphere.vertices)

    def test_motion_is_tangential(self):
        mesh = icosphere(2)
        rng = np.random.default_rng(5)
        noisy = mesh.with_vertices(mesh.vertices + 0.01 * rng.normal(size=mesh.vertices.shape))
        smoothed = tangential_smooth(noisy, 1, 0.5)
        motion = smoothed.vertices - noisy.vertices
        normals = noisy.vertex_normals()
        assert np.allclose(np.einsum("ij,ij->i", motion, normals), 0.0, atol=1e-12)
        assert np.abs(motion).max() > 0.0
