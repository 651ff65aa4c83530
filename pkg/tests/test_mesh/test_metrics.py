# tests/test_mesh/test_metrics.py

"""
Tests for global mesh metrics and the deterministic pairwise reduction.
"""

import math

import numpy as np
import pytest

from pyevert.mesh import (
    area_weighted_centroid,
    corner_angles,
    face_quality,
    icosphere,
    mesh_metrics,
    pairwise_sum,
    signed_volume,
)


class TestPairwiseSum:
    """Fixed-tree summation."""

    def test_empty_is_zero(self):
        assert pairwise_sum(np.array([])) == 0.0

    @pytest.mark.parametrize("n", [1, 2, 3, 7, 64, 1000])
    def test_matches_exact_integer_sum(self, n):
        values = np.arange(n, dtype=np.float64)
        assert pairwise_sum(values) == n * (n - 1) / 2

    def test_independent_of_memory_layout(self):
        values = np.random.default_rng(3).normal(size=(40, 3))
        assert pairwise_sum(values[:, 1]) == pairwise_sum(np.ascontiguousarray(values[:, 1]))


class TestMeshMetrics:
    """Gauss-Bonnet, area and volume of a level-3 icosphere."""

    def setup_method(self):
        self.mesh = icosphere(3)
        self.metrics = mesh_metrics(self.mesh)

    def test_euler_characteristic(self):
        assert self.metrics.euler_characteristic == 2

    def test_gauss_bonnet(self):
        assert abs(self.metrics.total_angle_defect - 4.0 * math.pi) <= 1e-9
        assert self.metrics.gauss_bonnet_residual <= 1e-9

    def test_inscribed_volume_just_below_ball(self):
        ball = 4.0 * math.pi / 3.0
        assert self.metrics.signed_volume < ball
        assert self.metrics.signed_volume > 0.99 * ball

    def test_area_just_below_sphere(self):
        assert 0.99 * 4.0 * math.pi < self.metrics.total_area < 4.0 * math.pi

    def test_flip_negates_volume(self):
        assert mesh_metrics(self.mesh.flipped()).signed_volume == -self.metrics.signed_volume

    def test_gauss_bonnet_on_deformed_sphere(self):
        rng = np.random.default_rng(11)
        bumpy = self.mesh.with_vertices(
            self.mesh.vertices * (1.0 + 0.05 * rng.uniform(size=(self.mesh.n_vertices, 1)))
        )
        m = mesh_metrics(bumpy)
        assert abs(m.total_angle_defect - 4.0 * math.pi) <= 1e-9

    def test_to_dict_keys(self):
        assert set(self.metrics.to_dict()) == {
            "euler_characteristic", "total_area", "signed_volume", "total_angle_defect",
        }


class TestLocalMeasures:
    """Corner angles, shape quality and centroid."""

    def test_corner_angles_sum_to_pi(self, sphere):
        assert np.allclose(corner_angles(sphere).sum(axis=1), math.pi, atol=1e-12)

    def test_equilateral_quality_is_one(self, tet):
        assert np.allclose(face_quality(tet), 1.0, atol=1e-12)

    def test_quality_in_unit_interval(self, sphere):
        q = face_quality(sphere)
        assert np.all(q > 0.0)
        assert np.all(q <= 1.0 + 1e-12)

    def test_centroid_follows_translation(self, sphere):
        offset = np.array([1.5, -2.0, 0.25])
        assert np.allclose(area_weighted_centroid(sphere.translated(offset)), offset, atol=1e-12)

    def test_volume_scales_cubically(self, sphere):
        assert signed_volume(sphere.scaled(2.0)) == pytest.approx(8.0 * signed_volume(sphere), rel=1e-12)
