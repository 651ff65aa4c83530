# tests/test_intersections/test_report.py

"""
Tests for the self-intersection report and the energy lower bound audit.
"""

import math

import numpy as np
import pytest

from pyevert.errors import ConfigError
from pyevert.intersections import (
    IntersectionTolerances,
    candidate_pairs,
    li_yau_check,
    li_yau_table,
    self_intersection,
)
from pyevert.mesh import FaceSoup, icosphere
from pyevert.symmetry import rotation_matrix
from tests.conftest import two_spheres


def three_spheres(level: int = 2) -> FaceSoup:
    """Unit spheres on the corners of a unit triangle in the xy plane."""
    centers = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, math.sqrt(3.0) / 2.0, 0.0]]
    axes = [[1.0, 2.0, 3.0], [-2.0, 1.0, 0.5], [0.3, -1.0, 2.0]]
    positions, faces, offset = [], [], 0
    for c, axis in zip(centers, axes):
        s = icosphere(level).transformed(rotation_matrix(axis, 0.4), offset=c)
        positions.append(s.vertices)
        faces.append(s.faces + offset)
        offset += s.n_vertices
    return FaceSoup(np.vstack(positions), np.vstack(faces))


class TestTolerances:
    """Validation of the analysis tolerances."""

    def test_defaults(self):
        tol = IntersectionTolerances()
        assert tol.event_match_edges == 3.0
        assert tol.max_frame_displacement_edges == 4.0

    def test_plane_epsilon_below_chain_tolerance(self):
        with pytest.raises(ConfigError):
            IntersectionTolerances(plane_epsilon=1e-6, chain_tolerance=1e-7)

    def test_non_positive_rejected(self):
        with pytest.raises(ConfigError):
            IntersectionTolerances(leaf_size=0)

    def test_from_dict_unknown_key(self):
        with pytest.raises(ConfigError):
            IntersectionTolerances.from_dict({"chain_tol": 1e-7})


class TestEmbedded:
    """A round sphere has no self-intersection."""

    def test_icosphere(self, fine_sphere):
        report = self_intersection(fine_sphere)
        assert report.is_embedded
        assert report.n_double_curves == 0
        assert report.max_multiplicity == 1
        assert math.isinf(report.tightest_quadruple_radius)

    def test_adjacent_pairs_skipped(self, sphere):
        pairs, stats = candidate_pairs(sphere, IntersectionTolerances())
        assert stats["adjacent_pairs"] > 0
        f = sphere.faces[pairs[:, 0]]
        g = sphere.faces[pairs[:, 1]]
        assert not np.any(f[:, :, None] == g[:, None, :])

    def test_bvh_agrees_with_exhaustive_pairs(self, sphere):
        tol = IntersectionTolerances()
        with_tree, _ = candidate_pairs(sphere, tol, use_bvh=True)
        exhaustive, _ = candidate_pairs(sphere, tol, use_bvh=False)
        assert np.array_equal(with_tree, exhaustive)


class TestTwoSpheres:
    """Unit spheres one unit apart meet in a circle of radius sqrt(3)/2."""

    def setup_method(self):
        self.soup = two_spheres(1.0)
        self.report = self_intersection(self.soup)

    def test_one_closed_double_curve(self):
        assert self.report.n_double_curves == 1
        assert self.report.max_multiplicity == 2
        assert self.report.n_triple_points == 0

    def test_curve_uses_every_segment_once(self):
        order = np.sort(self.report.curve_segments[0])
        assert np.array_equal(order, np.arange(self.report.n_segments))

    def test_circle_radius(self):
        curve = self.report.double_curves[0]
        radius = np.linalg.norm(curve[:, 1:], axis=1)
        edge = self.soup.mean_edge_length
        assert np.abs(radius - math.sqrt(3.0) / 2.0).max() <= max(0.03, 0.25 * edge)
        assert np.abs(curve[:, 0] - 0.5).max() <= max(0.03, 0.25 * edge)

    def test_same_result_without_tree(self):
        exhaustive = self_intersection(self.soup, use_bvh=False)
        assert np.array_equal(exhaustive.face_pairs, self.report.face_pairs)

    def test_transformed(self):
        r = rotation_matrix([0.0, 0.0, 1.0], 0.5)
        moved = self.report.transformed(r)
        assert np.allclose(moved.double_curves[0], self.report.double_curves[0] @ r.T)

    def test_table(self):
        df = self.report.to_frame()
        assert list(df.columns) == ["FEATURE", "INDEX", "X", "Y", "Z", "SIZE", "EXTENT"]
        assert df["FEATURE"].tolist() == ["DoubleCurve"]
        assert df["EXTENT"].iloc[0] == pytest.approx(math.pi * math.sqrt(3.0), rel=0.08)

    def test_summary(self):
        assert self.report.summary()["double_curves"] == 1

    def test_far_apart_spheres_are_disjoint(self):
        assert self_intersection(two_spheres(2.5)).is_embedded


class TestThreeSpheres:
    """Three mutually overlapping spheres meet in two triple points."""

    def setup_method(self):
        self.report = self_intersection(three_spheres())

    def test_double_curves(self):
        assert self.report.n_double_curves == 3

    def test_triple_points(self):
        assert self.report.n_triple_points == 2
        assert self.report.max_multiplicity == 3
        z = np.sort(self.report.triple_points[:, 2])
        assert z[0] < 0.0 < z[1]


class TestLiYau:
    """Energy against multiplicity."""

    def test_round_sphere_passes(self, fine_sphere):
        k, energy, passed = li_yau_check(fine_sphere)
        assert k == 1
        assert passed
        assert energy == pytest.approx(1.0, abs=0.02)

    def test_table(self, sphere, fine_sphere):
        frames = [sphere, fine_sphere]
        reports = [self_intersection(m) for m in frames]
        df = li_yau_table(frames, reports)
        assert list(df.columns) == ["FRAME", "TIME", "MULTIPLICITY", "ENERGY", "BOUND", "PASSED"]
        assert df["PASSED"].all()
        assert df["TIME"].tolist() == [0.0, 1.0]
