# tests/test_intersections/test_primitives.py

"""
Tests for triangle-triangle intersection and the face-box hierarchy.
"""

import numpy as np
import pytest

from pyevert.errors import CoplanarCase
from pyevert.intersections import FaceBVH, brute_force_pairs, face_boxes, intersect_pairs, tri_tri_intersect

FLAT = [[-1.0, -1.0, 0.0], [2.0, -1.0, 0.0], [-1.0, 2.0, 0.0]]
WALL = [[0.2, 0.1, -1.0], [0.2, 0.6, -1.0], [0.2, 0.35, 1.0]]


def as_point_set(segment, decimals=12):
    return {tuple(np.round(p, decimals)) for p in np.asarray(segment)}


class TestTriTriIntersect:
    """Segment of two triangles, independent of endpoint order."""

    def test_wall_through_flat_triangle(self):
        segment = tri_tri_intersect(FLAT, WALL)
        assert segment.shape == (2, 3)
        assert as_point_set(segment) == {(0.2, 0.475, 0.0), (0.2, 0.225, 0.0)}

    def test_argument_order_does_not_matter(self):
        assert as_point_set(tri_tri_intersect(WALL, FLAT)) == as_point_set(tri_tri_intersect(FLAT, WALL))

    def test_disjoint(self):
        lifted = np.array(WALL) + [0.0, 0.0, 5.0]
        assert tri_tri_intersect(FLAT, lifted) is None

    def test_wall_beside_the_triangle(self):
        beside = np.array(WALL) + [3.0, 0.0, 0.0]
        assert tri_tri_intersect(FLAT, beside) is None

    def test_coplanar(self):
        shifted = np.array(FLAT) * 0.5
        with pytest.raises(CoplanarCase):
            tri_tri_intersect(FLAT, shifted)

    def test_shared_edge_returned(self):
        other = [FLAT[0], FLAT[1], [0.0, 0.0, 1.0]]
        segment = tri_tri_intersect(FLAT, other)
        assert as_point_set(segment) == as_point_set([FLAT[0], FLAT[1]])


class TestIntersectPairs:
    """Batch kernel on a two-face mesh."""

    def test_keys_name_the_piercing_edges(self):
        positions = np.vstack([FLAT, WALL])
        faces = np.array([[0, 1, 2], [3, 4, 5]])
        result = intersect_pairs(positions, faces, np.array([[0, 1]]), 1e-12)
        assert result.hit.tolist() == [True]
        assert not result.inconsistent[0]
        edges = {tuple(k[:2]) for k in result.keys[0].tolist()}
        # the wall's two slanted edges pierce the flat triangle
        assert edges == {(3, 5), (4, 5)}
        assert set(result.keys[0, :, 2].tolist()) == {0}


class TestFaceBVH:
    """The tree finds exactly the overlapping box pairs."""

    @pytest.mark.parametrize("leaf_size", [1, 3, 8, 64])
    def test_matches_brute_force_on_random_boxes(self, leaf_size):
        rng = np.random.default_rng(leaf_size)
        lo = rng.uniform(0.0, 10.0, size=(300, 3))
        boxes = np.stack([lo, lo + rng.uniform(0.1, 1.5, size=(300, 3))], axis=1)
        tree = FaceBVH(boxes, leaf_size)
        assert np.array_equal(tree.self_pairs(), brute_force_pairs(boxes))

    def test_matches_brute_force_on_a_mesh(self, fine_sphere):
        boxes = face_boxes(fine_sphere.vertices, fine_sphere.faces, pad=1e-9)
        assert np.array_equal(FaceBVH(boxes).self_pairs(), brute_force_pairs(boxes))

    def test_pairs_sorted_and_ordered(self, sphere):
        pairs = FaceBVH(face_boxes(sphere.vertices, sphere.faces)).self_pairs()
        assert np.all(pairs[:, 0] < pairs[:, 1])
        assert np.array_equal(pairs, np.unique(pairs, axis=0))

    def test_depth_is_logarithmic(self, fine_sphere):
        tree = FaceBVH(face_boxes(fine_sphere.vertices, fine_sphere.faces), leaf_size=8)
        assert tree.depth <= 12

    def test_empty(self):
        assert FaceBVH(np.zeros((0, 2, 3))).self_pairs().shape == (0, 2)

    def test_bad_leaf_size(self):
        with pytest.raises(ValueError):
            FaceBVH(np.zeros((1, 2, 3)), leaf_size=0)
