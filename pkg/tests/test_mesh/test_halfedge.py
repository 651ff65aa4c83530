# tests/test_mesh/test_halfedge.py

"""
Tests for half-edge mesh construction and validation.

Covers:
- build_and_validate on closed, open, non-manifold and non-orientable input
- half-edge table invariants (next, twin, origin)
- orientation repair and orientation reversal
- immutability of built meshes
"""

import numpy as np
import pytest

from pyevert.errors import (
    DegenerateFace,
    MeshError,
    NonManifoldEdge,
    NotOrientable,
    OpenBoundary,
)
from pyevert.mesh import FaceSoup, build_and_validate, icosphere, signed_volume
from tests.conftest import tetrahedron


# Six-vertex projective plane (every edge on two faces, no consistent orientation)
RP2_FACES = np.array([
    [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
    [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3],
])


# ---------------------------------------------------------------------------
# Validation errors
# ---------------------------------------------------------------------------

class TestBuildAndValidate:
    """Closed, manifold, orientable input is accepted; everything else raises."""

    def test_tetrahedron_is_valid(self, tet):
        assert tet.n_vertices == 4
        assert tet.n_faces == 4
        assert tet.n_edges == 6
        assert tet.euler_characteristic == 2

    def test_two_triangles_raise_open_boundary(self):
        positions = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.5]])
        with pytest.raises(OpenBoundary):
            build_and_validate([[0, 1, 2], [1, 0, 3]], positions)

    def test_edge_with_four_faces_raises_non_manifold(self):
        # Two tetrahedra glued along the edge (0, 1) only
        positions = np.array([
            [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 1.0, 0.2],
            [0.5, 0.3, 1.0], [0.5, -1.0, 0.1], [0.5, -0.4, -1.0],
        ])
        faces = [
            [0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2],
            [0, 1, 4], [0, 5, 1], [0, 4, 5], [1, 5, 4],
        ]
        with pytest.raises(NonManifoldEdge):
            build_and_validate(faces, positions)

    def test_projective_plane_raises_not_orientable(self):
        positions = np.random.default_rng(0).normal(size=(6, 3))
        with pytest.raises(NotOrientable):
            build_and_validate(RP2_FACES, positions)

    def test_repeated_vertex_raises_degenerate_face(self):
        with pytest.raises(DegenerateFace):
            build_and_validate([[0, 0, 1]], np.zeros((2, 3)))

    def test_zero_area_face_raises_degenerate_face(self):
        positions = np.array(tetrahedron().vertices)
        positions[3] = 0.5 * (positions[1] + positions[2])
        faces = tetrahedron().faces
        with pytest.raises(DegenerateFace):
            build_and_validate(faces, positions)

    def test_zero_area_face_accepted_without_degeneracy_check(self):
        positions = np.array(tetrahedron().vertices)
        positions[3] = 0.5 * (positions[1] + positions[2])
        mesh = build_and_validate(tetrahedron().faces, positions, check_degenerate=False)
        assert mesh.degenerate_faces().size > 0

    def test_index_out_of_range_raises(self):
        with pytest.raises(MeshError):
            build_and_validate([[0, 1, 5]], np.zeros((3, 3)))

    def test_unreferenced_vertex_raises(self):
        positions = np.vstack([tetrahedron().vertices, [[5.0, 5.0, 5.0]]])
        with pytest.raises(MeshError, match="unreferenced"):
            build_and_validate(tetrahedron().faces, positions)

    def test_non_finite_positions_raise(self):
        positions = np.array(tetrahedron().vertices)
        positions[0, 0] = np.nan
        with pytest.raises(MeshError):
            build_and_validate(tetrahedron().faces, positions)

    def test_mesh_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            build_and_validate([[0, 1, 2]], np.eye(3))


# ---------------------------------------------------------------------------
# Half-edge tables
# ---------------------------------------------------------------------------

class TestHalfedgeTables:
    """next, twin and origin tables of an icosphere."""

    def setup_method(self):
        self.mesh = icosphere(2)
        self.h = np.arange(3 * self.mesh.n_faces)

    def test_next_has_period_three(self):
        nxt = self.mesh.halfedge_next
        assert np.array_equal(nxt[nxt[nxt]], self.h)

    def test_twin_is_an_involution_without_fixed_points(self):
        twin = self.mesh.twin
        assert np.array_equal(twin[twin], self.h)
        assert not np.any(twin == self.h)

    def test_twins_traverse_edges_oppositely(self):
        origin = self.mesh.halfedge_origin
        nxt = self.mesh.halfedge_next
        twin = self.mesh.twin
        assert np.array_equal(origin[twin], origin[nxt])

    def test_one_halfedge_per_edge(self):
        assert self.mesh.edges.shape == (self.mesh.n_edges, 2)
        assert np.all(self.mesh.edges[:, 0] < self.mesh.edges[:, 1])

    def test_vertex_degrees_sum_to_twice_edges(self):
        assert self.mesh.vertex_degrees.sum() == 2 * self.mesh.n_edges


# ---------------------------------------------------------------------------
# Orientation
# ---------------------------------------------------------------------------

class TestOrientation:
    """Inconsistent input is repaired; flipping negates the volume."""

    def test_single_flipped_face_is_repaired(self, tet):
        faces = np.array(tet.faces)
        faces[3] = faces[3][[0, 2, 1]]
        repaired = build_and_validate(faces, tet.vertices)
        assert np.array_equal(repaired.faces, tet.faces)

    def test_tetrahedron_faces_point_outward(self, tet):
        assert signed_volume(tet) == pytest.approx(8.0 / 3.0, rel=1e-12)

    def test_flipped_negates_signed_volume_exactly(self, sphere):
        assert signed_volume(sphere.flipped()) == -signed_volume(sphere)

    def test_flipped_twice_restores_faces(self, sphere):
        assert np.array_equal(sphere.flipped().flipped().faces, sphere.faces)


# ---------------------------------------------------------------------------
# Immutability and derived meshes
# ---------------------------------------------------------------------------

class TestDerivedMeshes:
    """Meshes are values: arrays are read-only and edits return new meshes."""

    def test_arrays_are_read_only(self, sphere):
        with pytest.raises(ValueError):
            sphere.vertices[0, 0] = 3.0
        with pytest.raises(ValueError):
            sphere.faces[0, 0] = 1

    def test_with_vertices_keeps_connectivity(self, sphere):
        moved = sphere.with_vertices(2.0 * sphere.vertices)
        assert moved.faces is sphere.faces
        assert np.allclose(moved.vertices, 2.0 * sphere.vertices)

    def test_with_vertices_rejects_wrong_count(self, sphere):
        with pytest.raises(MeshError):
            sphere.with_vertices(sphere.vertices[:-1])

    def test_transformed_applies_matrix_and_offset(self, tet):
        matrix = np.diag([1.0, -1.0, 2.0])
        moved = tet.transformed(matrix, offset=[1.0, 0.0, 0.0])
        assert np.allclose(moved.vertices, tet.vertices @ matrix.T + [1.0, 0.0, 0.0])

    def test_orbit_tag_round_trip(self, tet):
        tagged = tet.with_orbit_tag([0, 0, 1, 1])
        assert tagged.orbit_tag.tolist() == [0, 0, 1, 1]
        assert tagged.with_orbit_tag(None).orbit_tag is None

    def test_face_soup_shares_geometry(self, sphere):
        soup = sphere.as_soup()
        assert isinstance(soup, FaceSoup)
        assert soup.mean_edge_length == pytest.approx(sphere.mean_edge_length)
        assert soup.n_faces == sphere.n_faces
