# tests/test_mesh/test_obj_io.py

"""
Tests for OBJ serialization: byte-identical round trips, strict parsing
with line/column errors, polylines and frame sequences.
"""

import numpy as np
import pytest

from pyevert.errors import IoFailure, MeshError, ParseFailure
from pyevert.mesh import (
    frame_path,
    icosphere,
    list_frames,
    parse_obj,
    read_frames,
    read_obj,
    read_polylines,
    write_obj,
    write_polylines,
)


class TestRoundTrip:
    """write -> read -> write is byte-identical."""

    def test_mesh_round_trip_is_byte_identical(self, tmp_path):
        rng = np.random.default_rng(2)
        mesh = icosphere(2)
        mesh = mesh.with_vertices(mesh.vertices * (1.0 + 0.1 * rng.uniform(size=(mesh.n_vertices, 1))))
        first = write_obj(mesh, tmp_path / "a.obj", header="time 0.25")
        second = write_obj(read_obj(first), tmp_path / "b.obj", header="time 0.25")
        assert first.read_bytes() == second.read_bytes()

    def test_positions_survive_exactly(self, tmp_path, sphere):
        path = write_obj(sphere, tmp_path / "s.obj")
        again = read_obj(path)
        assert np.array_equal(again.vertices, sphere.vertices)
        assert np.array_equal(again.faces, sphere.faces)

    def test_faces_written_one_based(self, tmp_path, tet):
        text = write_obj(tet, tmp_path / "t.obj").read_text()
        face_lines = [line for line in text.splitlines() if line.startswith("f ")]
        assert face_lines[0] == "f 1 2 3"

    def test_polylines_round_trip(self, tmp_path):
        square = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
        triangle = np.array([[0.0, 0.0, 2.0], [1.0, 0.0, 2.0], [0.0, 1.0, 2.0]])
        path = write_polylines([square, triangle], tmp_path / "c.curves.obj")
        curves = read_polylines(path)
        assert len(curves) == 2
        assert np.array_equal(curves[0], square)
        assert np.array_equal(curves[1], triangle)


class TestParser:
    """The parser is strict and reports line and column."""

    def test_bad_number_reports_position(self):
        with pytest.raises(ParseFailure) as exc_info:
            parse_obj("v 0 0 0\nv 1 0 x\n")
        assert exc_info.value.line == 2
        assert exc_info.value.column == 7

    def test_quad_rejected(self):
        text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n"
        with pytest.raises(ParseFailure) as exc_info:
            parse_obj(text)
        assert exc_info.value.line == 5

    def test_index_out_of_range(self):
        with pytest.raises(ParseFailure, match="out of range"):
            parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n")

    def test_zero_index_rejected(self):
        with pytest.raises(ParseFailure):
            parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n")

    def test_unknown_record_rejected(self):
        with pytest.raises(ParseFailure, match="unsupported"):
            parse_obj("vt 0.5 0.5\n")

    def test_comments_groups_and_slashes_accepted(self):
        text = "# header\no thing\nv 0 0 0\nv 1 0 0\nv 0 1 0\ng part\nf 1/1 2/2 3/3 # tail\n"
        vertices, faces, lines = parse_obj(text)
        assert vertices.shape == (3, 3)
        assert faces.tolist() == [[0, 1, 2]]
        assert lines == []

    def test_path_in_message(self):
        with pytest.raises(ParseFailure, match="mesh.obj:1:1"):
            parse_obj("w 1 2 3\n", path="mesh.obj")

    def test_parse_failure_is_io_failure(self):
        with pytest.raises(IoFailure):
            parse_obj("v 1 2\n")

    def test_invalid_utf8(self, tmp_path):
        path = tmp_path / "latin.obj"
        path.write_bytes(b"v 0 0 0\nv 1 \xe9 0\n")
        with pytest.raises(ParseFailure, match="latin.obj:2:5") as exc_info:
            read_obj(path)
        assert exc_info.value.line == 2
        assert exc_info.value.column == 5

    def test_open_mesh_fails_validation(self, tmp_path):
        path = tmp_path / "open.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n")
        with pytest.raises(MeshError):
            read_obj(path)

    def test_missing_file_raises_io_failure(self, tmp_path):
        with pytest.raises(IoFailure):
            read_obj(tmp_path / "missing.obj")


class TestFrames:
    """Zero-padded frame sequences are read in numeric order."""

    def test_frame_path_is_zero_padded(self, tmp_path):
        assert frame_path(tmp_path, 7).name == "frame_0007.obj"
        assert frame_path(tmp_path, 7, suffix=".curves.obj").name == "frame_0007.curves.obj"

    def test_frames_listed_in_numeric_order(self, tmp_path, tet):
        for i in (10, 2, 0):
            write_obj(tet.scaled(i + 1.0), frame_path(tmp_path, i))
        write_obj(tet, tmp_path / "frame_0003.curves.obj")
        names = [p.name for p in list_frames(tmp_path)]
        assert names == ["frame_0000.obj", "frame_0002.obj", "frame_0010.obj"]

    def test_read_frames(self, tmp_path, tet):
        for i in range(3):
            write_obj(tet.translated([i, 0.0, 0.0]), frame_path(tmp_path, i))
        frames = read_frames(tmp_path)
        assert len(frames) == 3
        assert frames[2].vertices[0, 0] == pytest.approx(tet.vertices[0, 0] + 2.0)

    def test_empty_directory_raises(self, tmp_path):
        with pytest.raises(IoFailure):
            read_frames(tmp_path)

    def test_missing_directory_raises(self, tmp_path):
        with pytest.raises(IoFailure):
            list_frames(tmp_path / "nowhere")
