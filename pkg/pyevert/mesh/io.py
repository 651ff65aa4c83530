# pyevert/mesh/io.py

"""
ASCII OBJ reading and writing.

Meshes are written as ``v x y z`` records with 17 significant digits and
``f i j k`` records with 1-based indices, so a write -> read -> write cycle
is byte-identical. Polylines (double curves) use OBJ ``l`` records. Frame
sequences use zero-padded numeric suffixes (``frame_0000.obj``).

The reader is strict: anything other than vertex, face, line, group/object
names, smoothing groups and comments raises :class:`ParseFailure` with the
line and column of the offending token.
"""

from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..constants import FRAME_DIGITS, OBJ_FLOAT_FORMAT
from ..errors import IoFailure, ParseFailure
from .halfedge import TriMesh, build_and_validate

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_IGNORED_RECORDS = {"o", "g", "s", "mtllib", "usemtl"}
_FRAME_PATTERN = re.compile(r"_(\d+)\.obj$")


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------

def _format_vertex(row: np.ndarray) -> str:
    return "v " + " ".join(OBJ_FLOAT_FORMAT % float(c) for c in row) + "\n"


def format_obj(vertices: np.ndarray, faces: np.ndarray, header: Optional[str] = None) -> str:
    """Render positions and faces as OBJ text."""
    lines = []
    if header:
        lines.extend(f"# {h}\n" for h in header.splitlines())
    lines.extend(_format_vertex(row) for row in np.asarray(vertices, dtype=np.float64))
    lines.extend(f"f {a + 1} {b + 1} {c + 1}\n" for a, b, c in np.asarray(faces).tolist())
    return "".join(lines)


def write_obj(mesh: TriMesh, path: PathLike, header: Optional[str] = None) -> Path:
    """
    Write a mesh as ASCII OBJ.

    Parameters
    ----------
    mesh : TriMesh
        Mesh to write (any object with ``vertices`` and ``faces``).
    path : str or Path
        Destination file.
    header : str, optional
        Comment lines written at the top of the file.

    Returns
    -------
    Path
        The written path.

    Raises
    ------
    IoFailure
        If the file cannot be written.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_obj(mesh.vertices, mesh.faces, header))
    except OSError as exc:
        raise IoFailure(f"cannot write mesh to {path}: {exc}") from exc
    return path


def write_polylines(curves: Sequence[np.ndarray], path: PathLike, closed: bool = True) -> Path:
    """
    Write polylines as OBJ ``v``/``l`` records.

    Each curve becomes one ``l`` record; closed curves repeat their first
    vertex index at the end.
    """
    path = Path(path)
    lines = []
    offset = 0
    for curve in curves:
        curve = np.asarray(curve, dtype=np.float64)
        lines.extend(_format_vertex(row) for row in curve)
        indices = list(range(offset + 1, offset + curve.shape[0] + 1))
        if closed and indices:
            indices.append(indices[0])
        lines.append("l " + " ".join(str(i) for i in indices) + "\n")
        offset += curve.shape[0]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("".join(lines))
    except OSError as exc:
        raise IoFailure(f"cannot write polylines to {path}: {exc}") from exc
    return path


def frame_path(directory: PathLike, index: int, stem: str = "frame", suffix: str = ".obj") -> Path:
    """Zero-padded frame file name, e.g. ``frame_0007.obj``."""
    return Path(directory) / f"{stem}_{index:0{FRAME_DIGITS}d}{suffix}"


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------

def _parse_float(token: str, line: int, column: int, path: Optional[str]) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseFailure(f"expected a number, got {token!r}", line, column, path) from None
    if not np.isfinite(value):
        raise ParseFailure(f"non-finite coordinate {token!r}", line, column, path)
    return value


def _parse_index(token: str, line: int, column: int, path: Optional[str]) -> int:
    head = token.split("/", 1)[0]
    if not head.isdigit() or int(head) < 1:
        raise ParseFailure(f"expected a positive 1-based index, got {token!r}", line, column, path)
    return int(head) - 1


def _tokens(text: str) -> Iterable[Tuple[str, int]]:
    """Yield (token, 1-based column) pairs of a line."""
    for match in re.finditer(r"\S+", text):
        yield match.group(0), match.start() + 1


def parse_obj(text: str, path: Optional[str] = None) -> Tuple[np.ndarray, np.ndarray, List[np.ndarray]]:
    """
    Parse OBJ text.

    Returns
    -------
    vertices : np.ndarray
        (V, 3) positions.
    faces : np.ndarray
        (F, 3) 0-based indices.
    lines : list of np.ndarray
        0-based index arrays of the ``l`` records.

    Raises
    ------
    ParseFailure
        Malformed record, non-triangular face or index out of range.
    """
    vertices: List[List[float]] = []
    faces: List[List[int]] = []
    polylines: List[np.ndarray] = []
    index_refs: List[Tuple[int, int, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0]
        tokens = list(_tokens(stripped))
        if not tokens:
            continue
        keyword, col = tokens[0]
        args = tokens[1:]
        if keyword == "v":
            if len(args) not in (3, 4):
                raise ParseFailure(f"vertex needs 3 coordinates, got {len(args)}", lineno, col, path)
            vertices.append([_parse_float(t, lineno, c, path) for t, c in args[:3]])
        elif keyword == "f":
            if len(args) != 3:
                column = args[3][1] if len(args) > 3 else col
                raise ParseFailure(f"only triangles are supported, got {len(args)} indices", lineno, column, path)
            face = []
            for t, c in args:
                face.append(_parse_index(t, lineno, c, path))
                index_refs.append((face[-1], lineno, c))
            faces.append(face)
        elif keyword == "l":
            if len(args) < 2:
                raise ParseFailure("line record needs at least 2 indices", lineno, col, path)
            polylines.append(np.array([_parse_index(t, lineno, c, path) for t, c in args], dtype=np.int64))
        elif keyword in _IGNORED_RECORDS:
            continue
        else:
            raise ParseFailure(f"unsupported record {keyword!r}", lineno, col, path)

    for index, lineno, col in index_refs:
        if index >= len(vertices):
            raise ParseFailure(f"vertex index {index + 1} out of range", lineno, col, path)

    return (
        np.array(vertices, dtype=np.float64).reshape(-1, 3),
        np.array(faces, dtype=np.int64).reshape(-1, 3),
        polylines,
    )


def _read_text(path: PathLike) -> str:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data.count(b"\n", 0, exc.start) + 1
        column = exc.start - data.rfind(b"\n", 0, exc.start)
        raise ParseFailure("invalid UTF-8 byte", line, column, str(path)) from exc


def read_obj(path: PathLike) -> TriMesh:
    """
    Read and validate an OBJ triangle mesh.

    Raises
    ------
    IoFailure
        File missing or unreadable.
    ParseFailure
        Malformed content (with line and column).
    MeshError
        Content parses but is not a valid closed oriented mesh.
    """
    vertices, faces, _ = parse_obj(_read_text(path), str(path))
    return build_and_validate(faces, vertices)


def read_polylines(path: PathLike) -> List[np.ndarray]:
    """Read closed polylines written by :func:`write_polylines`."""
    vertices, _, lines = parse_obj(_read_text(path), str(path))
    curves = []
    for idx in lines:
        if idx.size > 1 and idx[0] == idx[-1]:
            idx = idx[:-1]
        curves.append(vertices[idx])
    return curves


def list_frames(directory: PathLike, stem: str = "frame") -> List[Path]:
    """Frame files of a directory ordered by their numeric suffix."""
    directory = Path(directory)
    if not directory.is_dir():
        raise IoFailure(f"frame directory not found: {directory}")
    frames = []
    for p in directory.glob(f"{stem}_*.obj"):
        match = _FRAME_PATTERN.search(p.name)
        if match and p.name == f"{stem}_{match.group(1)}.obj":
            frames.append((int(match.group(1)), p))
    return [p for _, p in sorted(frames)]


def read_frames(directory: PathLike, stem: str = "frame") -> List[TriMesh]:
    """Read a zero-padded frame sequence in naming order."""
    paths = list_frames(directory, stem)
    if not paths:
        raise IoFailure(f"no '{stem}_NNNN.obj' frames in {directory}")
    logger.info("Reading %d frames from %s", len(paths), directory)
    return [read_obj(p) for p in paths]
