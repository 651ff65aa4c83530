# pyevert/intersections/report.py

"""
Self-intersection analysis of immersed meshes.

``self_intersection`` finds every intersecting pair of vertex-disjoint
faces, chains the segments into closed double curves, locates triple points
on face triples and clusters nearby triple points into quadruple points.

Usage:
	report = self_intersection(mesh)
	report.n_double_curves, report.n_triple_points, report.max_multiplicity
	report.to_frame().to_csv("intersections.csv", index=False)
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, List, Optional, Tuple, Union

import networkx as nx
import numpy as np
import pandas as pd
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from ..errors import ConfigError, ToleranceBreakdown
from ..mesh.halfedge import FaceSoup, TriMesh
from .bvh import FaceBVH, brute_force_pairs, face_boxes
from .primitives import intersect_pairs

logger = logging.getLogger(__name__)

Surface = Union[TriMesh, FaceSoup]


@dataclass(frozen=True)
class IntersectionTolerances:
    """
    Tolerances of the self-intersection analysis and event classification.

    Attributes
    ----------
    chain_tolerance : float
        Endpoint identification distance relative to the bounding box
        diagonal.
    plane_epsilon : float
        Plane-side tolerance relative to the diagonal; closer vertices count
        as lying on the positive side.
    leaf_size : int
        BVH leaf size.
    quadruple_radius_edges : float
        Triple points closer than this many mean edge lengths (or three
        chaining tolerances, whichever is larger) form one cluster.
    event_match_edges : float
        Double curves of consecutive frames closer than this many mean edge
        lengths are matched.
    max_frame_displacement_edges : float
        Consecutive frames moving further than this many mean edge lengths
        cannot be compared.
    """

    chain_tolerance: float = 1e-7
    plane_epsilon: float = 1e-12
    leaf_size: int = 8
    quadruple_radius_edges: float = 0.5
    event_match_edges: float = 3.0
    max_frame_displacement_edges: float = 4.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ConfigError(f"{f.name} must be positive, got {value}")
        if self.plane_epsilon >= self.chain_tolerance:
            raise ConfigError("plane_epsilon must be smaller than chain_tolerance")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "IntersectionTolerances":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"Unknown intersection keys: {sorted(unknown)}")
        return cls(**values)


@dataclass(frozen=True)
class QuadrupleCluster:
    """Triple points merging at one point, with the number of distinct sheets."""

    center: np.ndarray
    radius: float
    n_sheets: int
    n_triple_points: int


@dataclass
class SelfIntersectionReport:
    """
    Self-intersection structure of one surface.

    Attributes
    ----------
    face_pairs : np.ndarray
        (S, 2) intersecting face pairs, sorted.
    segments : np.ndarray
        (S, 2, 3) intersection segment of each pair.
    endpoint_keys : np.ndarray
        (S, 2, 3) ``(edge_lo, edge_hi, other_face)`` of each endpoint.
    double_curves : list of np.ndarray
        Closed polylines, (n, 3) each; the last point connects to the first.
    curve_segments : list of np.ndarray
        Segment indices of each double curve, in traversal order.
    triple_points : np.ndarray
        (T, 3) triple point positions.
    triple_faces : list of tuple
        Face triples meeting at each triple point.
    quadruple_clusters : list of QuadrupleCluster
        Clusters of triple points spanning at least four sheets.
    max_multiplicity : int
        Largest number of sheets through one point (1 when embedded).
    tightest_quadruple_radius : float
        Radius of the tightest group of four triple points (inf with fewer
        than four).
    tightest_quadruple_center : np.ndarray
        Center of that group (NaN with fewer than four).
    diagnostics : dict
        Pair counts and chaining statistics.
    """

    face_pairs: np.ndarray
    segments: np.ndarray
    endpoint_keys: np.ndarray
    double_curves: List[np.ndarray]
    curve_segments: List[np.ndarray]
    triple_points: np.ndarray
    triple_faces: List[Tuple[int, int, int]]
    quadruple_clusters: List[QuadrupleCluster]
    max_multiplicity: int
    tightest_quadruple_radius: float = np.inf
    tightest_quadruple_center: np.ndarray = field(default_factory=lambda: np.full(3, np.nan))
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_segments(self) -> int:
        return int(self.face_pairs.shape[0])

    @property
    def n_double_curves(self) -> int:
        return len(self.double_curves)

    @property
    def n_triple_points(self) -> int:
        return int(self.triple_points.shape[0])

    @property
    def is_embedded(self) -> bool:
        return self.n_segments == 0

    def transformed(self, matrix: np.ndarray) -> "SelfIntersectionReport":
        """Report of the surface moved by the linear map ``matrix``."""
        m = np.asarray(matrix, dtype=np.float64).T
        clusters = [
            QuadrupleCluster(q.center @ m, q.radius, q.n_sheets, q.n_triple_points)
            for q in self.quadruple_clusters
        ]
        return replace(
            self,
            segments=self.segments @ m,
            double_curves=[c @ m for c in self.double_curves],
            triple_points=self.triple_points @ m,
            quadruple_clusters=clusters,
            tightest_quadruple_center=self.tightest_quadruple_center @ m,
        )

    def summary(self) -> Dict[str, Any]:
        return {
            "segments": self.n_segments,
            "double_curves": self.n_double_curves,
            "triple_points": self.n_triple_points,
            "quadruple_clusters": len(self.quadruple_clusters),
            "max_multiplicity": self.max_multiplicity,
            "tightest_quadruple_radius": float(self.tightest_quadruple_radius),
        }

    def to_frame(self) -> pd.DataFrame:
        """One row per double curve, triple point and quadruple cluster."""
        rows = []
        for i, curve in enumerate(self.double_curves):
            c = curve.mean(axis=0)
            length = float(np.linalg.norm(np.roll(curve, -1, axis=0) - curve, axis=1).sum())
            rows.append(("DoubleCurve", i, c[0], c[1], c[2], curve.shape[0], length))
        for i, p in enumerate(self.triple_points):
            rows.append(("TriplePoint", i, p[0], p[1], p[2], 3, 0.0))
        for i, q in enumerate(self.quadruple_clusters):
            rows.append(("QuadrupleCluster", i, q.center[0], q.center[1], q.center[2], q.n_sheets, q.radius))
        return pd.DataFrame(rows, columns=["FEATURE", "INDEX", "X", "Y", "Z", "SIZE", "EXTENT"])


def _adjacent(faces: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    """Pairs sharing at least one vertex."""
    f = faces[pairs[:, 0]]
    g = faces[pairs[:, 1]]
    return np.any(f[:, :, None] == g[:, None, :], axis=(1, 2))


def candidate_pairs(surface: Surface, tolerances: IntersectionTolerances, use_bvh: bool = True) -> Tuple[np.ndarray, Dict[str, int]]:
    """
    Vertex-disjoint face pairs with overlapping (padded) boxes.

    ``use_bvh=False`` enumerates all pairs instead of traversing the tree.
    """
    pad = tolerances.chain_tolerance * surface.bounding_box_diagonal
    boxes = face_boxes(surface.vertices, surface.faces, pad)
    if use_bvh:
        pairs = FaceBVH(boxes, tolerances.leaf_size).self_pairs()
    else:
        pairs = brute_force_pairs(boxes)
    adjacent = _adjacent(surface.faces, pairs) if pairs.size else np.zeros(0, dtype=bool)
    stats = {"box_pairs": int(pairs.shape[0]), "adjacent_pairs": int(adjacent.sum())}
    return pairs[~adjacent], stats


def _chain(
    segments: np.ndarray,
    keys: np.ndarray,
    tolerance: float,
    diagnostics: Dict[str, Any],
) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Join segments sharing endpoint keys into closed polylines."""
    graph = nx.MultiGraph()
    positions: Dict[tuple, np.ndarray] = {}
    for s in range(segments.shape[0]):
        a = tuple(int(v) for v in keys[s, 0])
        b = tuple(int(v) for v in keys[s, 1])
        positions.setdefault(a, segments[s, 0])
        positions.setdefault(b, segments[s, 1])
        graph.add_edge(a, b, segment=s)

    open_ends = sorted(n for n, d in graph.degree() if d == 1)
    matched = 0
    if open_ends:
        points = np.array([positions[n] for n in open_ends])
        tree = cKDTree(points)
        used = set()
        for i, j in sorted(tree.query_pairs(tolerance)):
            if i in used or j in used:
                continue
            graph = nx.contracted_nodes(graph, open_ends[i], open_ends[j], self_loops=True)
            used.update((i, j))
            matched += 1
        open_ends = sorted(n for n, d in graph.degree() if d == 1)
    diagnostics["tolerance_matches"] = matched

    bad = [n for n, d in graph.degree() if d != 2]
    if bad:
        diagnostics["open_keys"] = [list(n) for n in bad]
        diagnostics["open_positions"] = [positions[n].tolist() for n in bad]
        raise ToleranceBreakdown(
            f"{len(bad)} double-curve endpoints could not be closed", dict(diagnostics)
        )

    curves: List[np.ndarray] = []
    curve_segments: List[np.ndarray] = []
    for component in sorted(nx.connected_components(graph), key=min):
        start = min(component)
        order: List[int] = []
        points: List[np.ndarray] = []
        seen = set()
        node = start
        while True:
            options = sorted(
                (data["segment"], other)
                for _, other, data in graph.edges(node, data=True)
                if data["segment"] not in seen
            )
            if not options:
                break
            s, nxt = options[0]
            seen.add(s)
            order.append(s)
            points.append(positions[node])
            node = nxt
        curves.append(np.array(points))
        curve_segments.append(np.array(order, dtype=np.int64))
    return curves, curve_segments


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0.0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def _triple_points(
    surface: Surface,
    face_pairs: np.ndarray,
    segments: np.ndarray,
    tolerance: float,
) -> Tuple[np.ndarray, List[Tuple[int, int, int]]]:
    """Points where three pairwise intersecting faces meet."""
    index = {(int(f), int(g)): s for s, (f, g) in enumerate(face_pairs)}
    graph = nx.Graph()
    graph.add_edges_from(index)
    x = surface.vertices
    faces = surface.faces

    found: List[np.ndarray] = []
    triples: List[Tuple[int, int, int]] = []
    for f, g in index:
        for h in sorted(set(graph[f]) & set(graph[g])):
            if h <= g:
                continue
            tri = (f, g, h)
            normals = []
            offsets = []
            for face in tri:
                p = x[faces[face]]
                n = np.cross(p[1] - p[0], p[2] - p[0])
                normals.append(n / np.linalg.norm(n))
                offsets.append(normals[-1] @ p[0])
            A = np.array(normals)
            if abs(np.linalg.det(A)) < 1e-12:
                continue
            point = np.linalg.solve(A, np.array(offsets))
            close = all(
                _point_segment_distance(point, *segments[index[pair]]) <= tolerance
                for pair in ((f, g), (f, h), (g, h))
            )
            if close:
                found.append(point)
                triples.append(tri)

    if not found:
        return np.zeros((0, 3)), []
    points = np.array(found)
    # the same point found through neighbouring face triples
    merge = nx.Graph()
    merge.add_nodes_from(range(points.shape[0]))
    merge.add_edges_from(cKDTree(points).query_pairs(tolerance))
    merged_points = []
    merged_triples = []
    for component in sorted(nx.connected_components(merge), key=min):
        members = sorted(component)
        merged_points.append(points[members].mean(axis=0))
        merged_triples.append(triples[members[0]])
    return np.array(merged_points), merged_triples


def _count_sheets(surface: Surface, face_ids: List[int]) -> int:
    """Connected components of faces under two-ring vertex adjacency."""
    ids = np.array(sorted(set(face_ids)), dtype=np.int64)
    incidence = surface.vertex_face_incidence.astype(np.int32)
    one_ring = (incidence.T @ incidence).tocsr()
    near = (one_ring[ids] @ one_ring)[:, ids]
    n, _ = connected_components(near > 0, directed=False)
    return int(n)


def _tightest_quadruple(points: np.ndarray) -> Tuple[float, np.ndarray, np.ndarray]:
    if points.shape[0] < 4:
        return np.inf, np.full(3, np.nan), np.zeros(0, dtype=np.int64)
    dist, idx = cKDTree(points).query(points, k=4)
    best = int(np.argmin(dist[:, 3]))
    members = np.sort(idx[best])
    center = points[members].mean(axis=0)
    radius = float(np.linalg.norm(points[members] - center, axis=1).max())
    return radius, center, members


def self_intersection(
    surface: Surface,
    tolerances: Optional[IntersectionTolerances] = None,
    use_bvh: bool = True,
) -> SelfIntersectionReport:
    """
    Double curves, triple points and quadruple clusters of a surface.

    Parameters
    ----------
    surface : TriMesh or FaceSoup
        Immersed surface; face pairs sharing a vertex are skipped.
    tolerances : IntersectionTolerances, optional
        Analysis tolerances.
    use_bvh : bool, default True
        Find candidate pairs with the BVH (``False``: exhaustive oracle).

    Returns
    -------
    SelfIntersectionReport

    Raises
    ------
    ToleranceBreakdown
        If some double curve cannot be closed.
    """
    tol = tolerances or IntersectionTolerances()
    diag = surface.bounding_box_diagonal
    chain_tol = tol.chain_tolerance * diag
    pairs, diagnostics = candidate_pairs(surface, tol, use_bvh)
    result = intersect_pairs(surface.vertices, surface.faces, pairs, tol.plane_epsilon * diag)
    diagnostics.update(
        candidate_pairs=int(pairs.shape[0]),
        coplanar_pairs=int(result.coplanar.sum()),
        inconsistent_pairs=int(result.inconsistent.sum()),
    )
    if diagnostics["coplanar_pairs"]:
        logger.warning("%d coplanar face pairs skipped", diagnostics["coplanar_pairs"])

    face_pairs = pairs[result.hit]
    segments = result.points[result.hit]
    keys = result.keys[result.hit]
    curves, curve_segments = _chain(segments, keys, chain_tol, diagnostics)
    triple_points, triple_faces = _triple_points(surface, face_pairs, segments, chain_tol)

    clusters: List[QuadrupleCluster] = []
    multiplicity = 1
    if face_pairs.shape[0]:
        multiplicity = 2
    if triple_points.shape[0]:
        multiplicity = 3
        radius = max(3.0 * chain_tol, tol.quadruple_radius_edges * surface.mean_edge_length)
        graph = nx.Graph()
        graph.add_nodes_from(range(triple_points.shape[0]))
        graph.add_edges_from(cKDTree(triple_points).query_pairs(radius))
        for component in sorted(nx.connected_components(graph), key=min):
            members = sorted(component)
            if len(members) < 2:
                continue
            sheets = _count_sheets(surface, [f for m in members for f in triple_faces[m]])
            multiplicity = max(multiplicity, sheets)
            if sheets >= 4:
                center = triple_points[members].mean(axis=0)
                extent = float(np.linalg.norm(triple_points[members] - center, axis=1).max())
                clusters.append(QuadrupleCluster(center, extent, sheets, len(members)))

    q_radius, q_center, _ = _tightest_quadruple(triple_points)
    logger.debug(
        "Self-intersection: %d segments, %d curves, %d triple points, multiplicity %d",
        face_pairs.shape[0], len(curves), triple_points.shape[0], multiplicity,
    )
    return SelfIntersectionReport(
        face_pairs=face_pairs,
        segments=segments,
        endpoint_keys=keys,
        double_curves=curves,
        curve_segments=curve_segments,
        triple_points=triple_points,
        triple_faces=triple_faces,
        quadruple_clusters=clusters,
        max_multiplicity=multiplicity,
        tightest_quadruple_radius=q_radius,
        tightest_quadruple_center=q_center,
        diagnostics=diagnostics,
    )
