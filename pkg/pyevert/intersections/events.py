# pyevert/intersections/events.py

"""
Topological events along a sequence of immersed surfaces.

Consecutive self-intersection reports are compared to localise the changes
of the double-curve set (lakes, islands, isthmus reconnections), of the
triple point count and the moments where four sheets meet. Events detected
in the same frame interval share a ``simultaneous_group`` id; no order is
implied inside a group.

Usage:
	events = classify_events(frames)
	events_to_frame(events).to_csv("events.csv", index=False)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from ..errors import FramesTooFarApart
from .report import IntersectionTolerances, SelfIntersectionReport, Surface, self_intersection

logger = logging.getLogger(__name__)


class EventKind(str, Enum):
    LAKE = "Lake"
    ISLAND = "Island"
    ISTHMUS = "Isthmus"
    TRIPLE_PAIR_CREATE = "TriplePairCreate"
    TRIPLE_PAIR_ANNIHILATE = "TriplePairAnnihilate"
    QUADRUPLE = "Quadruple"


# Kind seen when the sequence is played backwards
MIRROR: Dict[EventKind, EventKind] = {
    EventKind.LAKE: EventKind.ISLAND,
    EventKind.ISLAND: EventKind.LAKE,
    EventKind.ISTHMUS: EventKind.ISTHMUS,
    EventKind.TRIPLE_PAIR_CREATE: EventKind.TRIPLE_PAIR_ANNIHILATE,
    EventKind.TRIPLE_PAIR_ANNIHILATE: EventKind.TRIPLE_PAIR_CREATE,
    EventKind.QUADRUPLE: EventKind.QUADRUPLE,
}

_KIND_ORDER = {kind: i for i, kind in enumerate(EventKind)}


@dataclass(frozen=True)
class EventRecord:
    """
    One topological event.

    Attributes
    ----------
    kind : EventKind
        Event type.
    frame_interval : tuple of int
        ``(i, j)`` frames bracketing the event, ``i < j``.
    location : np.ndarray
        Approximate position.
    simultaneous_group : int, optional
        Shared by all events of an interval holding more than one event.
    """

    kind: EventKind
    frame_interval: Tuple[int, int]
    location: np.ndarray
    simultaneous_group: Optional[int] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            "KIND": self.kind.value,
            "FRAME_START": int(self.frame_interval[0]),
            "FRAME_END": int(self.frame_interval[1]),
            "X": float(self.location[0]),
            "Y": float(self.location[1]),
            "Z": float(self.location[2]),
            "GROUP": -1 if self.simultaneous_group is None else int(self.simultaneous_group),
        }


def mirror_kinds(events: Sequence[EventRecord]) -> List[EventKind]:
    """Kinds of ``events`` as seen in reversed time, in reversed order."""
    return [MIRROR[e.kind] for e in reversed(events)]


def events_to_frame(events: Sequence[EventRecord]) -> pd.DataFrame:
    columns = ["KIND", "FRAME_START", "FRAME_END", "X", "Y", "Z", "GROUP"]
    return pd.DataFrame([e.to_dict() for e in events], columns=columns)


def events_from_frame(df: pd.DataFrame) -> List[EventRecord]:
    events = []
    for row in df.itertuples(index=False):
        group = None if int(row.GROUP) < 0 else int(row.GROUP)
        events.append(
            EventRecord(
                EventKind(row.KIND),
                (int(row.FRAME_START), int(row.FRAME_END)),
                np.array([row.X, row.Y, row.Z], dtype=np.float64),
                group,
            )
        )
    return events


def frame_displacement(a: Surface, b: Surface) -> float:
    """Symmetric nearest-vertex distance between two frames (labels ignored)."""
    forward, _ = cKDTree(b.vertices).query(a.vertices)
    backward, _ = cKDTree(a.vertices).query(b.vertices)
    return float(max(forward.max(), backward.max()))


# ---------------------------------------------------------------------------
# Double curves
# ---------------------------------------------------------------------------

def _curve_distance(a: np.ndarray, b: np.ndarray) -> float:
    d, _ = cKDTree(b).query(a)
    return float(d.min())


def _reconnected(
    ra: SelfIntersectionReport,
    rb: SelfIntersectionReport,
    ia: List[int],
    ib: List[int],
) -> bool:
    """
    Whether shared face pairs tie a curve of one frame to two curves of the other.

    Only meaningful when both frames have the same faces. Curves sharing no
    face pair with the other frame count as unchanged.
    """
    owner: Dict[Tuple[int, int], int] = {}
    for j in ib:
        for s in rb.curve_segments[j]:
            owner[(int(rb.face_pairs[s, 0]), int(rb.face_pairs[s, 1]))] = j
    links = set()
    for i in ia:
        for s in ra.curve_segments[i]:
            j = owner.get((int(ra.face_pairs[s, 0]), int(ra.face_pairs[s, 1])))
            if j is not None:
                links.add((i, j))
    left = [i for i, _ in links]
    right = [j for _, j in links]
    return len(set(left)) != len(left) or len(set(right)) != len(right)


def _fragments(source: List[np.ndarray], target: List[np.ndarray], radius: float) -> np.ndarray:
    """Points of ``source`` curves farther than ``radius`` from every ``target`` curve."""
    if not source:
        return np.zeros((0, 3))
    points = np.vstack(source)
    if not target:
        return points
    d, _ = cKDTree(np.vstack(target)).query(points)
    return points[d > radius]


def _clusters(points: np.ndarray, radius: float) -> List[np.ndarray]:
    if points.shape[0] == 0:
        return []
    graph = nx.Graph()
    graph.add_nodes_from(range(points.shape[0]))
    graph.add_edges_from(cKDTree(points).query_pairs(radius))
    return [points[sorted(c)] for c in sorted(nx.connected_components(graph), key=min)]


def _curve_events(
    ra: SelfIntersectionReport,
    rb: SelfIntersectionReport,
    interval: Tuple[int, int],
    radius: float,
    same_faces: bool = False,
) -> List[EventRecord]:
    graph = nx.Graph()
    graph.add_nodes_from(("a", i) for i in range(ra.n_double_curves))
    graph.add_nodes_from(("b", j) for j in range(rb.n_double_curves))
    for i, ca in enumerate(ra.double_curves):
        for j, cb in enumerate(rb.double_curves):
            if _curve_distance(ca, cb) <= radius:
                graph.add_edge(("a", i), ("b", j))

    events: List[EventRecord] = []
    for component in sorted(nx.connected_components(graph), key=min):
        ia = sorted(i for side, i in component if side == "a")
        ib = sorted(j for side, j in component if side == "b")
        curves_a = [ra.double_curves[i] for i in ia]
        curves_b = [rb.double_curves[j] for j in ib]
        if not ia:
            events.extend(EventRecord(EventKind.LAKE, interval, c.mean(axis=0)) for c in curves_b)
            continue
        if not ib:
            events.extend(EventRecord(EventKind.ISLAND, interval, c.mean(axis=0)) for c in curves_a)
            continue

        # Triple points moving along unchanged curves are left to _triple_events
        if len(ia) == len(ib) and not (same_faces and _reconnected(ra, rb, ia, ib)):
            continue
        pieces = _clusters(
            np.vstack([_fragments(curves_a, curves_b, radius), _fragments(curves_b, curves_a, radius)]),
            radius,
        )
        pieces.sort(key=len, reverse=True)
        count = max(abs(len(ia) - len(ib)), 1)
        centre = np.vstack(curves_a + curves_b).mean(axis=0)
        for k in range(count):
            location = pieces[k].mean(axis=0) if k < len(pieces) else centre
            events.append(EventRecord(EventKind.ISTHMUS, interval, location))
    return events


# ---------------------------------------------------------------------------
# Triple points
# ---------------------------------------------------------------------------

def _triple_events(
    ra: SelfIntersectionReport,
    rb: SelfIntersectionReport,
    interval: Tuple[int, int],
    radius: float,
) -> List[EventRecord]:
    delta = rb.n_triple_points - ra.n_triple_points
    if delta == 0:
        return []
    kind = EventKind.TRIPLE_PAIR_CREATE if delta > 0 else EventKind.TRIPLE_PAIR_ANNIHILATE
    more, fewer = (rb, ra) if delta > 0 else (ra, rb)
    points = more.triple_points
    if fewer.n_triple_points:
        d, _ = cKDTree(fewer.triple_points).query(points)
        unmatched = points[d > radius]
    else:
        unmatched = points

    n_events = math.ceil(abs(delta) / 2)
    locations: List[np.ndarray] = []
    remaining = list(range(unmatched.shape[0]))
    while remaining and len(locations) < n_events:
        first = remaining.pop(0)
        if remaining:
            d = np.linalg.norm(unmatched[remaining] - unmatched[first], axis=1)
            partner = remaining.pop(int(np.argmin(d)))
            locations.append(0.5 * (unmatched[first] + unmatched[partner]))
        else:
            locations.append(unmatched[first].copy())
    while len(locations) < n_events:
        locations.append(points.mean(axis=0))
    return [EventRecord(kind, interval, loc) for loc in locations]


# ---------------------------------------------------------------------------
# Quadruple points
# ---------------------------------------------------------------------------

def _quadruple_events(reports: Sequence[SelfIntersectionReport]) -> List[EventRecord]:
    """Local minima (or plateaus) of the tightest four-triple-point radius."""
    radius = np.array([
        r.tightest_quadruple_radius if r.max_multiplicity >= 4 else np.inf for r in reports
    ])
    n = radius.shape[0]
    events: List[EventRecord] = []
    i = 0
    while i < n:
        if not np.isfinite(radius[i]):
            i += 1
            continue
        j = i
        while j + 1 < n and np.isclose(radius[j + 1], radius[i], rtol=1e-9, atol=0.0):
            j += 1
        left = radius[i - 1] if i > 0 else np.inf
        right = radius[j + 1] if j + 1 < n else np.inf
        if radius[i] < left and radius[i] < right:
            if j > i:
                interval = (i, j)
            elif left <= right and i > 0:
                interval = (i - 1, i)
            elif j + 1 < n:
                interval = (i, i + 1)
            else:
                interval = (i - 1, i)
            centres = [reports[k].tightest_quadruple_center for k in range(i, j + 1)]
            events.append(EventRecord(EventKind.QUADRUPLE, interval, np.mean(centres, axis=0)))
        i = j + 1
    return events


def _assign_groups(events: List[EventRecord]) -> List[EventRecord]:
    events = sorted(
        events,
        key=lambda e: (e.frame_interval, _KIND_ORDER[e.kind], tuple(np.round(e.location, 12))),
    )
    counts: Dict[Tuple[int, int], int] = {}
    for e in events:
        counts[e.frame_interval] = counts.get(e.frame_interval, 0) + 1
    ids: Dict[Tuple[int, int], int] = {}
    grouped = []
    for e in events:
        group = None
        if counts[e.frame_interval] > 1:
            group = ids.setdefault(e.frame_interval, len(ids))
        grouped.append(EventRecord(e.kind, e.frame_interval, e.location, group))
    return grouped


def check_frame_spacing(frames: Sequence[Surface], tolerances: IntersectionTolerances) -> np.ndarray:
    """
    Displacement between consecutive frames.

    Raises
    ------
    FramesTooFarApart
        If a displacement exceeds ``max_frame_displacement_edges`` mean edge
        lengths of the earlier frame.
    """
    moves = np.zeros(max(len(frames) - 1, 0))
    for k in range(len(frames) - 1):
        moves[k] = frame_displacement(frames[k], frames[k + 1])
        limit = tolerances.max_frame_displacement_edges * frames[k].mean_edge_length
        if moves[k] > limit:
            raise FramesTooFarApart(
                f"frames {k} and {k + 1} are {moves[k]:.3g} apart (limit {limit:.3g})"
            )
    return moves


def classify_events(
    frames: Sequence[Surface],
    tolerances: Optional[IntersectionTolerances] = None,
    reports: Optional[Sequence[SelfIntersectionReport]] = None,
) -> List[EventRecord]:
    """
    Classify the topological events of a frame sequence.

    Parameters
    ----------
    frames : sequence of TriMesh or FaceSoup
        At least two time-ordered frames.
    tolerances : IntersectionTolerances, optional
        Matching radii and frame spacing limit.
    reports : sequence of SelfIntersectionReport, optional
        Precomputed reports, one per frame.

    Returns
    -------
    list of EventRecord
        Sorted by frame interval.

    Raises
    ------
    FramesTooFarApart
        If consecutive frames move too far for unambiguous matching.
    """
    if len(frames) < 2:
        raise ValueError("classify_events needs at least two frames")
    tol = tolerances or IntersectionTolerances()
    check_frame_spacing(frames, tol)
    if reports is None:
        reports = [self_intersection(f, tol) for f in frames]
    if len(reports) != len(frames):
        raise ValueError(f"{len(reports)} reports for {len(frames)} frames")

    events: List[EventRecord] = []
    for k in range(len(frames) - 1):
        radius = tol.event_match_edges * frames[k].mean_edge_length
        interval = (k, k + 1)
        same_faces = np.array_equal(frames[k].faces, frames[k + 1].faces)
        events.extend(_curve_events(reports[k], reports[k + 1], interval, radius, same_faces))
        events.extend(_triple_events(reports[k], reports[k + 1], interval, radius))
    events.extend(_quadruple_events(reports))
    events = _assign_groups(events)
    logger.info("Classified %d events over %d frames", len(events), len(frames))
    return events
