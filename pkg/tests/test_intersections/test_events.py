# tests/test_intersections/test_events.py

"""
Tests for topological event classification along frame sequences.

Two unit spheres pulled apart lose their double curve (an island); played
backwards, the curve is born (a lake).
"""

import numpy as np
import pytest

from pyevert.errors import FramesTooFarApart
from pyevert.intersections import (
    MIRROR,
    EventKind,
    EventRecord,
    IntersectionTolerances,
    SelfIntersectionReport,
    check_frame_spacing,
    classify_events,
    events_from_frame,
    events_to_frame,
    frame_displacement,
    mirror_kinds,
    self_intersection,
)
from pyevert.intersections.events import _curve_events
from pyevert.mesh import FaceSoup
from tests.conftest import three_spheres, two_spheres

SEPARATING = [1.5, 1.6, 1.7, 1.8, 2.0, 2.1]

# Third sphere lowered through the height where a pair of triple points appears
LOWERING = np.linspace(1.89, 1.84, 11)


@pytest.fixture(scope="module")
def separating_frames():
    return [two_spheres(d) for d in SEPARATING]


@pytest.fixture(scope="module")
def lowering_frames():
    return [three_spheres(h) for h in LOWERING]


def square_report(curves, pairs_per_curve):
    """Report holding only closed curves and the face pairs of their segments."""
    face_pairs = np.array([p for pairs in pairs_per_curve for p in pairs], dtype=np.int64)
    n = face_pairs.shape[0]
    bounds = np.cumsum([0] + [len(pairs) for pairs in pairs_per_curve])
    return SelfIntersectionReport(
        face_pairs=face_pairs,
        segments=np.zeros((n, 2, 3)),
        endpoint_keys=np.zeros((n, 2, 3), dtype=np.int64),
        double_curves=[np.asarray(c, dtype=np.float64) for c in curves],
        curve_segments=[np.arange(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])],
        triple_points=np.zeros((0, 3)),
        triple_faces=[],
        quadruple_clusters=[],
        max_multiplicity=2,
    )


SQUARE = 0.1 * np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
TWO_SQUARES = [SQUARE, SQUARE + [0.15, 0.0, 0.0]]


class TestCurveEvents:
    """Births and deaths of double curves."""

    def test_island_when_spheres_separate(self, separating_frames):
        events = classify_events(separating_frames)
        assert [e.kind for e in events] == [EventKind.ISLAND]
        assert events[0].frame_interval == (3, 4)
        assert events[0].simultaneous_group is None

    def test_island_located_at_the_contact(self, separating_frames):
        event = classify_events(separating_frames)[0]
        assert event.location[0] == pytest.approx(0.9, abs=0.1)
        assert np.linalg.norm(event.location[1:]) < 0.1

    def test_lake_when_reversed(self, separating_frames):
        events = classify_events(separating_frames[::-1])
        assert [e.kind for e in events] == [EventKind.LAKE]
        assert events[0].frame_interval == (1, 2)

    def test_reversal_mirrors_kinds(self, separating_frames):
        forward = classify_events(separating_frames)
        backward = classify_events(separating_frames[::-1])
        assert mirror_kinds(forward) == [e.kind for e in backward]

    def test_static_sequence_has_no_events(self):
        frames = [two_spheres(1.0)] * 3
        assert classify_events(frames) == []

    def test_precomputed_reports(self, separating_frames):
        reports = [self_intersection(f) for f in separating_frames]
        events = classify_events(separating_frames, reports=reports)
        assert [e.kind for e in events] == [EventKind.ISLAND]


class TestTriplePairs:
    """Triple points born on curves that keep their identity."""

    def test_endpoints(self, lowering_frames):
        assert self_intersection(lowering_frames[0]).n_triple_points == 0
        last = self_intersection(lowering_frames[-1])
        assert last.n_triple_points == 2
        assert last.n_double_curves == 3

    def test_only_triple_pair_events(self, lowering_frames):
        kinds = [e.kind for e in classify_events(lowering_frames)]
        assert EventKind.ISTHMUS not in kinds
        assert set(kinds) <= {EventKind.TRIPLE_PAIR_CREATE, EventKind.TRIPLE_PAIR_ANNIHILATE}
        assert kinds.count(EventKind.TRIPLE_PAIR_CREATE) - kinds.count(EventKind.TRIPLE_PAIR_ANNIHILATE) == 1

    def test_reversed_annihilates(self, lowering_frames):
        kinds = [e.kind for e in classify_events(lowering_frames[::-1])]
        assert EventKind.ISTHMUS not in kinds
        assert kinds.count(EventKind.TRIPLE_PAIR_ANNIHILATE) - kinds.count(EventKind.TRIPLE_PAIR_CREATE) == 1


class TestReconnection:
    """Curves trading arcs without a change in their number."""

    def setup_method(self):
        self.before = square_report(TWO_SQUARES, [[(0, 1), (2, 3)], [(4, 5), (6, 7)]])

    def test_traded_arcs_are_an_isthmus(self):
        after = square_report(TWO_SQUARES, [[(0, 1), (4, 5)], [(2, 3), (6, 7)]])
        events = _curve_events(self.before, after, (0, 1), 0.5, same_faces=True)
        assert [e.kind for e in events] == [EventKind.ISTHMUS]

    def test_same_arcs_are_no_event(self):
        after = square_report(TWO_SQUARES, [[(2, 3), (0, 1)], [(6, 7), (4, 5), (8, 9)]])
        assert _curve_events(self.before, after, (0, 1), 0.5, same_faces=True) == []

    def test_face_pairs_ignored_across_remeshing(self):
        after = square_report(TWO_SQUARES, [[(0, 1), (4, 5)], [(2, 3), (6, 7)]])
        assert _curve_events(self.before, after, (0, 1), 0.5, same_faces=False) == []

    def test_split_is_an_isthmus(self):
        after = square_report(TWO_SQUARES + [SQUARE + [0.0, 0.15, 0.0]], [[(0, 1)], [(4, 5)], [(2, 3)]])
        events = _curve_events(self.before, after, (0, 1), 0.5)
        assert [e.kind for e in events] == [EventKind.ISTHMUS]


class TestFrameChecks:
    """Input checks of the classifier."""

    def test_needs_two_frames(self):
        with pytest.raises(ValueError):
            classify_events([two_spheres(1.0)])

    def test_report_count_must_match(self):
        frames = [two_spheres(1.0), two_spheres(1.05)]
        with pytest.raises(ValueError):
            classify_events(frames, reports=[self_intersection(frames[0])])

    def test_frames_too_far_apart(self, sphere):
        with pytest.raises(FramesTooFarApart):
            classify_events([sphere, sphere.translated([10.0, 0.0, 0.0])])

    def test_displacement_ignores_labels(self, sphere):
        permuted = FaceSoup(sphere.vertices[::-1], sphere.faces)
        assert frame_displacement(sphere, permuted) == 0.0

    def test_spacing(self, sphere):
        moves = check_frame_spacing([sphere, sphere.translated([0.01, 0.0, 0.0])], IntersectionTolerances())
        assert moves.shape == (1,)
        assert moves[0] == pytest.approx(0.01)


class TestEventRecords:
    """Mirror table and tabular round trip."""

    def test_mirror_is_an_involution(self):
        for kind in EventKind:
            assert MIRROR[MIRROR[kind]] is kind

    def test_table_round_trip(self):
        events = [
            EventRecord(EventKind.ISTHMUS, (2, 3), np.array([0.0, 1.0, 2.0]), 0),
            EventRecord(EventKind.TRIPLE_PAIR_CREATE, (2, 3), np.array([1.0, 0.0, 0.0]), 0),
            EventRecord(EventKind.QUADRUPLE, (5, 6), np.zeros(3)),
        ]
        df = events_to_frame(events)
        assert list(df.columns) == ["KIND", "FRAME_START", "FRAME_END", "X", "Y", "Z", "GROUP"]
        assert df["GROUP"].tolist() == [0, 0, -1]
        again = events_from_frame(df)
        assert [e.kind for e in again] == [e.kind for e in events]
        assert again[2].simultaneous_group is None
        assert np.array_equal(again[0].location, events[0].location)
