# tests/test_halfway/test_parameterizations.py

"""
Tests for the closed-form halfway surfaces and the stereographic charts.
"""

import numpy as np
import pytest

from pyevert.halfway import (
    boy_surface,
    inverse_stereographic,
    morin_ends,
    morin_surface,
    stereographic,
)
from pyevert.symmetry import rotation_matrix


def unit_vectors(n: int, seed: int = 0) -> np.ndarray:
    p = np.random.default_rng(seed).normal(size=(n, 3))
    return p / np.linalg.norm(p, axis=1)[:, None]


class TestStereographic:
    """Charts of the unit sphere."""

    def test_round_trip(self):
        p = unit_vectors(50)
        p = p[p[:, 2] > -0.9]
        assert np.allclose(inverse_stereographic(stereographic(p)), p, atol=1e-12)

    def test_north_pole_is_origin(self):
        assert stereographic(np.array([[0.0, 0.0, 1.0]]))[0] == 0.0


class TestMorinSurface:
    """Minimal sphere with four planar ends and a quarter-turn symmetry."""

    def test_ends_are_unit_vectors(self):
        ends = morin_ends()
        assert ends.shape == (4, 3)
        assert np.allclose(np.linalg.norm(ends, axis=1), 1.0, atol=1e-12)

    def test_ends_are_not_poles(self):
        ends = morin_ends()
        assert np.all(np.abs(ends[:, :2]).sum(axis=1) > 0.0)

    def test_finite_away_from_ends(self):
        x = morin_surface(unit_vectors(200, seed=1))
        assert np.all(np.isfinite(x))

    def test_charts_agree_on_the_equator(self):
        theta = np.linspace(0.0, 2.0 * np.pi, 17)[:-1] + 0.1
        equator = np.column_stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)])
        upper = morin_surface(equator)
        nudged = equator.copy()
        nudged[:, 2] = -1e-13
        nudged /= np.linalg.norm(nudged, axis=1)[:, None]
        assert np.allclose(morin_surface(nudged), upper, rtol=1e-8, atol=1e-8)

    def test_quarter_turn_symmetry(self):
        p = unit_vectors(100, seed=2)
        domain = p @ np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]).T
        image = morin_surface(domain)
        base = morin_surface(p)
        turns = [rotation_matrix([0, 0, 1], sign * np.pi / 2) for sign in (1, -1)]
        assert any(np.allclose(image, base @ r.T, rtol=1e-9, atol=1e-9) for r in turns)


class TestBoySurface:
    """Boy's surface as a map of the sphere."""

    def test_antipodal_points_agree_exactly(self):
        p = unit_vectors(500, seed=3)
        assert np.array_equal(boy_surface(p), boy_surface(-p))

    def test_three_fold_symmetry(self):
        p = unit_vectors(100, seed=4)
        cyclic = p[:, [2, 0, 1]]
        image = boy_surface(cyclic)
        base = boy_surface(p)
        turns = [rotation_matrix([0, 0, 1], sign * 2.0 * np.pi / 3) for sign in (1, -1)]
        assert any(np.allclose(image, base @ r.T, rtol=1e-9, atol=1e-9) for r in turns)

    def test_bounded(self):
        x = boy_surface(unit_vectors(300, seed=5))
        assert np.all(np.isfinite(x))
        assert np.linalg.norm(x, axis=1).max() < 10.0
