# tests/test_symmetry/test_groups.py

"""
Tests for cyclic rotation and rotoreflection groups.
"""

import math

import numpy as np
import pytest

from pyevert.errors import BadOrder
from pyevert.symmetry import SymmetryGroup, make_group, reflection_matrix, rotation_matrix


class TestMatrices:
    """Rodrigues rotations and plane reflections, snapped to exact entries."""

    def test_quarter_turn_is_exact(self):
        assert rotation_matrix([0, 0, 1], math.pi / 2).tolist() == [
            [0.0, -1.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
        ]

    def test_rotation_is_orthogonal(self):
        r = rotation_matrix([1.0, 2.0, 3.0], 0.7)
        assert np.allclose(r @ r.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(r) == pytest.approx(1.0)

    def test_reflection(self):
        m = reflection_matrix([0, 0, 2])
        assert m.tolist() == [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]


class TestMakeGroup:
    """Construction, validation and elements."""

    def test_rotoreflection_generator(self):
        g = make_group(4, [0, 0, 1], rotoreflect=True)
        assert g.generator.tolist() == [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]
        assert g.side_exchanging
        assert g.determinant == pytest.approx(-1.0)

    def test_side_exchanging_rotation(self):
        g = make_group(4, [0, 0, 1], rotoreflect=False, side_exchanging=True)
        assert g.side_exchanging
        assert g.determinant == pytest.approx(1.0)
        assert g.is_side_exchanging(1)
        assert not g.is_side_exchanging(2)

    @pytest.mark.parametrize("order", [2, 3, 5, 7, 12])
    def test_generator_power_is_identity(self, order):
        g = make_group(order, [1.0, -1.0, 0.5])
        assert g.identity_error() < 1e-12
        assert len(g.elements()) == order

    def test_axis_normalised(self):
        g = make_group(3, [0, 0, 5])
        assert g.axis.tolist() == [0.0, 0.0, 1.0]

    def test_element_wraps_modulo_order(self):
        g = make_group(4, [0, 0, 1])
        assert np.array_equal(g.element(5), g.element(1))

    def test_zero_order_rejected(self):
        with pytest.raises(BadOrder):
            make_group(0, [0, 0, 1])

    def test_odd_rotoreflection_rejected(self):
        with pytest.raises(BadOrder):
            make_group(3, [0, 0, 1], rotoreflect=True)

    def test_odd_side_exchange_rejected(self):
        with pytest.raises(BadOrder):
            make_group(5, [0, 0, 1], side_exchanging=True)

    def test_zero_axis_rejected(self):
        with pytest.raises(ValueError):
            make_group(2, [0, 0, 0])


class TestSubgroup:
    """Subgroups generated by a power of the generator."""

    def test_even_step_drops_reflection(self):
        sub = make_group(4, [0, 0, 1], rotoreflect=True).subgroup(2)
        assert sub.order == 2
        assert not sub.rotoreflect
        assert not sub.side_exchanging
        assert sub.generator.tolist() == [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]

    def test_step_must_divide_order(self):
        with pytest.raises(BadOrder):
            make_group(4, [0, 0, 1]).subgroup(3)


class TestSerialisation:
    """to_dict / from_dict keep the group."""

    def test_round_trip(self):
        g = make_group(6, [0.0, 1.0, 1.0], rotoreflect=True)
        again = SymmetryGroup.from_dict(g.to_dict())
        assert again.order == 6
        assert again.rotoreflect
        assert np.allclose(again.generator, g.generator, atol=1e-15)

    def test_repr_names_kind(self):
        assert "rotoreflection" in repr(make_group(2, [1, 0, 0], rotoreflect=True))
