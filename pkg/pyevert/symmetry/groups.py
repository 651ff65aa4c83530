# pyevert/symmetry/groups.py

"""
Finite cyclic symmetry groups of rigid motions.

A group is generated by a rotation through ``2 pi / order`` about an axis
through the origin, optionally composed with the reflection in the plane
normal to the axis (a rotoreflection). ``side_exchanging`` records whether
the generator swaps the two sides of the surface it acts on; the pipeline
uses it to build the second half of an eversion.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from ..errors import BadOrder

logger = logging.getLogger(__name__)

_SNAP = 1e-15


def _snap(matrix: np.ndarray) -> np.ndarray:
    """Round entries within 1e-15 of -1, 0 or 1 to those values."""
    out = matrix.copy()
    for target in (-1.0, 0.0, 1.0):
        out[np.abs(out - target) < _SNAP] = target
    return out


def rotation_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit ``axis``."""
    a = np.asarray(axis, dtype=np.float64)
    a = a / np.linalg.norm(a)
    k = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return _snap(np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k))


def reflection_matrix(normal: np.ndarray) -> np.ndarray:
    """Reflection in the plane through the origin with the given normal."""
    a = np.asarray(normal, dtype=np.float64)
    a = a / np.linalg.norm(a)
    return _snap(np.eye(3) - 2.0 * np.outer(a, a))


@dataclass(frozen=True, eq=False)
class SymmetryGroup:
    """
    Cyclic group generated by one orthogonal matrix.

    Attributes
    ----------
    order : int
        Group order (generator^order = identity).
    axis : np.ndarray
        Unit rotation axis.
    generator : np.ndarray
        (3, 3) orthogonal generator.
    rotoreflect : bool
        Whether the generator includes the reflection normal to the axis.
    side_exchanging : bool
        Whether odd powers of the generator swap the surface's sides.
    """

    order: int
    axis: np.ndarray
    generator: np.ndarray
    rotoreflect: bool = False
    side_exchanging: bool = False

    def element(self, j: int) -> np.ndarray:
        """Matrix of ``generator ** j`` (``j`` taken modulo the order)."""
        return np.linalg.matrix_power(self.generator, int(j) % self.order)

    def elements(self) -> list[np.ndarray]:
        out = [np.eye(3)]
        for _ in range(1, self.order):
            out.append(out[-1] @ self.generator)
        return out

    def is_side_exchanging(self, j: int) -> bool:
        return self.side_exchanging and (int(j) % 2 == 1)

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.generator))

    def subgroup(self, step: int) -> "SymmetryGroup":
        """
        Subgroup generated by ``generator ** step``.

        Raises
        ------
        BadOrder
            If ``step`` does not divide the order.
        """
        if step < 1 or self.order % step != 0:
            raise BadOrder(f"step {step} does not divide group order {self.order}")
        odd = step % 2 == 1
        return SymmetryGroup(
            order=self.order // step,
            axis=self.axis,
            generator=_snap(self.element(step)),
            rotoreflect=self.rotoreflect and odd,
            side_exchanging=self.side_exchanging and odd,
        )

    def identity_error(self) -> float:
        """Max-entry deviation of ``generator ** order`` from the identity."""
        return float(np.abs(np.linalg.matrix_power(self.generator, self.order) - np.eye(3)).max())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "order": int(self.order),
            "axis": [float(c) for c in self.axis],
            "rotoreflect": bool(self.rotoreflect),
            "side_exchanging": bool(self.side_exchanging),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SymmetryGroup":
        return make_group(
            int(data["order"]),
            np.asarray(data["axis"], dtype=np.float64),
            rotoreflect=bool(data.get("rotoreflect", False)),
            side_exchanging=data.get("side_exchanging"),
        )

    def __repr__(self) -> str:
        kind = "rotoreflection" if self.rotoreflect else "rotation"
        return (
            f"SymmetryGroup(order={self.order}, {kind}, axis={self.axis.tolist()}, "
            f"side_exchanging={self.side_exchanging})"
        )


def make_group(
    order: int,
    axis,
    rotoreflect: bool = False,
    side_exchanging: bool | None = None,
) -> SymmetryGroup:
    """
    Build a cyclic group of rotations or rotoreflections.

    Parameters
    ----------
    order : int
        Group order, at least 1.
    axis : array-like
        Nonzero axis vector (normalised here).
    rotoreflect : bool, default False
        Compose the rotation with the reflection normal to the axis.
    side_exchanging : bool, optional
        Defaults to ``rotoreflect``. Set it for pure rotations that reverse
        the orientation of the surface they act on.

    Returns
    -------
    SymmetryGroup

    Raises
    ------
    BadOrder
        Order below 1, rotoreflection with odd order, or side exchange with
        odd order.
    ValueError
        If ``axis`` is zero or not a 3-vector.

    Examples
    --------
    >>> g = make_group(4, [0, 0, 1], rotoreflect=True)
    >>> g.generator.tolist()
    [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]
    """
    if order < 1:
        raise BadOrder(f"group order must be >= 1, got {order}")
    axis = np.asarray(axis, dtype=np.float64).reshape(-1)
    if axis.shape != (3,) or not np.linalg.norm(axis) > 0:
        raise ValueError(f"axis must be a nonzero 3-vector, got {axis}")
    axis = axis / np.linalg.norm(axis)
    if rotoreflect and order % 2 == 1:
        raise BadOrder(f"rotoreflection needs an even order, got {order}")
    if side_exchanging is None:
        side_exchanging = rotoreflect
    if side_exchanging and order % 2 == 1:
        raise BadOrder(f"side-exchanging group needs an even order, got {order}")

    generator = rotation_matrix(axis, 2.0 * math.pi / order)
    if rotoreflect:
        generator = _snap(reflection_matrix(axis) @ generator)
    group = SymmetryGroup(
        order=int(order),
        axis=axis,
        generator=generator,
        rotoreflect=bool(rotoreflect),
        side_exchanging=bool(side_exchanging),
    )
    logger.debug("Built %r (identity error %.2e)", group, group.identity_error())
    return group
