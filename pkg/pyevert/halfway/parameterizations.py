# pyevert/halfway/parameterizations.py

"""
Closed-form surfaces sampled on the parameter sphere.

Both parameterisations take unit vectors ``p`` (rows of an (N, 3) array)
and return (N, 3) positions. Points are mapped to the complex plane by
stereographic projection from the south pole on the upper hemisphere and
from the north pole (conjugated) on the lower one, so every evaluation stays
inside a unit disk.

``morin_surface``
	A minimal sphere with four planar ends, built from Weierstrass data
	``g = z (z^2 + sqrt3) / (1 - sqrt3 z^2)`` and
	``f = i (1 - sqrt3 z^2)^2 / (z^4 - 2 sqrt3 z^2 - 1)^2``. The integrals
	close up to ``X = Re([i (z^3 - z), z^3 + z, i (sqrt3 z^2 + 1)] / E)``
	with ``E = z^4 - 2 sqrt3 z^2 - 1``. The ends (zeros of ``E``) sit at
	parameter directions with irrational coordinates, so no octasphere
	vertex is ever an end.

``boy_surface``
	Bryant-Kusner parameterisation of Boy's surface,
	``X = g / |g|^2`` with ``D = w^6 + sqrt5 w^3 - 1``,
	``g1 = -3/2 Im(w (1 - w^4) / D)``, ``g2 = -3/2 Re(w (1 + w^4) / D)``,
	``g3 = Im((1 + w^6) / D) - 1/2``, evaluated so that ``X(p) = X(-p)``
	holds bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

from ..symmetry.groups import rotation_matrix

SQRT3 = math.sqrt(3.0)
SQRT5 = math.sqrt(5.0)

# Rotation taking the octasphere's three-fold axis (1, 1, 1) onto +z
_DIAGONAL = np.ones(3) / SQRT3
BOY_FRAME = rotation_matrix(np.cross(_DIAGONAL, [0.0, 0.0, 1.0]), math.acos(1.0 / SQRT3))


def stereographic(points: np.ndarray) -> np.ndarray:
	"""``z = (x + i y) / (1 + z)``; finite away from the south pole."""
	p = np.asarray(points, dtype=np.float64)
	return (p[:, 0] + 1j * p[:, 1]) / (1.0 + p[:, 2])


def inverse_stereographic(z: np.ndarray) -> np.ndarray:
	"""Unit vectors whose :func:`stereographic` coordinate is ``z``."""
	z = np.asarray(z, dtype=np.complex128)
	r2 = np.abs(z) ** 2
	return np.column_stack([2.0 * z.real, 2.0 * z.imag, 1.0 - r2]) / (1.0 + r2)[:, None]


# ---------------------------------------------------------------------------
# Morin minimal surface
# ---------------------------------------------------------------------------

def _morin_upper(z: np.ndarray) -> np.ndarray:
	z2 = z * z
	e = z2 * z2 - 2.0 * SQRT3 * z2 - 1.0
	return np.column_stack(
		[
			-((z2 * z - z) / e).imag,
			((z2 * z + z) / e).real,
			-((SQRT3 * z2 + 1.0) / e).imag,
		]
	)


def _morin_lower(u: np.ndarray) -> np.ndarray:
	# same map in the chart u = 1 / z, numerator and denominator times u^4
	u2 = u * u
	e = 1.0 - 2.0 * SQRT3 * u2 - u2 * u2
	return np.column_stack(
		[
			-((u - u2 * u) / e).imag,
			((u + u2 * u) / e).real,
			-((SQRT3 * u2 + u2 * u2) / e).imag,
		]
	)


def morin_surface(points: np.ndarray) -> np.ndarray:
	"""
	Morin minimal surface with four planar ends.

	Parameters
	----------
	points : np.ndarray
		(N, 3) unit vectors, none of them an end (see :func:`morin_ends`).

	Returns
	-------
	np.ndarray
		(N, 3) positions. The domain map ``(x, y, z) -> (-y, x, -z)``
		(``z -> i / conj(z)`` in the chart) corresponds to a quarter turn of
		the image about the z axis and reverses the surface orientation.
	"""
	p = np.asarray(points, dtype=np.float64)
	out = np.empty_like(p)
	upper = p[:, 2] >= 0.0
	out[upper] = _morin_upper(stereographic(p[upper]))
	lower = ~upper
	q = p[lower]
	out[lower] = _morin_lower((q[:, 0] - 1j * q[:, 1]) / (1.0 - q[:, 2]))
	return out


def morin_ends() -> np.ndarray:
	"""(4, 3) parameter directions of the planar ends."""
	inner = math.sqrt(2.0 - SQRT3)
	z = np.array([1j * inner, -1j * inner, 1.0 / inner, -1.0 / inner])
	return inverse_stereographic(z)


# ---------------------------------------------------------------------------
# Boy's surface
# ---------------------------------------------------------------------------

def _bryant_kusner(w: np.ndarray) -> np.ndarray:
	w2 = w * w
	w3 = w2 * w
	w4 = w2 * w2
	w6 = w3 * w3
	d = w6 + SQRT5 * w3 - 1.0
	g = np.column_stack(
		[
			-1.5 * (w * (1.0 - w4) / d).imag,
			-1.5 * (w * (1.0 + w4) / d).real,
			((1.0 + w6) / d).imag - 0.5,
		]
	)
	return g / np.sum(g * g, axis=1)[:, None]


def boy_surface(points: np.ndarray, frame: np.ndarray = BOY_FRAME) -> np.ndarray:
	"""
	Boy's surface as a map of the sphere with ``X(p) = X(-p)`` exactly.

	Parameters
	----------
	points : np.ndarray
		(N, 3) unit vectors.
	frame : np.ndarray, default BOY_FRAME
		Rotation applied to the parameter points first. The default takes
		the octasphere diagonal ``(1, 1, 1)`` to the pole, so the cyclic
		coordinate permutation of the domain becomes the image's three-fold
		rotation about z.

	Returns
	-------
	np.ndarray
		(N, 3) positions.
	"""
	q = np.asarray(points, dtype=np.float64) @ np.asarray(frame, dtype=np.float64).T
	# canonical member of each antipodal pair
	flip = (q[:, 2] < 0.0) | (
		(q[:, 2] == 0.0) & ((q[:, 0] < 0.0) | ((q[:, 0] == 0.0) & (q[:, 1] < 0.0)))
	)
	q = np.where(flip[:, None], -q, q)
	return _bryant_kusner(stereographic(q))
