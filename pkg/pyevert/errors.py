# pyevert/errors.py

"""
Exception hierarchy for pyevert.

Every failure raised by the package derives from :class:`EversionError` so
callers (and the CLI) can separate configuration problems, numerical
failures and I/O failures without string matching.

Usage:
	from pyevert.errors import NonManifoldEdge
	raise NonManifoldEdge("edge (3, 7) has 3 incident faces")
"""

from typing import Any, Dict, Optional


class EversionError(Exception):
	"""Base class for all pyevert errors."""
	pass


# ---------------------------------------------------------------------------
# Mesh validity
# ---------------------------------------------------------------------------

class MeshError(EversionError, ValueError):
	"""Raised when a mesh violates a combinatorial or geometric invariant."""
	pass


class NonManifoldEdge(MeshError):
	"""An edge with a number of incident faces other than two."""
	pass


class NotOrientable(MeshError):
	"""Face orientations cannot be made globally consistent."""
	pass


class OpenBoundary(MeshError):
	"""The mesh has boundary edges."""
	pass


class LevelTooLarge(MeshError):
	"""Icosphere subdivision level above the resource guard."""
	pass


class DegenerateFace(MeshError):
	"""A face area below the degeneracy threshold (cotangent blowup)."""
	pass


class DegenerateResult(MeshError):
	"""Refinement produced faces below the degeneracy threshold."""
	pass


# ---------------------------------------------------------------------------
# Symmetry
# ---------------------------------------------------------------------------

class SymmetryError(EversionError, ValueError):
	"""Base class for symmetry group and orbit map errors."""
	pass


class BadOrder(SymmetryError):
	"""Group order incompatible with the requested generator."""
	pass


class OrbitMismatch(SymmetryError):
	"""Orbit map inconsistent with the mesh or the group action."""
	pass


class FixedPointInconsistency(SymmetryError):
	"""A vertex fixed by a group element receives disagreeing positions."""
	pass


class SymmetryLost(SymmetryError):
	"""Symmetry deviation exceeded its bound during a symmetric flow."""
	pass


# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------

class NumericalError(EversionError):
	"""Base class for failures of iterative or geometric numerics."""
	pass


class NotConverged(NumericalError):
	"""An iterative solver exhausted its budget."""
	pass


class NotCritical(NumericalError):
	"""Second-order analysis requested away from a critical point."""
	pass


class LineSearchFailure(NumericalError):
	"""Backtracking step size underflowed without sufficient decrease."""
	pass


class NotASaddle(NumericalError):
	"""The lowest constrained Hessian eigenvalue is not negative."""
	pass


class EnergyIncreased(NumericalError):
	"""A displacement that should lower the energy raised it."""
	pass


class ToleranceBreakdown(NumericalError):
	"""Double-curve chaining left open ends.

	Attributes
	----------
	diagnostics : dict
		Positions and keys of the unmatched segment endpoints.
	"""

	def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
		super().__init__(message)
		self.diagnostics = diagnostics or {}


class CoplanarCase(NumericalError):
	"""Two triangles lie in a common plane."""
	pass


class FramesTooFarApart(NumericalError):
	"""Consecutive frames move too far for unambiguous event matching."""
	pass


# ---------------------------------------------------------------------------
# Halfway models
# ---------------------------------------------------------------------------

class HalfwayError(EversionError, ValueError):
	"""Base class for halfway model construction errors."""
	pass


class ResolutionTooLow(HalfwayError):
	"""Requested sampling resolution below the supported minimum."""
	pass


class SeedMeshMissing(HalfwayError):
	"""A seed mesh or its orbit sidecar is not on disk."""
	pass


class CenterOnSurface(HalfwayError):
	"""Inversion center lies on (or too close to) the surface."""
	pass


# ---------------------------------------------------------------------------
# Configuration and I/O
# ---------------------------------------------------------------------------

class ConfigError(EversionError, ValueError):
	"""Raised when a configuration file or value does not conform to the schema."""
	pass


class IoFailure(EversionError, OSError):
	"""Raised when reading or writing an artefact fails."""
	pass


class ParseFailure(IoFailure):
	"""Malformed mesh file.

	Attributes
	----------
	line : int
		1-based line number of the offending record.
	column : int
		1-based column of the offending token.
	"""

	def __init__(self, message: str, line: int, column: int, path: Optional[str] = None):
		location = f"{path}:" if path else ""
		super().__init__(f"{location}{line}:{column}: {message}")
		self.line = line
		self.column = column
		self.path = path


class PipelineError(EversionError):
	"""Eversion pipeline halted.

	Attributes
	----------
	stage : str
		Pipeline stage that failed.
	bundle : dict
		Diagnostic bundle: ``last_frame`` (TriMesh or None) and
		``energy_trace`` (list of floats).
	cause : EversionError
		The underlying error.
	"""

	def __init__(self, stage: str, cause: Exception, bundle: Optional[Dict[str, Any]] = None):
		super().__init__(f"{stage} failed: {cause}")
		self.stage = stage
		self.cause = cause
		self.bundle = bundle or {}
