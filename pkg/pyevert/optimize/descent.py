# pyevert/optimize/descent.py

"""
Gradient descent on the Willmore energy.

``descent_step`` is one backtracking (Armijo) step; ``flow_until`` repeats
it with periodic mesh surgery (``subdivide`` + ``improve``), pose
normalisation after every step and frame recording by arc length.

With a :class:`~pyevert.symmetry.orbits.SymmetryConstraint`, search
directions are projected onto equivariant fields and every trial
configuration is symmetrised before the sufficient-decrease test, so the
accepted energies of a symmetric flow are still strictly decreasing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..constants import SYMMETRY_LOST_TOLERANCE
from ..energy.willmore import energy_and_gradient_of_positions
from ..errors import (
    DegenerateFace,
    DegenerateResult,
    LineSearchFailure,
    MeshError,
    OrbitMismatch,
    SymmetryLost,
)
from ..mesh.halfedge import TriMesh
from ..mesh.metrics import min_face_quality
from ..mesh.quality import improve
from ..mesh.refinement import subdivide
from ..symmetry.orbits import SymmetryConstraint
from .config import FlowConfig
from .pose import normalize_pose

logger = logging.getLogger(__name__)


class TerminationReason(str, Enum):
    CONVERGED = "Converged"
    MAX_STEPS = "MaxSteps"
    LINE_SEARCH_FAILURE = "LineSearchFailure"


@dataclass(frozen=True)
class SurgeryEvent:
    """One refine/improve attempt inside a flow."""

    step: int
    kind: str
    accepted: bool
    energy_before: float
    energy_after: float
    faces_before: int
    faces_after: int
    flips: int = 0
    reason: Optional[str] = None


@dataclass(frozen=True)
class FlowFrame:
    """A recorded configuration; ``time`` is the normalised arc length."""

    mesh: TriMesh
    step: int
    energy: float
    arc_length: float
    time: float = 0.0


@dataclass
class FlowTrace:
    """
    Record of a flow.

    Attributes
    ----------
    frames : list of FlowFrame
        Recorded configurations ordered by time (first and last included).
    energies, gradient_norms, min_qualities, arc_lengths : np.ndarray
        One entry per accepted step, starting with the initial state.
    events : list of SurgeryEvent
        Surgery log.
    terminated_by : TerminationReason
    final_mesh : TriMesh
    constraint : SymmetryConstraint, optional
        Constraint valid for ``final_mesh`` (rebuilt after remeshing).
    """

    frames: List[FlowFrame]
    energies: np.ndarray
    gradient_norms: np.ndarray
    min_qualities: np.ndarray
    arc_lengths: np.ndarray
    events: List[SurgeryEvent] = field(default_factory=list)
    terminated_by: TerminationReason = TerminationReason.MAX_STEPS
    final_mesh: Optional[TriMesh] = None
    constraint: Optional[SymmetryConstraint] = None

    @property
    def final_energy(self) -> float:
        return float(self.energies[-1])

    @property
    def total_arc_length(self) -> float:
        return float(self.arc_lengths[-1])

    @property
    def n_steps(self) -> int:
        return int(self.energies.shape[0] - 1)

    def to_frame(self) -> pd.DataFrame:
        """Per-step energy trace."""
        return pd.DataFrame(
            {
                "STEP": np.arange(self.energies.shape[0]),
                "ARC_LENGTH": self.arc_lengths,
                "ENERGY": self.energies,
                "GRADIENT_NORM": self.gradient_norms,
                "MIN_QUALITY": self.min_qualities,
            }
        )

    def events_frame(self) -> pd.DataFrame:
        columns = [
            "step", "kind", "accepted", "energy_before", "energy_after",
            "faces_before", "faces_after", "flips", "reason",
        ]
        df = pd.DataFrame([e.__dict__ for e in self.events], columns=columns)
        return df.rename(columns=str.upper)


@dataclass(frozen=True)
class _State:
    mesh: TriMesh
    energy: float
    gradient: np.ndarray


def _evaluate(mesh: TriMesh, constraint: Optional[SymmetryConstraint]) -> _State:
    e, g = energy_and_gradient_of_positions(mesh.vertices, mesh.faces)
    if constraint is not None:
        g = constraint.project(g)
    return _State(mesh, e, g)


def _prepare(mesh: TriMesh, constraint: Optional[SymmetryConstraint]) -> TriMesh:
    if constraint is not None:
        mesh = constraint.symmetrize(mesh)
    return normalize_pose(mesh)


def _line_search(
    state: _State,
    direction: np.ndarray,
    t0: float,
    config: FlowConfig,
    constraint: Optional[SymmetryConstraint],
) -> Tuple[_State, float]:
    """Backtrack from ``t0`` until sufficient decrease along ``-direction``."""
    slope = float(np.sum(state.gradient * direction))
    x = state.mesh.vertices
    t = t0
    while t >= config.min_step:
        try:
            trial = _prepare(state.mesh.with_vertices(x - t * direction), constraint)
            trial_state = _evaluate(trial, constraint)
        except DegenerateFace:
            t *= config.step_shrink
            continue
        decrease = state.energy - trial_state.energy
        if decrease > 0.0 and decrease >= config.armijo_constant * t * slope:
            return trial_state, t
        t *= config.step_shrink
    raise LineSearchFailure(
        f"no sufficient decrease for step sizes down to {config.min_step:.1e} "
        f"(energy {state.energy:.10g}, gradient norm {np.linalg.norm(state.gradient):.3e})"
    )


def descent_step(
    mesh: TriMesh,
    config: Optional[FlowConfig] = None,
    constraint: Optional[SymmetryConstraint] = None,
) -> Tuple[TriMesh, float]:
    """
    One backtracking gradient step ``x' = x - t grad E``.

    Parameters
    ----------
    mesh : TriMesh
        Valid mesh with finite energy.
    config : FlowConfig, optional
        Line search settings; the search starts at ``initial_step``.
    constraint : SymmetryConstraint, optional
        Project the gradient and symmetrise trial configurations.

    Returns
    -------
    (TriMesh, float)
        Pose-normalised mesh with strictly lower energy and the accepted
        step size.

    Raises
    ------
    LineSearchFailure
        If the step size underflows ``min_step`` without sufficient decrease.
    """
    config = config or FlowConfig()
    state = _evaluate(_prepare(mesh, constraint), constraint)
    new_state, t = _line_search(state, state.gradient, config.initial_step, config, constraint)
    return new_state.mesh, t


def _surgery(
    state: _State,
    step: int,
    config: FlowConfig,
    constraint: Optional[SymmetryConstraint],
    refine_threshold: float,
) -> Tuple[_State, Optional[SymmetryConstraint], SurgeryEvent]:
    """Refine long edges and improve the triangulation; keep it only if the energy allows."""
    mesh = state.mesh
    kinds = []
    candidate = mesh
    flips = 0
    try:
        if candidate.edge_lengths().max() > refine_threshold:
            candidate = subdivide(candidate, refine_threshold)
            kinds.append("refine")
        candidate, report = improve(candidate, config.quality)
        flips = report.flips
        kinds.append("improve")
        new_constraint = constraint
        if constraint is not None and (candidate is not mesh):
            new_constraint = constraint.rebuild(candidate)
        new_state = _evaluate(_prepare(candidate, new_constraint), new_constraint)
    except (OrbitMismatch, DegenerateResult, MeshError) as exc:
        event = SurgeryEvent(
            step=step, kind="+".join(kinds) or "refine", accepted=False,
            energy_before=state.energy, energy_after=math.nan,
            faces_before=mesh.n_faces, faces_after=mesh.n_faces, flips=flips, reason=str(exc),
        )
        logger.warning("Surgery at step %d discarded: %s", step, exc)
        return state, constraint, event

    kind = "+".join(kinds)
    if new_state.energy > state.energy + config.surgery_tolerance:
        reason = f"energy rose from {state.energy:.10g} to {new_state.energy:.10g}"
        logger.info("Surgery at step %d discarded: %s", step, reason)
        return state, constraint, SurgeryEvent(
            step=step, kind=kind, accepted=False, energy_before=state.energy,
            energy_after=new_state.energy, faces_before=mesh.n_faces,
            faces_after=new_state.mesh.n_faces, flips=flips, reason=reason,
        )
    if new_state.mesh.n_faces != mesh.n_faces:
        logger.info(
            "Step %d: refined %d -> %d faces, energy %.8g -> %.8g",
            step, mesh.n_faces, new_state.mesh.n_faces, state.energy, new_state.energy,
        )
    return new_state, new_constraint, SurgeryEvent(
        step=step, kind=kind, accepted=True, energy_before=state.energy,
        energy_after=new_state.energy, faces_before=mesh.n_faces,
        faces_after=new_state.mesh.n_faces, flips=flips,
    )


def flow_until(
    mesh: TriMesh,
    config: Optional[FlowConfig] = None,
    constraint: Optional[SymmetryConstraint] = None,
    initial_arc_length: float = 0.0,
    callback: Optional[Callable[[int, TriMesh, float], None]] = None,
) -> FlowTrace:
    """
    Flow downhill until convergence, the step budget or a line-search failure.

    Parameters
    ----------
    mesh : TriMesh
        Starting configuration.
    config : FlowConfig, optional
        Flow settings.
    constraint : SymmetryConstraint, optional
        Keep the flow inside a symmetry class.
    initial_arc_length : float, default 0.0
        Arc length already travelled before ``mesh`` (e.g. a pushoff).
    callback : callable, optional
        Called as ``callback(step, mesh, energy)`` after every accepted step.

    Returns
    -------
    FlowTrace
        Energies are non-increasing; frames carry times in [0, 1] by
        normalised arc length.

    Raises
    ------
    SymmetryLost
        If the symmetry deviation exceeds 1e-8.
    """
    config = config or FlowConfig()
    state = _evaluate(_prepare(mesh, constraint), constraint)
    refine_threshold = config.refine_edge_factor * state.mesh.mean_edge_length

    arc = float(initial_arc_length)
    energies = [state.energy]
    grad_norms = [float(np.linalg.norm(state.gradient))]
    qualities = [min_face_quality(state.mesh)]
    arcs = [arc]
    frames = [FlowFrame(state.mesh, 0, state.energy, arc)]
    events: List[SurgeryEvent] = []
    reason = TerminationReason.MAX_STEPS

    last_step = config.initial_step
    prev_gradient: Optional[np.ndarray] = None
    prev_direction: Optional[np.ndarray] = None
    window_energy = state.energy
    step = 0

    logger.info(
        "Flow start: %d faces, energy %.8g, gradient norm %.3e",
        state.mesh.n_faces, state.energy, grad_norms[0],
    )
    while step < config.max_steps:
        g = state.gradient
        g_norm = float(np.linalg.norm(g))
        if g_norm <= config.gradient_tolerance:
            reason = TerminationReason.CONVERGED
            break

        direction = g
        if config.method == "cg" and prev_gradient is not None and prev_gradient.shape == g.shape:
            beta = max(0.0, float(np.sum(g * (g - prev_gradient)) / np.sum(prev_gradient ** 2)))
            candidate = g + beta * prev_direction
            if np.sum(candidate * g) > 0.0:
                direction = candidate

        t0 = min(config.initial_step, config.step_growth * last_step)
        try:
            new_state, t = _line_search(state, direction, t0, config, constraint)
        except LineSearchFailure as exc:
            if direction is not g:
                # restart conjugate gradients along the plain gradient
                prev_gradient = prev_direction = None
                try:
                    new_state, t = _line_search(state, g, t0, config, constraint)
                    direction = g
                except LineSearchFailure as exc2:
                    exc = exc2
                    new_state = None
            else:
                new_state = None
            if new_state is None:
                if g_norm < 10.0 * config.gradient_tolerance:
                    reason = TerminationReason.CONVERGED
                else:
                    reason = TerminationReason.LINE_SEARCH_FAILURE
                logger.info("Flow stopped at step %d: %s", step, exc)
                break

        step += 1
        arc += float(np.linalg.norm(new_state.mesh.vertices - state.mesh.vertices))
        prev_gradient, prev_direction = g, direction
        last_step = t
        state = new_state

        if constraint is not None:
            deviation = constraint.deviation(state.mesh)
            if deviation > SYMMETRY_LOST_TOLERANCE:
                raise SymmetryLost(f"symmetry deviation {deviation:.3e} at step {step}")

        energies.append(state.energy)
        grad_norms.append(float(np.linalg.norm(state.gradient)))
        qualities.append(min_face_quality(state.mesh))
        arcs.append(arc)
        if step % config.frame_every == 0:
            frames.append(FlowFrame(state.mesh, step, state.energy, arc))
        if callback is not None:
            callback(step, state.mesh, state.energy)
        logger.debug("step %d: t=%.3e energy=%.10g |g|=%.3e", step, t, state.energy, grad_norms[-1])

        if step % config.improve_every == 0:
            relative = (window_energy - state.energy) / max(abs(window_energy), 1e-300)
            if relative < config.target_energy_window:
                reason = TerminationReason.CONVERGED
                logger.info("Energy plateau at step %d (relative decrease %.3e)", step, relative)
                break
            state, constraint, event = _surgery(state, step, config, constraint, refine_threshold)
            events.append(event)
            if event.accepted:
                prev_gradient = prev_direction = None
                energies[-1] = state.energy
                grad_norms[-1] = float(np.linalg.norm(state.gradient))
                qualities[-1] = min_face_quality(state.mesh)
                if frames[-1].step == step:
                    frames[-1] = FlowFrame(state.mesh, step, state.energy, arc)
            window_energy = state.energy

    if frames[-1].step != step or frames[-1].mesh is not state.mesh:
        frames.append(FlowFrame(state.mesh, step, state.energy, arc))

    start = float(initial_arc_length)
    span = arc - start
    timed = [
        FlowFrame(f.mesh, f.step, f.energy, f.arc_length,
                  (f.arc_length - start) / span if span > 0 else 0.0)
        for f in frames
    ]
    logger.info(
        "Flow finished after %d steps (%s): energy %.8g, arc length %.4g",
        step, reason.value, state.energy, arc,
    )
    return FlowTrace(
        frames=timed,
        energies=np.array(energies),
        gradient_norms=np.array(grad_norms),
        min_qualities=np.array(qualities),
        arc_lengths=np.array(arcs),
        events=events,
        terminated_by=reason,
        final_mesh=state.mesh,
        constraint=constraint,
    )
