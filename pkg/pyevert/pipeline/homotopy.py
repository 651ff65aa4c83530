# pyevert/pipeline/homotopy.py

"""
Eversion assembly.

The halfway model is relaxed to a symmetric critical point, pushed off its
saddle along the lowest eigenvector and flowed down to a round sphere. That
half-flow, played backwards, takes the round sphere up to the halfway model;
the same flow with the side exchange applied to every frame takes it back
down to the inside-out sphere.

Usage:
	homotopy = run_eversion(EversionConfig(kind="Morin2Fold", resolution=24))
	homotopy.energy_frame()
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml

from ..energy.hessian import EigenPair, lowest_eigenpairs
from ..errors import EversionError, IoFailure, PipelineError
from ..halfway.models import HalfwayModel, initial_model, relax_halfway
from ..intersections.events import EventRecord, classify_events, events_from_frame, events_to_frame
from ..intersections.li_yau import li_yau_table
from ..intersections.report import SelfIntersectionReport
from ..mesh.halfedge import TriMesh, build_and_validate
from ..mesh.metrics import min_face_quality, signed_volume
from ..optimize.descent import FlowTrace, flow_until
from ..optimize.saddle import pushoff_with_backoff
from ..symmetry.orbits import SymmetryConstraint
from .analysis import analyze_frames
from .config import EversionConfig

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Two lowest eigenvalues closer than this (relative) span a degenerate eigenspace
DEGENERATE_EIGEN_RTOL = 1e-3


@dataclass
class Homotopy:
    """
    A time-parameterised eversion.

    Attributes
    ----------
    frames : list of TriMesh
        Kept frames in time order.
    times : np.ndarray
        Frame times in [0, 1]; times below 0.5 belong to the first half.
    energies : np.ndarray
        Willmore energy of each frame.
    events : list of EventRecord
        Topological events, intervals indexing ``frames``.
    li_yau : pd.DataFrame
        Energy bound audit of each frame.
    reports : list of SelfIntersectionReport
        Per-frame analysis (not stored in the bundle).
    provenance : dict
        Config hash, seed, halfway energy and run statistics.
    flow_trace : pd.DataFrame, optional
        Dense per-step trace of the downhill flow.
    halfway : HalfwayModel, optional
        The relaxed halfway model.
    """

    frames: List[TriMesh]
    times: np.ndarray
    energies: np.ndarray
    events: List[EventRecord] = field(default_factory=list)
    li_yau: pd.DataFrame = field(default_factory=pd.DataFrame)
    reports: List[SelfIntersectionReport] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)
    flow_trace: Optional[pd.DataFrame] = None
    halfway: Optional[HalfwayModel] = None

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def halfway_index(self) -> int:
        """Index of the first frame of the second half."""
        return int(np.searchsorted(self.times, 0.5, side="right"))

    @property
    def halfway_energy(self) -> float:
        return float(self.provenance.get("halfway_energy", np.max(self.energies)))

    def signed_volumes(self) -> np.ndarray:
        return np.array([signed_volume(m) for m in self.frames])

    def energy_frame(self) -> pd.DataFrame:
        """Per-frame energy trace."""
        return pd.DataFrame(
            {
                "FRAME": np.arange(self.n_frames),
                "TIME": self.times,
                "ENERGY": self.energies,
                "SIGNED_VOLUME": self.signed_volumes(),
                "MIN_QUALITY": [min_face_quality(m) for m in self.frames],
                "N_FACES": [m.n_faces for m in self.frames],
            }
        )

    def events_frame(self) -> pd.DataFrame:
        return events_to_frame(self.events)

    def split_events(self) -> Tuple[List[EventRecord], List[EventRecord], List[EventRecord]]:
        """Events of the first half, of the interval crossing the halfway stage, and of the second half."""
        h = self.halfway_index
        first = [e for e in self.events if e.frame_interval[1] < h]
        middle = [e for e in self.events if e.frame_interval[0] < h <= e.frame_interval[1]]
        second = [e for e in self.events if e.frame_interval[0] >= h]
        return first, middle, second

    def is_unimodal(self, rtol: float = 1e-6) -> bool:
        """Energy rises to the halfway stage and falls after it, up to ``rtol``."""
        h = self.halfway_index
        slack = rtol * float(np.max(self.energies))
        rising = np.all(np.diff(self.energies[:h]) >= -slack)
        falling = np.all(np.diff(self.energies[h:]) <= slack)
        return bool(rising and falling)

    # ------------------------------------------------------------------
    # Bundle
    # ------------------------------------------------------------------

    def save(self, path: PathLike) -> Path:
        """Write frames, times, energies, events and provenance to ``.npz``."""
        path = Path(path)
        counts = np.array([[m.n_vertices, m.n_faces] for m in self.frames], dtype=np.int64)
        arrays = {
            "counts": counts,
            "vertices": np.vstack([m.vertices for m in self.frames]),
            "faces": np.vstack([m.faces for m in self.frames]),
            "times": np.asarray(self.times, dtype=np.float64),
            "energies": np.asarray(self.energies, dtype=np.float64),
            "events": np.array(self.events_frame().to_csv(index=False)),
            "provenance": np.array(yaml.safe_dump(self.provenance, sort_keys=True)),
        }
        if self.flow_trace is not None:
            arrays["flow_trace"] = np.array(self.flow_trace.to_csv(index=False))
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "wb") as fh:
                np.savez_compressed(fh, **arrays)
        except OSError as exc:
            raise IoFailure(f"Cannot write homotopy bundle {path}: {exc}") from exc
        logger.info("Saved homotopy (%d frames) to %s", self.n_frames, path)
        return path

    @classmethod
    def load(cls, path: PathLike) -> "Homotopy":
        """Read a bundle written by :meth:`save`; reports are left empty."""
        try:
            data = np.load(Path(path), allow_pickle=False)
        except (OSError, ValueError) as exc:
            raise IoFailure(f"Cannot read homotopy bundle {path}: {exc}") from exc
        with data:
            counts = data["counts"]
            vertices = data["vertices"]
            faces = data["faces"]
            frames = []
            v0 = f0 = 0
            for nv, nf in counts:
                frames.append(build_and_validate(faces[f0:f0 + nf], vertices[v0:v0 + nv]))
                v0 += nv
                f0 += nf
            events = events_from_frame(pd.read_csv(io.StringIO(str(data["events"]))))
            provenance = yaml.safe_load(str(data["provenance"])) or {}
            flow_trace = None
            if "flow_trace" in data.files:
                flow_trace = pd.read_csv(io.StringIO(str(data["flow_trace"])))
            return cls(
                frames=frames,
                times=np.array(data["times"]),
                energies=np.array(data["energies"]),
                events=events,
                provenance=provenance,
                flow_trace=flow_trace,
            )


# ---------------------------------------------------------------------------
# Assembly helpers
# ---------------------------------------------------------------------------

def choose_pushoff_direction(
    pairs: Sequence[EigenPair],
    seed: int,
    rtol: float = DEGENERATE_EIGEN_RTOL,
) -> EigenPair:
    """
    Eigenpair to push off along.

    With two negative eigenvalues within ``rtol`` of each other, a seeded
    random unit combination of both modes is returned; otherwise the lowest
    pair is used and ``seed`` is ignored.
    """
    lowest = pairs[0]
    if len(pairs) < 2:
        return lowest
    second = pairs[1]
    if second.value >= 0 or abs(second.value - lowest.value) > rtol * abs(lowest.value):
        return lowest
    angle = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi)
    vector = np.cos(angle) * lowest.vector + np.sin(angle) * second.vector
    vector = vector / np.linalg.norm(vector)
    logger.info(
        "Degenerate negative eigenspace (%.6g, %.6g); mixing modes at angle %.4f",
        lowest.value, second.value, angle,
    )
    return EigenPair(lowest.value, vector, max(lowest.residual, second.residual))


def select_keyframes(times: np.ndarray, budget: int, forced: Sequence[int] = ()) -> np.ndarray:
    """
    Indices of dense frames to keep.

    ``budget`` frames spread at equal time (arc length) spacing, half on each
    side of 0.5, plus the first and last frame of each half and ``forced``.
    """
    times = np.asarray(times, dtype=np.float64)
    n = times.shape[0]
    if n <= budget:
        return np.arange(n)
    keep = set(int(i) for i in forced)
    h = int(np.searchsorted(times, 0.5, side="right"))
    for lo, hi in ((0, h), (h, n)):
        if hi <= lo:
            continue
        keep.update((lo, hi - 1))
        targets = np.linspace(times[lo], times[hi - 1], max(budget // 2, 2))
        local = times[lo:hi]
        for t in targets:
            keep.add(lo + int(np.argmin(np.abs(local - t))))
    return np.array(sorted(keep), dtype=np.int64)


def _remap_events(events: Sequence[EventRecord], keep: np.ndarray) -> List[EventRecord]:
    position = {int(k): i for i, k in enumerate(keep)}
    return [
        EventRecord(
            e.kind,
            (position[e.frame_interval[0]], position[e.frame_interval[1]]),
            e.location,
            e.simultaneous_group,
        )
        for e in events
    ]


def _flow_down(
    model: HalfwayModel,
    eigenpair: EigenPair,
    sign: int,
    config: EversionConfig,
    constraint: SymmetryConstraint,
) -> Tuple[FlowTrace, float]:
    magnitude = config.pushoff_magnitude * model.mesh.mean_edge_length
    pushed, used = pushoff_with_backoff(model.mesh, magnitude, sign, eigenpair, constraint)
    offset = float(np.linalg.norm(pushed.vertices - model.mesh.vertices))
    trace = flow_until(pushed, config.downhill, constraint=constraint, initial_arc_length=offset)
    logger.info(
        "Downhill flow (sign %+d): %d steps, energy %.6g -> %.6g (%s)",
        sign, trace.n_steps, trace.energies[0], trace.final_energy, trace.terminated_by.value,
    )
    return trace, used


def _half_times(trace: FlowTrace, rising: bool) -> np.ndarray:
    arcs = np.array([f.arc_length for f in trace.frames])
    s = arcs / arcs[-1]
    return 0.5 * (1.0 - s) if rising else 0.5 + 0.5 * s


def run_eversion(config: Optional[EversionConfig] = None, model: Optional[HalfwayModel] = None) -> Homotopy:
    """
    Compute a minimax eversion through a halfway model.

    Parameters
    ----------
    config : EversionConfig, optional
        Run settings.
    model : HalfwayModel, optional
        Already relaxed halfway model; built and relaxed from ``config`` when
        omitted.

    Returns
    -------
    Homotopy
        Frames from the round sphere through the halfway stage to the
        inside-out round sphere, with events and the energy bound audit.

    Raises
    ------
    PipelineError
        Wrapping the failing stage's error (``NotASaddle``,
        ``LineSearchFailure``, ``SymmetryLost``, ``ToleranceBreakdown``, ...)
        with the last good frame and the energy trace.
    """
    config = config or EversionConfig()
    bundle: Dict[str, Any] = {"last_frame": None, "energy_trace": []}
    stage = "halfway"
    try:
        if model is None:
            model = initial_model(config.kind, config.resolution, config.boy_offset, config.seed_path or None)
            bundle["last_frame"] = model.mesh
            stage = "relax"
            model = relax_halfway(model, config.relax)
        bundle["last_frame"] = model.mesh
        bundle["energy_trace"] = [model.energy]

        stage = "eigen"
        constraint = model.eversion_constraint()
        pairs = lowest_eigenpairs(model.mesh, config.eigen, k=2, constraint=constraint)
        eigenpair = choose_pushoff_direction(pairs, config.seed)

        stage = "downhill"
        trace, magnitude = _flow_down(model, eigenpair, +1, config, constraint)
        bundle["last_frame"] = trace.final_mesh
        bundle["energy_trace"] = trace.energies.tolist()

        rising = [f.mesh for f in reversed(trace.frames)]
        rising_times = _half_times(trace, rising=True)[::-1]
        rising_energies = [f.energy for f in reversed(trace.frames)]
        if config.independent_second_half:
            stage = "second_half"
            second, _ = _flow_down(model, eigenpair, -1, config, constraint)
            falling = [f.mesh for f in second.frames]
            falling_times = _half_times(second, rising=False)
            falling_energies = [f.energy for f in second.frames]
        else:
            falling = [model.exchange(f.mesh) for f in trace.frames]
            falling_times = _half_times(trace, rising=False)
            falling_energies = [f.energy for f in trace.frames]

        stage = "analysis"
        tol = config.intersect
        down_reports = analyze_frames([f.mesh for f in trace.frames], tol, config.n_jobs)
        if config.independent_second_half:
            falling_reports = analyze_frames(falling, tol, config.n_jobs)
        else:
            falling_reports = [r.transformed(model.exchange_matrix) for r in down_reports]
        dense = rising + falling
        dense_times = np.concatenate([rising_times, falling_times])
        dense_energies = np.array(rising_energies + falling_energies)
        dense_reports = list(reversed(down_reports)) + falling_reports
        dense_events = classify_events(dense, tol, dense_reports)

        forced = [i for e in dense_events for i in e.frame_interval]
        keep = select_keyframes(dense_times, config.frame_budget, forced)
        frames = [dense[i] for i in keep]
        reports = [dense_reports[i] for i in keep]
        times = dense_times[keep]
        events = _remap_events(dense_events, keep)
        audit = li_yau_table(frames, reports, times)
    except EversionError as exc:
        logger.error("Eversion failed during %s: %s", stage, exc)
        raise PipelineError(stage, exc, bundle) from exc

    provenance = {
        "kind": config.kind,
        "config_hash": config.config_hash(),
        "seed": int(config.seed),
        "halfway_energy": float(model.energy),
        "halfway_gradient_norm": float(model.gradient_norm),
        "halfway_faces": int(model.mesh.n_faces),
        "eigenvalue": float(eigenpair.value),
        "eigenvalues": [float(p.value) for p in pairs],
        "pushoff_magnitude": float(magnitude),
        "downhill_steps": int(trace.n_steps),
        "downhill_terminated_by": trace.terminated_by.value,
        "final_energy": float(trace.final_energy),
        "dense_frames": len(dense),
        "independent_second_half": bool(config.independent_second_half),
        "config": config.to_dict(),
    }
    logger.info(
        "Eversion assembled: %d frames, %d events, halfway energy %.6g",
        len(frames), len(events), model.energy,
    )
    return Homotopy(
        frames=frames,
        times=times,
        energies=dense_energies[keep],
        events=events,
        li_yau=audit,
        reports=reports,
        provenance=provenance,
        flow_trace=trace.to_frame(),
        halfway=model,
    )
