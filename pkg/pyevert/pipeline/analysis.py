# pyevert/pipeline/analysis.py

"""
Per-frame self-intersection analysis and the standalone audit of a frame
directory.

``analyze_command`` needs nothing but OBJ frames named in time order, so it
also audits homotopies produced elsewhere.

Usage:
	audit = analyze_command("out/frames", output_dir="out/audit")
	audit.events_frame()
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..errors import IoFailure
from ..intersections.events import EventRecord, classify_events, events_to_frame
from ..intersections.li_yau import li_yau_table
from ..intersections.report import IntersectionTolerances, SelfIntersectionReport, Surface, self_intersection
from ..mesh.halfedge import TriMesh
from ..mesh.io import read_frames

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

INTERSECTION_COLUMNS = [
    "FRAME", "TIME", "SEGMENTS", "DOUBLE_CURVES", "TRIPLE_POINTS",
    "QUADRUPLE_CLUSTERS", "MAX_MULTIPLICITY", "TIGHTEST_QUADRUPLE_RADIUS",
]


def analyze_frames(
    frames: Sequence[Surface],
    tolerances: Optional[IntersectionTolerances] = None,
    n_jobs: int = 1,
) -> List[SelfIntersectionReport]:
    """Self-intersection report of every frame, in frame order."""
    tol = tolerances or IntersectionTolerances()
    if n_jobs == 1 or len(frames) < 2:
        return [self_intersection(f, tol) for f in frames]
    logger.info("Analysing %d frames with %d workers", len(frames), n_jobs)
    return Parallel(n_jobs=n_jobs)(delayed(self_intersection)(f, tol) for f in frames)


def intersections_table(
    reports: Sequence[SelfIntersectionReport],
    times: Optional[Sequence[float]] = None,
) -> pd.DataFrame:
    """One summary row per frame."""
    if times is None:
        times = np.linspace(0.0, 1.0, len(reports)) if len(reports) > 1 else [0.0] * len(reports)
    rows = []
    for i, r in enumerate(reports):
        s = r.summary()
        rows.append((
            i, float(times[i]), s["segments"], s["double_curves"], s["triple_points"],
            s["quadruple_clusters"], s["max_multiplicity"], s["tightest_quadruple_radius"],
        ))
    return pd.DataFrame(rows, columns=INTERSECTION_COLUMNS)


@dataclass
class AuditReport:
    """
    Result of :func:`analyze_command`.

    Attributes
    ----------
    frames_dir : Path
        Audited directory.
    times : np.ndarray
        Frame times (uniform in [0, 1]).
    reports : list of SelfIntersectionReport
    events : list of EventRecord
    li_yau : pd.DataFrame
        Energy bound audit per frame.
    files : dict
        Files written by :meth:`write`, by name.
    """

    frames_dir: Path
    times: np.ndarray
    reports: List[SelfIntersectionReport]
    events: List[EventRecord]
    li_yau: pd.DataFrame
    files: Dict[str, Path] = field(default_factory=dict)

    @property
    def n_frames(self) -> int:
        return len(self.reports)

    @property
    def passed(self) -> bool:
        return bool(self.li_yau["PASSED"].all()) if not self.li_yau.empty else True

    def events_frame(self) -> pd.DataFrame:
        return events_to_frame(self.events)

    def intersections_frame(self) -> pd.DataFrame:
        return intersections_table(self.reports, self.times)

    def write(self, output_dir: PathLike) -> Dict[str, Path]:
        """Write ``events.csv``, ``li_yau.csv`` and ``intersections.csv``."""
        out = Path(output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
            tables = {
                "events": self.events_frame(),
                "li_yau": self.li_yau,
                "intersections": self.intersections_frame(),
            }
            for name, df in tables.items():
                path = out / f"{name}.csv"
                df.to_csv(path, index=False)
                self.files[name] = path
        except OSError as exc:
            raise IoFailure(f"Cannot write audit to {out}: {exc}") from exc
        return dict(self.files)


def audit_frames(
    frames: Sequence[TriMesh],
    tolerances: Optional[IntersectionTolerances] = None,
    n_jobs: int = 1,
    frames_dir: PathLike = ".",
) -> AuditReport:
    """Audit an in-memory frame sequence."""
    tol = tolerances or IntersectionTolerances()
    reports = analyze_frames(frames, tol, n_jobs)
    events = classify_events(frames, tol, reports) if len(frames) > 1 else []
    times = np.linspace(0.0, 1.0, len(frames)) if len(frames) > 1 else np.zeros(len(frames))
    return AuditReport(
        frames_dir=Path(frames_dir),
        times=times,
        reports=list(reports),
        events=events,
        li_yau=li_yau_table(frames, reports, times),
    )


def analyze_command(
    frames_dir: PathLike,
    output_dir: Optional[PathLike] = None,
    tolerances: Optional[IntersectionTolerances] = None,
    n_jobs: int = 1,
) -> AuditReport:
    """
    Audit a directory of ``frame_XXXX.obj`` files without any optimisation.

    Parameters
    ----------
    frames_dir : path
        Directory of frames in naming order.
    output_dir : path, optional
        Where to write the audit tables.
    tolerances : IntersectionTolerances, optional
        Analysis tolerances.
    n_jobs : int, default 1
        joblib workers for the per-frame reports.

    Raises
    ------
    ParseFailure
        If a frame is malformed.
    FramesTooFarApart
        If consecutive frames cannot be matched.
    """
    frames = read_frames(frames_dir)
    logger.info("Auditing %d frames from %s", len(frames), frames_dir)
    audit = audit_frames(frames, tolerances, n_jobs, frames_dir)
    if output_dir is not None:
        audit.write(output_dir)
    logger.info(
        "Audit: %d events, Li-Yau %s", len(audit.events), "passed" if audit.passed else "FAILED"
    )
    return audit
