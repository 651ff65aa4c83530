# pyevert/pipeline/export.py

"""
Export of a homotopy to a directory of plain-text artefacts.

Layout::

	frames/frame_0000.obj          one mesh per kept frame
	curves/frame_0000.curves.obj   double curves of each frame
	energy_trace.csv               per-frame energy, volume and quality
	flow_trace.csv                 dense downhill trace (when available)
	events.csv                     event timeline
	li_yau.csv                     energy bound audit
	intersections.csv              per-frame intersection summary
	manifest.yaml                  config hash, seed, halfway energy, checksums

Every listed file except the manifest is checksummed; the output depends
only on the homotopy, so two exports of the same homotopy have identical
manifests.
"""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from ..errors import IoFailure
from ..intersections.li_yau import li_yau_table
from ..intersections.report import IntersectionTolerances
from ..mesh.io import frame_path, write_obj, write_polylines
from .analysis import analyze_frames, intersections_table
from .homotopy import Homotopy

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MANIFEST_NAME = "manifest.yaml"


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_csv(df, path: Path) -> Path:
    df.to_csv(path, index=False, float_format="%.17g")
    return path


def export_homotopy(
    homotopy: Homotopy,
    directory: PathLike,
    plots: bool = False,
    tolerances: Optional[IntersectionTolerances] = None,
    n_jobs: int = 1,
) -> Dict[str, Any]:
    """
    Write a homotopy and its analysis to ``directory``.

    Parameters
    ----------
    homotopy : Homotopy
        Result of :func:`run_eversion` or :meth:`Homotopy.load`.
    directory : path
        Output directory (created if needed).
    plots : bool, default False
        Also write ``energy_trace.png`` and ``events.png``.
    tolerances : IntersectionTolerances, optional
        Used when the homotopy carries no per-frame reports.
    n_jobs : int, default 1
        joblib workers when reports must be computed.

    Returns
    -------
    dict
        The manifest.

    Raises
    ------
    IoFailure
        If the directory or a file cannot be written.
    """
    out = Path(directory)
    reports = homotopy.reports
    if len(reports) != homotopy.n_frames:
        reports = analyze_frames(homotopy.frames, tolerances, n_jobs)
    li_yau = homotopy.li_yau
    if li_yau.empty:
        li_yau = li_yau_table(homotopy.frames, reports, homotopy.times)

    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for i, (mesh, report, t) in enumerate(zip(homotopy.frames, reports, homotopy.times)):
            written.append(write_obj(mesh, frame_path(out / "frames", i), header=f"time {t:.17g}"))
            written.append(
                write_polylines(report.double_curves, frame_path(out / "curves", i, suffix=".curves.obj"))
            )
        written.append(_write_csv(homotopy.energy_frame(), out / "energy_trace.csv"))
        if homotopy.flow_trace is not None:
            written.append(_write_csv(homotopy.flow_trace, out / "flow_trace.csv"))
        written.append(_write_csv(homotopy.events_frame(), out / "events.csv"))
        written.append(_write_csv(li_yau, out / "li_yau.csv"))
        written.append(_write_csv(intersections_table(reports, homotopy.times), out / "intersections.csv"))
        if plots:
            from ..visualization.trace_plots import save_plots

            written.extend(save_plots(homotopy, out))

        provenance = homotopy.provenance
        manifest: Dict[str, Any] = {
            "config_hash": provenance.get("config_hash"),
            "seed": provenance.get("seed"),
            "kind": provenance.get("kind"),
            "halfway_energy": provenance.get("halfway_energy"),
            "n_frames": homotopy.n_frames,
            "n_events": len(homotopy.events),
            "li_yau_passed": bool(li_yau["PASSED"].all()) if not li_yau.empty else True,
            "files": {
                p.relative_to(out).as_posix(): sha256_file(p) for p in sorted(written)
            },
        }
        with open(out / MANIFEST_NAME, "w", encoding="utf-8", newline="\n") as fh:
            yaml.safe_dump(manifest, fh, sort_keys=True, default_flow_style=False)
    except IoFailure:
        raise
    except OSError as exc:
        raise IoFailure(f"Cannot export homotopy to {out}: {exc}") from exc
    logger.info("Exported %d files to %s", len(written) + 1, out)
    return manifest


def read_manifest(directory: PathLike) -> Dict[str, Any]:
    path = Path(directory) / MANIFEST_NAME
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return yaml.safe_load(fh) or {}
    except OSError as exc:
        raise IoFailure(f"Cannot read manifest {path}: {exc}") from exc


def verify_manifest(directory: PathLike) -> Dict[str, bool]:
    """Checksum of every file in the manifest, compared with the disk."""
    out = Path(directory)
    files = read_manifest(out).get("files", {})
    return {name: (out / name).exists() and sha256_file(out / name) == digest for name, digest in files.items()}
