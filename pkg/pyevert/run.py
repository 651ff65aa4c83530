# pyevert/run.py

"""
Unified entry points of pyevert.

One function per command-line subcommand; each takes resolved settings and
paths and returns the in-memory result, writing its artefacts on the way.

Example
-------
>>> from pyevert import EversionConfig, evert
>>> homotopy = evert(EversionConfig(kind="Morin2Fold", resolution=24, output_dir="out"))
>>> homotopy.provenance["halfway_energy"]
"""

import logging
from pathlib import Path
from typing import Optional, Union

from .halfway.models import HalfwayModel, initial_model, load_seed, relax_halfway, write_seed
from .intersections.report import IntersectionTolerances
from .pipeline.analysis import AuditReport, analyze_command
from .pipeline.config import EversionConfig
from .pipeline.export import export_homotopy
from .pipeline.homotopy import Homotopy, run_eversion

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

BUNDLE_NAME = "homotopy.npz"


def generate(config: EversionConfig, output: PathLike) -> HalfwayModel:
    """
    Build the unrelaxed halfway model of ``config.kind`` and write it as a seed.

    Parameters
    ----------
    config : EversionConfig
        ``kind``, ``resolution``, ``boy_offset`` and ``seed_path`` are used.
    output : path
        Seed path; ``<stem>.obj`` plus orbit, group and model sidecars.
    """
    model = initial_model(config.kind, config.resolution, config.boy_offset, config.seed_path or None)
    write_seed(model, output)
    return model


def relax(config: EversionConfig, output: PathLike) -> HalfwayModel:
    """
    Relax a halfway model and write it as a seed.

    The starting model is ``config.seed_path`` when set, the closed-form
    model otherwise. The relaxation trace is written next to the seed.
    """
    if config.seed_path:
        model = load_seed(config.seed_path, kind=config.kind)
    else:
        model = initial_model(config.kind, config.resolution, config.boy_offset)
    relaxed = relax_halfway(model, config.relax)
    mesh_path = write_seed(relaxed, output)
    if relaxed.relaxation is not None:
        relaxed.relaxation.to_frame().to_csv(mesh_path.with_suffix(".relax.csv"), index=False)
    return relaxed


def evert(config: EversionConfig, bundle: Optional[PathLike] = None) -> Homotopy:
    """
    Run the eversion pipeline and export it to ``config.output_dir``.

    The homotopy bundle is saved as ``<output_dir>/homotopy.npz`` unless
    ``bundle`` names another path. With ``config.seed_path`` set, that seed
    is relaxed instead of the closed-form model.
    """
    homotopy = run_eversion(config)
    out = config.output_path
    homotopy.save(Path(bundle) if bundle else out / BUNDLE_NAME)
    export_homotopy(homotopy, out, plots=config.plots, tolerances=config.intersect, n_jobs=config.n_jobs)
    return homotopy


def export(
    bundle: PathLike,
    output_dir: PathLike,
    plots: bool = False,
    tolerances: Optional[IntersectionTolerances] = None,
    n_jobs: int = 1,
) -> dict:
    """Export a saved homotopy bundle; returns the manifest."""
    homotopy = Homotopy.load(bundle)
    return export_homotopy(homotopy, output_dir, plots=plots, tolerances=tolerances, n_jobs=n_jobs)


def analyze(
    frames_dir: PathLike,
    output_dir: Optional[PathLike] = None,
    tolerances: Optional[IntersectionTolerances] = None,
    n_jobs: int = 1,
) -> AuditReport:
    """Audit a directory of frames; see :func:`analyze_command`."""
    return analyze_command(frames_dir, output_dir, tolerances, n_jobs)
