# pyevert/pipeline/__init__.py

"""
End-to-end eversion: configuration, assembly, analysis and export.
"""

from .config import MIN_FRAME_BUDGET, EversionConfig
from .analysis import AuditReport, analyze_command, analyze_frames, audit_frames, intersections_table
from .homotopy import Homotopy, choose_pushoff_direction, run_eversion, select_keyframes
from .export import MANIFEST_NAME, export_homotopy, read_manifest, sha256_file, verify_manifest

__all__ = [
    # Configuration
    "EversionConfig",
    "MIN_FRAME_BUDGET",
    # Assembly
    "Homotopy",
    "run_eversion",
    "choose_pushoff_direction",
    "select_keyframes",
    # Analysis
    "AuditReport",
    "analyze_command",
    "analyze_frames",
    "audit_frames",
    "intersections_table",
    # Export
    "export_homotopy",
    "read_manifest",
    "verify_manifest",
    "sha256_file",
    "MANIFEST_NAME",
]
