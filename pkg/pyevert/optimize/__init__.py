# pyevert/optimize/__init__.py

"""
Energy flows: Armijo gradient descent, flows to a plateau with mesh surgery,
saddle pushoff and pose normalisation.
"""

from .config import FlowConfig
from .pose import normalize_pose
from .descent import (
    FlowFrame,
    FlowTrace,
    SurgeryEvent,
    TerminationReason,
    descent_step,
    flow_until,
)
from .saddle import pushoff_with_backoff, saddle_pushoff

__all__ = [
    # Config
    "FlowConfig",
    # Traces
    "FlowTrace",
    "FlowFrame",
    "SurgeryEvent",
    "TerminationReason",
    # Operations
    "descent_step",
    "flow_until",
    "normalize_pose",
    "saddle_pushoff",
    "pushoff_with_backoff",
]
