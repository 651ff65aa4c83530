# pyevert/pipeline/config.py

"""
Resolved settings of one eversion run.

Values come in three layers: schema defaults, an optional ``key = value``
config file and command-line overrides. :class:`EversionConfig` holds the
merged result with one typed sub-config per section.

Usage:
	config = EversionConfig.from_file("morin.cfg", overrides={"": {"seed": 3}})
	config.config_hash()
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from ..config.registry import ConfigRegistry, merge_values
from ..energy.hessian import EigenConfig
from ..errors import ConfigError
from ..halfway.models import KINDS
from ..intersections.report import IntersectionTolerances
from ..optimize.config import FlowConfig

logger = logging.getLogger(__name__)

# Smallest frame budget giving a usable event timeline
MIN_FRAME_BUDGET = 16

_TOP_LEVEL = (
    "kind", "resolution", "pushoff_magnitude", "frame_budget", "output_dir", "seed",
    "independent_second_half", "boy_offset", "seed_path", "n_jobs", "plots",
)


@dataclass(frozen=True)
class EversionConfig:
    """
    Settings of :func:`run_eversion`.

    Attributes
    ----------
    kind : str
        ``"Morin2Fold"`` or ``"Boy3Fold"``.
    resolution : int
        Sampling resolution of the halfway model.
    pushoff_magnitude : float
        Saddle pushoff size in mean edge lengths.
    frame_budget : int
        Equal arc-length frames kept over the whole eversion.
    output_dir : str
        Export directory.
    seed : int
        Tie-break seed for a degenerate negative eigenspace.
    independent_second_half : bool
        Flow the opposite pushoff instead of applying the side exchange.
    boy_offset : float
        Sheet separation of the Boy double cover.
    seed_path : str
        Optional seed mesh replacing the closed-form halfway model.
    n_jobs : int
        joblib workers for per-frame analysis.
    plots : bool
        Export diagnostic plots.
    relax, downhill : FlowConfig
        Halfway relaxation and downhill flow.
    eigen : EigenConfig
        Hessian eigenproblem.
    intersect : IntersectionTolerances
        Self-intersection analysis.
    """

    kind: str = "Morin2Fold"
    resolution: int = 16
    pushoff_magnitude: float = 0.01
    frame_budget: int = 64
    output_dir: str = "eversion_out"
    seed: int = 0
    independent_second_half: bool = False
    boy_offset: float = 0.005
    seed_path: str = ""
    n_jobs: int = 1
    plots: bool = False
    relax: FlowConfig = field(default_factory=FlowConfig)
    downhill: FlowConfig = field(default_factory=FlowConfig)
    eigen: EigenConfig = field(default_factory=EigenConfig)
    intersect: IntersectionTolerances = field(default_factory=IntersectionTolerances)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.frame_budget < MIN_FRAME_BUDGET:
            raise ConfigError(f"frame_budget must be >= {MIN_FRAME_BUDGET}, got {self.frame_budget}")
        if not self.pushoff_magnitude > 0:
            raise ConfigError(f"pushoff_magnitude must be positive, got {self.pushoff_magnitude}")
        if self.n_jobs == 0:
            raise ConfigError("n_jobs must be nonzero")
        for sub in (self.relax, self.downhill, self.eigen, self.intersect):
            sub.validate()

    def with_updates(self, **changes) -> "EversionConfig":
        return replace(self, **changes)

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)

    def to_dict(self) -> Dict[str, Any]:
        """Nested plain values, one mapping per section."""
        out: Dict[str, Any] = {name: getattr(self, name) for name in _TOP_LEVEL}
        out["relax"] = self.relax.to_dict()
        out["downhill"] = self.downhill.to_dict()
        out["eigen"] = {f.name: getattr(self.eigen, f.name) for f in fields(self.eigen)}
        out["intersect"] = self.intersect.to_dict()
        return out

    def config_hash(self) -> str:
        """SHA-256 of the canonical sorted-key rendering of every value."""
        text = yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    @classmethod
    def from_values(
        cls,
        values: Optional[Dict[str, Dict[str, Any]]] = None,
        registry: Optional[ConfigRegistry] = None,
    ) -> "EversionConfig":
        """
        Build from ``{section: {key: value}}`` with schema defaults filled in.

        ``improve.*`` keys configure the surgery pass of both flows.
        """
        registry = registry or ConfigRegistry()
        values = values or {}
        unknown = set(values) - {"", "relax", "downhill", "eigen", "improve", "intersect"}
        if unknown:
            raise ConfigError(f"Unknown config sections: {sorted(unknown)}")

        def resolved(section: str, group: str) -> Dict[str, Any]:
            merged = registry.defaults(group)
            for key, raw in values.get(section, {}).items():
                merged[key] = registry.coerce(group, key, raw)
            return merged

        top = resolved("", "eversion")
        quality = resolved("improve", "improve")
        return cls(
            **top,
            relax=FlowConfig.from_dict(resolved("relax", "flow"), quality),
            downhill=FlowConfig.from_dict(resolved("downhill", "flow"), quality),
            eigen=EigenConfig(**resolved("eigen", "eigen")),
            intersect=IntersectionTolerances.from_dict(resolved("intersect", "intersect")),
        )

    @classmethod
    def from_file(
        cls,
        path: Optional[Union[str, Path]] = None,
        overrides: Optional[Dict[str, Dict[str, Any]]] = None,
        registry: Optional[ConfigRegistry] = None,
    ) -> "EversionConfig":
        """Config file values (if any) with ``overrides`` applied on top."""
        registry = registry or ConfigRegistry()
        layers = []
        if path is not None:
            layers.append(registry.read_file(path))
        if overrides:
            layers.append(overrides)
        config = cls.from_values(merge_values(*layers), registry)
        logger.debug("Resolved eversion config %s", config.config_hash()[:12])
        return config
