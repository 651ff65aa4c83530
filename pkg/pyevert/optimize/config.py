# pyevert/optimize/config.py

"""
Settings of energy flows.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

from ..config.registry import ConfigRegistry
from ..errors import ConfigError, IoFailure
from ..mesh.quality import ImproveConfig


@dataclass(frozen=True)
class FlowConfig:
    """
    Gradient flow settings.

    Attributes
    ----------
    max_steps : int
        Descent step budget.
    gradient_tolerance : float
        Converged once the gradient norm drops below this.
    armijo_constant : float
        Sufficient-decrease constant in (0, 1).
    step_shrink : float
        Backtracking factor in (0, 1).
    initial_step : float
        Largest trial step.
    improve_every : int
        Steps between surgery attempts and plateau checks.
    frame_every : int
        Steps between recorded frames.
    target_energy_window : float
        Relative energy decrease over ``improve_every`` steps below which
        the flow counts as converged.
    method : str
        ``"gradient"`` or ``"cg"`` (Polak-Ribiere+ with restarts).
    step_growth : float
        A trial step is at most this multiple of the last accepted step.
    refine_edge_factor : float
        Edges longer than this multiple of the initial mean edge length are
        subdivided during surgery.
    surgery_tolerance : float
        Largest energy increase accepted from surgery.
    min_step : float
        Line search gives up below this step size.
    quality : ImproveConfig
        Settings of the ``improve`` pass run during surgery.
    """

    max_steps: int = 2000
    gradient_tolerance: float = 1e-4
    armijo_constant: float = 1e-4
    step_shrink: float = 0.5
    initial_step: float = 1e-2
    improve_every: int = 25
    frame_every: int = 5
    target_energy_window: float = 1e-7
    method: str = "gradient"
    step_growth: float = 2.0
    refine_edge_factor: float = 2.0
    surgery_tolerance: float = 0.0
    min_step: float = 1e-14
    quality: ImproveConfig = field(default_factory=ImproveConfig)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.max_steps < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")
        for name in ("gradient_tolerance", "initial_step", "min_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.armijo_constant < 1.0:
            raise ConfigError(f"armijo_constant must lie in (0, 1), got {self.armijo_constant}")
        if not 0.0 < self.step_shrink < 1.0:
            raise ConfigError(f"step_shrink must lie in (0, 1), got {self.step_shrink}")
        if self.improve_every < 1 or self.frame_every < 1:
            raise ConfigError("improve_every and frame_every must be >= 1")
        if self.target_energy_window < 0:
            raise ConfigError("target_energy_window must be >= 0")
        if self.method not in ("gradient", "cg"):
            raise ConfigError(f"method must be 'gradient' or 'cg', got {self.method!r}")
        if not self.step_growth >= 1.0:
            raise ConfigError(f"step_growth must be >= 1, got {self.step_growth}")
        if not self.refine_edge_factor >= 1.0:
            raise ConfigError(f"refine_edge_factor must be >= 1, got {self.refine_edge_factor}")
        if not self.surgery_tolerance >= 0.0:
            raise ConfigError("surgery_tolerance must be >= 0")
        if self.min_step >= self.initial_step:
            raise ConfigError("min_step must be below initial_step")

    def with_updates(self, **changes) -> "FlowConfig":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "quality"}
        out["quality"] = asdict(self.quality)
        return out

    @classmethod
    def from_dict(cls, values: Dict[str, Any], quality: Optional[Dict[str, Any]] = None) -> "FlowConfig":
        known = {f.name for f in fields(cls)} - {"quality"}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"Unknown flow keys: {sorted(unknown)}")
        return cls(**values, quality=ImproveConfig(**(quality or {})))

    @classmethod
    def from_file(cls, path: Union[str, Path], registry: Optional[ConfigRegistry] = None) -> "FlowConfig":
        """
        Read a flow-only config file.

        Keys are plain flow keys (``max_steps = 500``); ``improve.*`` keys
        configure the surgery pass. Every key has a default; unknown keys
        raise :class:`ConfigError`.
        """
        registry = registry or ConfigRegistry()
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"Cannot read flow config {path}: {exc}") from exc
        # flow keys are written without a section in a flow-only file
        lines = []
        for raw in text.splitlines():
            stripped = raw.split("#", 1)[0].strip()
            if stripped and "=" in stripped and "." not in stripped.partition("=")[0]:
                raw = "relax." + raw.lstrip()
            lines.append(raw)
        values = registry.parse_text("\n".join(lines), sections=["relax", "improve"])
        return cls.from_dict(values.get("relax", {}), values.get("improve"))
