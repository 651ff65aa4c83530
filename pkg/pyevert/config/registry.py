# pyevert/config/registry.py

"""
Configuration schema registry and key = value config files.

The schema (``pyevert/config_schema.yaml``) declares every key with its
dtype, default, range and description. Config files are plain text:

	# comments and blank lines are ignored
	kind = Morin2Fold
	resolution = 24
	relax.max_steps = 4000
	downhill.method = cg
	intersect.chain_tolerance = 1e-7

Top-level keys belong to the ``eversion`` group; ``relax.`` and
``downhill.`` keys to the ``flow`` group; ``eigen.``, ``improve.`` and
``intersect.`` keys to the groups of the same name.

Usage:
	from pyevert.config import ConfigRegistry
	registry = ConfigRegistry()
	values = registry.read_file("run.cfg")
	values["relax"]["max_steps"]
"""

import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from ..errors import ConfigError, IoFailure

logger = logging.getLogger(__name__)

DEFAULT_SCHEMA_PATH = Path(__file__).resolve().parent.parent / "config_schema.yaml"

# Config-file section -> schema group
SECTION_GROUPS = {
	"": "eversion",
	"relax": "flow",
	"downhill": "flow",
	"eigen": "eigen",
	"improve": "improve",
	"intersect": "intersect",
}

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


class ConfigRegistry:
	"""
	Loads the config schema and validates values against it.
	"""
	def __init__(self, schema_path: Optional[Union[str, Path]] = None):
		schema_path = Path(schema_path) if schema_path else DEFAULT_SCHEMA_PATH
		if not os.path.exists(schema_path):
			raise FileNotFoundError(f"Config schema not found: {schema_path}")
		with open(schema_path, "r", encoding="utf-8") as f:
			self.schema = yaml.safe_load(f)
		self.schema_path = schema_path

	@property
	def groups(self) -> List[str]:
		return list(self.schema)

	def get_group(self, group: str) -> Dict[str, Dict[str, Any]]:
		entry = self.schema.get(group)
		if entry is None:
			raise ConfigError(f"No config group '{group}'")
		return entry

	def get_entry(self, group: str, key: str) -> Dict[str, Any]:
		entry = self.get_group(group).get(key)
		if entry is None:
			raise ConfigError(f"Unknown config key '{key}' in group '{group}'")
		return entry

	def defaults(self, group: str) -> Dict[str, Any]:
		"""Default value of every key of a group."""
		return {
			key: self.coerce(group, key, entry.get("default"))
			for key, entry in self.get_group(group).items()
		}

	def coerce(self, group: str, key: str, raw: Any, line: Optional[int] = None) -> Any:
		"""
		Convert ``raw`` (text or value) to the key's dtype and check its range.

		Raises
		------
		ConfigError
			Wrong type, value outside ``min``/``max`` or not among ``choices``.
		"""
		entry = self.get_entry(group, key)
		dtype = entry.get("dtype", "float")
		where = f" (line {line})" if line is not None else ""
		try:
			value = _convert(raw, dtype)
		except (TypeError, ValueError):
			raise ConfigError(f"'{key}' expects {dtype}, got {raw!r}{where}") from None
		if "choices" in entry and value not in entry["choices"]:
			raise ConfigError(f"'{key}' must be one of {entry['choices']}, got {value!r}{where}")
		if "min" in entry and value < entry["min"]:
			raise ConfigError(f"'{key}' must be >= {entry['min']}, got {value!r}{where}")
		if "max" in entry and value > entry["max"]:
			raise ConfigError(f"'{key}' must be <= {entry['max']}, got {value!r}{where}")
		return value

	def resolve_key(self, dotted: str, line: Optional[int] = None):
		"""Split ``section.key`` into (section, group, key)."""
		section, _, key = dotted.rpartition(".")
		where = f" (line {line})" if line is not None else ""
		if section not in SECTION_GROUPS:
			raise ConfigError(f"Unknown config section '{section}' in '{dotted}'{where}")
		group = SECTION_GROUPS[section]
		if key not in self.get_group(group):
			raise ConfigError(f"Unknown config key '{dotted}'{where}")
		return section, group, key

	def parse_text(self, text: str, sections: Optional[List[str]] = None) -> Dict[str, Dict[str, Any]]:
		"""
		Parse ``key = value`` text into ``{section: {key: value}}``.

		Parameters
		----------
		text : str
			File contents.
		sections : list of str, optional
			Restrict accepted sections (``""`` is the top level).

		Raises
		------
		ConfigError
			Malformed line, unknown or duplicate key, or invalid value; the
			message names the line.
		"""
		values: Dict[str, Dict[str, Any]] = {}
		for lineno, raw in enumerate(text.splitlines(), start=1):
			line = raw.split("#", 1)[0].strip()
			if not line:
				continue
			if "=" not in line:
				raise ConfigError(f"Malformed config line {lineno}: expected 'key = value', got {raw.strip()!r}")
			name, _, value = line.partition("=")
			name = name.strip()
			value = value.strip()
			if not name:
				raise ConfigError(f"Malformed config line {lineno}: missing key")
			section, group, key = self.resolve_key(name, lineno)
			if sections is not None and section not in sections:
				raise ConfigError(f"Key '{name}' not allowed here (line {lineno})")
			bucket = values.setdefault(section, {})
			if key in bucket:
				raise ConfigError(f"Duplicate config key '{name}' (line {lineno})")
			bucket[key] = self.coerce(group, key, value, lineno)
		return values

	def read_file(self, path: Union[str, Path], sections: Optional[List[str]] = None) -> Dict[str, Dict[str, Any]]:
		"""Read and parse a config file; see :meth:`parse_text`."""
		try:
			with open(path, "r", encoding="utf-8") as f:
				text = f.read()
		except OSError as exc:
			raise IoFailure(f"Cannot read config file {path}: {exc}") from exc
		logger.info("Reading config %s", path)
		return self.parse_text(text, sections)

	def add_arguments(self, parser, sections: Optional[List[str]] = None) -> None:
		"""
		Add one ``--section.key`` flag per schema key to an argparse parser.

		Flags default to ``None`` so only explicitly given values override
		the config file.
		"""
		for section, group in SECTION_GROUPS.items():
			if sections is not None and section not in sections:
				continue
			for key, entry in self.get_group(group).items():
				flag = f"--{section}.{key}" if section else f"--{key}"
				dest = f"{section}.{key}" if section else key
				parser.add_argument(
					flag,
					dest=dest,
					default=None,
					metavar=entry.get("dtype", "float").upper(),
					help=f"{entry.get('description', '')} [default: {entry.get('default')}]",
				)

	def overrides_from_args(self, args) -> Dict[str, Dict[str, Any]]:
		"""Collect flags set on the command line into ``{section: {key: value}}``."""
		values: Dict[str, Dict[str, Any]] = {}
		for dest, raw in vars(args).items():
			if raw is None:
				continue
			section, _, key = dest.rpartition(".")
			if section not in SECTION_GROUPS or key not in self.get_group(SECTION_GROUPS[section]):
				continue
			values.setdefault(section, {})[key] = self.coerce(SECTION_GROUPS[section], key, raw)
		return values


def merge_values(*layers: Dict[str, Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
	"""Later layers override earlier ones key by key."""
	merged: Dict[str, Dict[str, Any]] = {}
	for layer in layers:
		for section, bucket in layer.items():
			merged.setdefault(section, {}).update(bucket)
	return merged


def _convert(raw: Any, dtype: str) -> Any:
	if dtype == "int":
		if isinstance(raw, bool):
			raise TypeError("bool is not an int")
		if isinstance(raw, float) and not raw.is_integer():
			raise ValueError("not an integer")
		return int(raw)
	if dtype == "float":
		if isinstance(raw, bool):
			raise TypeError("bool is not a float")
		value = float(raw)
		if math.isnan(value):
			raise ValueError("nan")
		return value
	if dtype == "bool":
		if isinstance(raw, bool):
			return raw
		text = str(raw).strip().lower()
		if text in _TRUE:
			return True
		if text in _FALSE:
			return False
		raise ValueError(f"not a boolean: {raw!r}")
	if dtype == "str":
		return "" if raw is None else str(raw)
	raise ValueError(f"unknown dtype {dtype}")
