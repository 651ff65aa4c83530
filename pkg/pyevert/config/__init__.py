# pyevert/config/__init__.py

"""
Config schema registry and key = value config file parsing.
"""

from .registry import DEFAULT_SCHEMA_PATH, SECTION_GROUPS, ConfigRegistry, merge_values

__all__ = [
    "ConfigRegistry",
    "DEFAULT_SCHEMA_PATH",
    "SECTION_GROUPS",
    "merge_values",
]
