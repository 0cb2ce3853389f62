#!/usr/bin/env python3
"""
Utility functions shared by the forecasting scripts.

Settings loading (config.yaml), logging setup, per-index seed derivation
and small parsing helpers used by the command-line tools.
"""

from __future__ import annotations

import copy
import hashlib
import logging
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml

from errors import ConfigError, MissingFile

DEFAULT_CONFIG_FILE = "config.yaml"

DEFAULT_SETTINGS: Dict[str, Dict[str, Any]] = {
    "ingest": {
        "offset_year": 1989,
        "groups": "groups.yaml",
    },
    "pca": {
        "retention": "kaiser",
        "profile_threshold": 0.3,
    },
    "search": {},
    "forecast": {
        "horizon": 2020,
        "start_year": 2017,
    },
    "report": {
        "display_scale": 1.0,
        "xlsx": False,
        "out_dir": "outputs",
    },
}


def setup_logging(verbose: bool = False) -> None:
    """
    Configure the root logger for a command-line run.

    Args:
        verbose (bool): Log at DEBUG instead of INFO
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)-7s %(name)s: %(message)s",
        datefmt="%H:%M:%S",
    )


def load_settings(config_file: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """
    Load config.yaml and merge it over the in-code defaults.

    A missing default config file is fine (defaults are used); a config file
    named explicitly must exist.

    Args:
        config_file (str, optional): Path to a YAML config file

    Returns:
        dict: Settings keyed by section (ingest, pca, search, forecast, report)
    """
    settings = copy.deepcopy(DEFAULT_SETTINGS)
    path = Path(config_file or DEFAULT_CONFIG_FILE)

    if not path.exists():
        if config_file is not None:
            raise MissingFile(str(path))
        return settings

    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}

    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping of sections")

    for section, values in data.items():
        if section not in settings:
            raise ConfigError(f"{path}: unknown section '{section}'")
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: section '{section}' must be a mapping")
        settings[section].update(values)
    return settings


def derive_seed(master_seed: int, label: str) -> int:
    """Stable 64-bit seed for one index label, independent of PYTHONHASHSEED."""
    digest = hashlib.sha256(f"{int(master_seed)}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def parse_year_range(text: str) -> Tuple[int, int]:
    """Parse '2017-2020' (or a single year) into an inclusive (first, last) pair."""
    parts = text.replace("..", "-").split("-")
    try:
        if len(parts) == 1:
            year = int(parts[0])
            return year, year
        if len(parts) == 2:
            first, last = int(parts[0]), int(parts[1])
            if first > last:
                raise ConfigError(f"year range '{text}' is reversed")
            return first, last
    except ValueError:
        pass
    raise ConfigError(f"cannot parse year range '{text}' (expected e.g. 2017-2020)")


def pick(value: Any, section: Mapping[str, Any], key: str) -> Any:
    """CLI flag if given, otherwise the settings value."""
    return section.get(key) if value is None else value
