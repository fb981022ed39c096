# quasichaos/pipeline/config_loader.py

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import yaml
from pydantic import ValidationError

from quasichaos.core.errors import ConfigError
from quasichaos.schemas.config import RunConfig

logger = logging.getLogger(__name__)


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def parse_config(data: object) -> RunConfig:
    """Validate an already-parsed YAML document."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping at the top level")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {_describe(e)}") from e


def load_config(path: Optional[Path]) -> RunConfig:
    """
    Load and validate a YAML run configuration.

    Args:
        path: YAML file, or None for all defaults

    Returns:
        RunConfig (presets not yet applied)

    Raises:
        ConfigError: If the file is missing, malformed or fails validation
    """
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"configuration file not found: {path}")

    logger.info(f"Loading configuration from {path}")
    try:
        with path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    return parse_config(data)
