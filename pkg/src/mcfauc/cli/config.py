import copy
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from ..model.errors import ConfigurationError

DEFAULT_CONFIG_DIR = Path.home() / ".config" / "mcfctl"
DEFAULT_CONFIG_PATH = DEFAULT_CONFIG_DIR / "config.yml"
DEFAULT_CONFIG: Dict[str, Any] = {
    "analysis": {
        "alpha": 0.05,
    },
    "output": {
        "format": "json",
        "digits": None,
    },
    "simulation": {
        "threads": 1,
        "max_failure_rate": 0.01,
        "block_size": 4,
    },
    "logging": {
        "level": "WARNING",
    },
}

OUTPUT_FORMATS = ("json", "csv")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Configuration:
    def __init__(self, config_data: Dict[str, Any]):
        self._config = config_data
        for section in DEFAULT_CONFIG:
            self._config.setdefault(section, {})

    def _get(self, section: str, key: str) -> Any:
        return self._config.get(section, {}).get(key, DEFAULT_CONFIG[section][key])

    @property
    def alpha(self) -> float:
        value = float(self._get("analysis", "alpha"))
        if not 0 < value < 1:
            raise ConfigurationError(f"analysis.alpha must lie in (0, 1), got {value}")
        return value

    @property
    def output_format(self) -> str:
        value = str(self._get("output", "format")).lower()
        if value not in OUTPUT_FORMATS:
            raise ConfigurationError(
                f"output.format must be one of {', '.join(OUTPUT_FORMATS)}, got {value!r}"
            )
        return value

    @property
    def digits(self) -> Optional[int]:
        value = self._get("output", "digits")
        return None if value is None else int(value)

    @property
    def threads(self) -> int:
        value = int(self._get("simulation", "threads"))
        if value < 1:
            raise ConfigurationError(f"simulation.threads must be at least 1, got {value}")
        return value

    @property
    def max_failure_rate(self) -> float:
        value = float(self._get("simulation", "max_failure_rate"))
        if not 0 <= value < 1:
            raise ConfigurationError(
                f"simulation.max_failure_rate must lie in [0, 1), got {value}"
            )
        return value

    @property
    def block_size(self) -> int:
        return int(self._get("simulation", "block_size"))

    @property
    def log_level(self) -> str:
        value = str(self._get("logging", "level")).upper()
        if value not in LOG_LEVELS:
            raise ConfigurationError(
                f"logging.level must be one of {', '.join(LOG_LEVELS)}, got {value!r}"
            )
        return value


def get_default_config_path() -> Path:
    return DEFAULT_CONFIG_PATH


def deep_merge(source, destination):
    for key, value in source.items():
        if isinstance(value, dict):
            node = destination.setdefault(key, {})
            deep_merge(value, node)
        else:
            destination[key] = value
    return destination


def load_config(config_path: Optional[Path]) -> Configuration:
    config_data = copy.deepcopy(DEFAULT_CONFIG)
    if config_path and config_path.exists():
        with open(config_path, "r") as f:
            try:
                user_config = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigurationError(f"could not parse config file {config_path}: {e}") from e
        if user_config and not isinstance(user_config, dict):
            raise ConfigurationError(f"config file {config_path} must hold a mapping")
        if user_config:
            config_data = deep_merge(user_config, config_data)
    return Configuration(config_data)
