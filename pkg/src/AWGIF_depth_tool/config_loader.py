from pathlib import Path
from typing import Any, Dict

import yaml

YAML_SUFFIXES = (".yaml", ".yml")


class ConfigError(Exception):
    """Base exception for configuration errors."""
    pass


class ConfigNotFoundError(ConfigError):
    """Exception raised when the configuration file is not found."""
    pass


class ConfigParseError(ConfigError):
    """Exception raised when there's an error parsing the configuration file."""
    pass


def _parse_scalar(text: str) -> Any:
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def parse_key_value_text(text: str, source: str = "<string>") -> Dict[str, Any]:
    """Parse ``key=value`` lines; ``#`` comments and blank lines are ignored.

    Values become int or float when they parse as such, otherwise stay strings.
    """
    settings: Dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigParseError(
                f"Error parsing '{source}' line {lineno}: expected key=value, got '{line}'.")
        settings[key.replace("-", "_")] = _parse_scalar(value.strip())
    return settings


def load_config(file_path: str) -> Dict[str, Any]:
    """Load configuration from a YAML file or a plain key=value file.

    The format follows the suffix: ``.yaml``/``.yml`` are YAML, anything else is
    read as key=value lines.
    """
    path = Path(file_path)
    try:
        text = path.read_text(encoding='utf-8')
    except FileNotFoundError as e:
        raise ConfigNotFoundError(f"Config file not found at '{file_path}'.") from e
    except Exception as e:
        raise ConfigError(f"An unexpected error occurred while loading config file '{file_path}': {e}") from e

    if path.suffix.lower() not in YAML_SUFFIXES:
        return parse_key_value_text(text, source=str(file_path))

    try:
        config_data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigParseError(f"Error parsing YAML configuration file '{file_path}': {e}") from e
    if config_data is None:
        return {}
    if not isinstance(config_data, dict):
        raise ConfigParseError("Invalid config file format: Root must be a dictionary.")
    return config_data


def prepare_command_settings(config: Dict[str, Any], command: str) -> Dict[str, Any]:
    """Merge ``default_settings`` with the section of ``command``.

    A config without any nested section (e.g. a key=value file) is taken as
    default settings as a whole. Keys use underscores (``noise_var``).
    """
    if not any(isinstance(value, dict) for value in config.values()):
        return {key.replace("-", "_"): value for key, value in config.items()}

    defaults = config.get("default_settings", {})
    if not isinstance(defaults, dict):
        raise ConfigParseError("Invalid config file format: 'default_settings' "
                               "section must be a mapping.")
    section = config.get(command, {})
    if section is None:
        section = {}
    if not isinstance(section, dict):
        raise ConfigParseError(f"Invalid config file format: '{command}' "
                               "section must be a mapping.")
    merged = {**defaults, **section}
    return {key.replace("-", "_"): value for key, value in merged.items()}
