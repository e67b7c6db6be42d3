"""Resolve YAML mappings into frozen config dataclasses and back.

Nested mappings become nested dataclasses by field type, lists become
tuples where a field is typed as a tuple, and unknown keys are rejected
with the list of valid ones. Dumping reverses this so a resolved config
can be written out and loaded again unchanged. A written config may
carry an ``invocation`` block recording the command line that produced
it; loading skips it.
"""

import dataclasses
from pathlib import Path
from typing import Any, get_origin, get_type_hints

import yaml

from spantrellis.utils.errors import ConfigError

from .main import ExperimentConfig

CONFIG_VERSION = 1
INVOCATION_KEY = "invocation"


class ConfigResolver:
    """Build a dataclass instance from a plain mapping."""

    def __init__(self, data: dict | None) -> None:
        self.data = data or {}

    def _build(self, cls: type, data: Any, where: str) -> Any:
        if not isinstance(data, dict):
            raise ConfigError(f"{where}: expected a mapping, got {type(data).__name__}")
        hints = get_type_hints(cls)
        names = [f.name for f in dataclasses.fields(cls)]
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise ConfigError(f"{where}: unknown keys {unknown}. Valid keys: {names}")
        kwargs = {}
        for key, value in data.items():
            hint = hints[key]
            if dataclasses.is_dataclass(hint) and isinstance(hint, type):
                value = self._build(hint, value, f"{where}.{key}")
            elif get_origin(hint) is tuple and isinstance(value, list):
                value = tuple(value)
            kwargs[key] = value
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: {exc}") from exc

    def experiment(self) -> ExperimentConfig:
        """
        Raises:
            ConfigError: On an unsupported version, unknown keys or values
                out of range.
        """
        data = dict(self.data)
        version = data.pop("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ConfigError(f"Unsupported config version {version}, expected {CONFIG_VERSION}.")
        invocation = data.pop(INVOCATION_KEY, None)
        if invocation is not None and not isinstance(invocation, dict):
            raise ConfigError(f"config.{INVOCATION_KEY}: expected a mapping, got {type(invocation).__name__}")
        return self._build(ExperimentConfig, data, "config")


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def config_to_dict(config: ExperimentConfig) -> dict:
    return {"version": CONFIG_VERSION, **_plain(dataclasses.asdict(config))}


def load_config(path: str | Path | None, overrides: dict | None = None) -> ExperimentConfig:
    """Read a YAML config (defaults when ``path`` is None) and apply overrides.

    Raises:
        ConfigError: If the file cannot be parsed or fails validation.
    """
    data: dict = {}
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping.")
    data = {**data, **(overrides or {})}
    return ConfigResolver(data).experiment()


def write_config(path: str | Path, config: ExperimentConfig, invocation: dict | None = None) -> Path:
    """Write ``config`` as YAML, preceded by ``invocation`` when given."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = config_to_dict(config)
    if invocation is not None:
        data = {"version": data.pop("version"), INVOCATION_KEY: _plain(invocation), **data}
    path.write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")
    return path


def read_invocation(path: str | Path) -> dict | None:
    """Return the ``invocation`` block of a written config, if it has one.

    Raises:
        ConfigError: If the file cannot be parsed.
    """
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    return data.get(INVOCATION_KEY) if isinstance(data, dict) else None
