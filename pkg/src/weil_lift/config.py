"""Configuration loading and validation for weil-lift runs."""

from __future__ import annotations

from copy import deepcopy
import logging
import os
from pathlib import Path
import tomllib
from typing import Any

from platformdirs import user_config_path
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)
import tomli_w

from .exceptions import ConfigValidationError

LOGGER = logging.getLogger(__name__)

CONFIG_DIR = user_config_path("weillift")
CONFIG_PATH = CONFIG_DIR / "config.toml"

PREC_ENV_VAR = "WEILLIFT_PREC"
VALID_LOG_LEVELS = {"CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"}


class PrecisionConfig(BaseModel):
    """Working precision of transcendental evaluations, in bits."""

    bits: int = Field(default=256, ge=64, le=65_536)
    cm_start_bits: int = Field(default=256, ge=64, le=65_536)
    cm_headroom_bits: int = Field(default=64, ge=0, le=4096)


class SeriesConfig(BaseModel):
    """Number of stored coefficients for built-in newforms."""

    truncation: int = Field(default=200, ge=10, le=100_000)


class QuadratureConfig(BaseModel):
    """Gauss-Legendre panel settings for cycle and domain integrals."""

    order: int = Field(default=32, ge=4, le=256)
    tolerance: float = Field(default=1e-12, gt=0.0, lt=1.0)


class WorkersConfig(BaseModel):
    """Worker pool sizing."""

    threads: int = Field(default=1, ge=1, le=256)


class WeilConfig(BaseModel):
    """Weil representation evaluation strategy."""

    dense_limit: int = Field(default=4_000_000, ge=1)


class LoggingConfig(BaseModel):
    """Logging behavior and output destinations."""

    level: str = "WARNING"
    structured: bool = True
    log_to_file: bool = False
    log_file_path: str = "~/.local/state/weillift/weillift.log"

    @field_validator("level", mode="before")
    @classmethod
    def _validate_level(cls, value: Any) -> str:
        if not isinstance(value, str):
            raise ValueError("Logging level must be a string.")
        normalized = value.strip().upper()
        if normalized not in VALID_LOG_LEVELS:
            raise ValueError(f"Unsupported log level {normalized!r}.")
        return normalized

    @field_validator("log_file_path", mode="before")
    @classmethod
    def _validate_log_file_path(cls, value: Any) -> str:
        if not isinstance(value, str):
            raise ValueError("log_file_path must be a string.")
        normalized = value.strip()
        if not normalized:
            raise ValueError("log_file_path must not be empty.")
        return normalized


class OutputConfig(BaseModel):
    """Where and how JSON reports are written."""

    path: str = ""
    indent: int = Field(default=2, ge=0, le=8)

    @field_validator("path", mode="before")
    @classmethod
    def _normalize_path(cls, value: Any) -> str:
        if value is None:
            return ""
        if not isinstance(value, str):
            raise ValueError("output.path must be a string.")
        return value.strip()


class Config(BaseModel):
    """Root configuration model for all sections."""

    model_config = ConfigDict(populate_by_name=True)
    precision: PrecisionConfig = PrecisionConfig()
    series: SeriesConfig = SeriesConfig()
    quadrature: QuadratureConfig = QuadratureConfig()
    workers: WorkersConfig = WorkersConfig()
    weil: WeilConfig = WeilConfig()
    logging: LoggingConfig = LoggingConfig()
    output: OutputConfig = OutputConfig()

    @model_validator(mode="after")
    def _validate_precision_policy(self) -> Config:
        if self.precision.cm_start_bits > self.precision.bits * 64:
            raise ValueError("precision.cm_start_bits is unreasonably large.")
        return self


DEFAULT_CONFIG: dict[str, dict[str, Any]] = Config().model_dump(by_alias=True)


def ensure_config_dir(config_dir: Path | None = None) -> Path:
    """Ensure that the config directory exists and return its path."""
    directory = config_dir or CONFIG_DIR
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        LOGGER.warning("Unable to create config directory %s: %s", directory, exc)
    return directory


def _deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Recursively merge override values onto base values."""
    merged: dict[str, Any] = deepcopy(base)
    for key, value in override.items():
        if key in merged and isinstance(merged[key], dict) and isinstance(value, dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _enforce_private_permissions(path: Path) -> None:
    """Best-effort enforcement of private file permissions on POSIX systems."""
    if os.name != "posix" or not path.exists():
        return
    try:
        path.chmod(0o600)
    except OSError as exc:
        LOGGER.warning("Unable to enforce 0600 permissions for %s: %s", path, exc)


def _safe_default_config() -> dict[str, dict[str, Any]]:
    """Return a deep copy of validated default config data."""
    return deepcopy(DEFAULT_CONFIG)


def _validate_config(raw: dict[str, Any]) -> dict[str, dict[str, Any]]:
    """Validate merged config and fallback to safe defaults when possible."""
    try:
        config = Config.model_validate(raw)
        return config.model_dump(by_alias=True)
    except ValidationError as exc:
        LOGGER.warning("Configuration validation failed, using safe defaults: %s", exc)
        return _safe_default_config()
    except Exception as exc:  # noqa: BLE001 - unexpected model construction failure.
        raise ConfigValidationError(f"Unable to validate configuration: {exc}") from exc


def _apply_environment(config: dict[str, dict[str, Any]]) -> dict[str, dict[str, Any]]:
    """Apply the precision override from the environment, if any."""
    raw = os.environ.get(PREC_ENV_VAR, "").strip()
    if not raw:
        return config
    try:
        bits = int(raw)
    except ValueError:
        LOGGER.warning(
            "config.env_ignored",
            extra={"event": "config.env_ignored", "variable": PREC_ENV_VAR, "value": raw},
        )
        return config
    if bits < 64:
        LOGGER.warning(
            "config.env_ignored",
            extra={"event": "config.env_ignored", "variable": PREC_ENV_VAR, "value": raw},
        )
        return config
    config["precision"]["bits"] = bits
    return config


def load_config(config_path: Path | None = None) -> dict[str, dict[str, Any]]:
    """
    Load configuration from TOML, merge with defaults, and validate.

    The optional ``config_path`` argument is intended for tests and tooling.
    """
    target_path = config_path or CONFIG_PATH

    raw_data: dict[str, Any] = {}
    if target_path.exists():
        _enforce_private_permissions(target_path)
        try:
            raw_data = tomllib.loads(target_path.read_text(encoding="utf-8"))
        except Exception as exc:  # noqa: BLE001 - we must not crash on invalid user config.
            LOGGER.warning("Failed to parse config at %s: %s", target_path, exc)
            raw_data = {}

    merged = (
        _deep_merge(DEFAULT_CONFIG, raw_data)
        if isinstance(raw_data, dict)
        else _safe_default_config()
    )
    return _apply_environment(_validate_config(merged))


def write_default_config(config_path: Path | None = None, overwrite: bool = False) -> Path:
    """Write the default configuration as TOML and return its path."""
    target_path = config_path or CONFIG_PATH
    ensure_config_dir(target_path.parent)
    if target_path.exists() and not overwrite:
        raise ConfigValidationError(f"Refusing to overwrite existing config at {target_path}")
    target_path.write_text(tomli_w.dumps(_safe_default_config()), encoding="utf-8")
    _enforce_private_permissions(target_path)
    LOGGER.info(
        "config.written",
        extra={"event": "config.written", "path": str(target_path)},
    )
    return target_path
