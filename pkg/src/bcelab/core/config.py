"""
Configuration management for bce-lab.

This module provides a thread-safe configuration manager that loads settings
from a YAML file, a ``.env`` file and ``BCELAB_*`` environment variables.
"""

import os
import threading
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigurationError
from .types import (
    DEFAULT_AUTO_DEVIATION_LIMIT,
    DEFAULT_AUTO_RULE_LIMIT,
    DEFAULT_CAP_DEVIATIONS,
    DEFAULT_CAP_HISTORIES,
    DEFAULT_CAP_RULES,
    DEFAULT_CAP_STRATEGIES,
    DEFAULT_CONFIG_PATH,
    DEFAULT_DIRECTIONS,
    DEFAULT_LOG_LEVEL,
    DEFAULT_LOG_PATH,
    LOG_LEVELS,
)

# ============================================================================
# Pydantic Configuration Models
# ============================================================================


class LimitsConfig(BaseModel):
    """Enumeration caps."""

    histories: int = Field(
        default=DEFAULT_CAP_HISTORIES, ge=1, description="Maximum number of terminal histories"
    )
    rules: int = Field(default=DEFAULT_CAP_RULES, ge=1, description="Maximum feedback rules")
    deviations: int = Field(
        default=DEFAULT_CAP_DEVIATIONS, ge=1, description="Maximum pure deviation strategies"
    )
    strategies: int = Field(
        default=DEFAULT_CAP_STRATEGIES, ge=1, description="Maximum pure strategies per player"
    )

    model_config = ConfigDict(extra="allow")


class SolverConfig(BaseModel):
    """Obedience LP assembly and polytope settings."""

    auto_rule_limit: int = Field(
        default=DEFAULT_AUTO_RULE_LIMIT,
        ge=1,
        description="Largest rule count for which 'auto' uses the feedback-rule encoding",
    )
    auto_deviation_limit: int = Field(
        default=DEFAULT_AUTO_DEVIATION_LIMIT,
        ge=1,
        description="Largest deviation count for which 'auto' uses pure deviation rows",
    )
    directions: int = Field(
        default=DEFAULT_DIRECTIONS, ge=4, le=4096, description="Initial polytope directions"
    )
    lp_dump_dir: Optional[str] = Field(
        default=None, description="Directory receiving a text dump of every LP solved"
    )

    model_config = ConfigDict(extra="allow")


class OutputConfig(BaseModel):
    """Report and plot output settings."""

    svg_width: float = Field(default=6.0, gt=0, description="SVG width in inches")
    svg_height: float = Field(default=6.0, gt=0, description="SVG height in inches")
    feasible_color: str = Field(default="#d9d9d9", description="Fill of the feasible hull")
    bce_color: str = Field(default="#7f7f7f", description="Fill of the equilibrium hull")
    show_labels: bool = Field(default=True, description="Annotate hull vertices")

    model_config = ConfigDict(extra="allow")


class LoggingConfig(BaseModel):
    """Logging configuration."""

    level: str = Field(default=DEFAULT_LOG_LEVEL, description="Logging level")
    file_path: str = Field(default=DEFAULT_LOG_PATH, description="Log file path")
    max_size_mb: int = Field(default=10, ge=1, le=100, description="Maximum log file size in MB")
    backup_count: int = Field(default=5, ge=0, le=20, description="Number of backup log files")
    format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log format string",
    )
    console_output: bool = Field(default=True, description="Enable console output")
    file_output: bool = Field(default=False, description="Enable file output")
    structured: bool = Field(default=False, description="Enable structured logging (JSON)")

    @field_validator("level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        if v.upper() not in LOG_LEVELS:
            raise ValueError(f"Invalid log level: {v}")
        return v.upper()

    model_config = ConfigDict(extra="allow")


class LabConfig(BaseModel):
    """Complete bce-lab configuration."""

    limits: LimitsConfig = Field(default_factory=LimitsConfig, description="Enumeration caps")
    solver: SolverConfig = Field(default_factory=SolverConfig, description="Solver settings")
    output: OutputConfig = Field(default_factory=OutputConfig, description="Output settings")
    logging: LoggingConfig = Field(
        default_factory=LoggingConfig, description="Logging configuration"
    )

    model_config = ConfigDict(extra="allow")


class EnvOverrides(BaseSettings):
    """Environment variables recognised by bce-lab (prefix ``BCELAB_``)."""

    cap_histories: Optional[int] = None
    cap_rules: Optional[int] = None
    cap_deviations: Optional[int] = None
    cap_strategies: Optional[int] = None
    log_level: Optional[str] = None
    lp_dump_dir: Optional[str] = None

    model_config = SettingsConfigDict(env_prefix="BCELAB_", extra="ignore")

    def as_sections(self) -> Dict[str, Dict[str, Any]]:
        """Map the flat variables onto configuration sections."""
        mapping = {
            "cap_histories": ("limits", "histories"),
            "cap_rules": ("limits", "rules"),
            "cap_deviations": ("limits", "deviations"),
            "cap_strategies": ("limits", "strategies"),
            "log_level": ("logging", "level"),
            "lp_dump_dir": ("solver", "lp_dump_dir"),
        }
        sections: Dict[str, Dict[str, Any]] = {}
        for attr, (section, key) in mapping.items():
            value = getattr(self, attr)
            if value is not None:
                sections.setdefault(section, {})[key] = value
        return sections


# ============================================================================
# Configuration Manager
# ============================================================================


class Config:
    """
    Thread-safe configuration manager.

    Sources, in increasing priority:
    - YAML configuration file (``BCELAB_CONFIG`` or ``config/bcelab.yaml``)
    - ``.env`` file in the working directory
    - ``BCELAB_*`` environment variables
    - programmatic overrides (command-line flags)
    """

    _instance: Optional["Config"] = None
    _lock: threading.RLock = threading.RLock()

    def __new__(cls) -> "Config":
        """Singleton pattern with thread safety."""
        with cls._lock:
            if cls._instance is None:
                cls._instance = super().__new__(cls)
                cls._instance._initialized = False
            return cls._instance

    def __init__(self) -> None:
        """Initialize configuration (only once)."""
        if getattr(self, "_initialized", False):
            return

        self._initialized = True
        self._yaml_data: Dict[str, Any] = {}
        self._overrides: Dict[str, Dict[str, Any]] = {}
        self._lab_config: Optional[LabConfig] = None
        self.config_path: Path = Path(DEFAULT_CONFIG_PATH)

        self.load()

    def load(self, config_path: Optional[Path] = None) -> None:
        """
        Load all configuration from files and environment.

        Args:
            config_path: Explicit YAML path; defaults to ``BCELAB_CONFIG`` or the
                standard location

        Raises:
            ConfigurationError: If a file is malformed or a value is invalid
        """
        with self._lock:
            load_dotenv(override=False)
            if config_path is not None:
                self.config_path = Path(config_path)
            elif "BCELAB_CONFIG" in os.environ:
                self.config_path = Path(os.environ["BCELAB_CONFIG"])

            self._load_yaml_config()
            self._merge_env_variables()
            self._merge_overrides()
            self._validate_config()

    def reload(self) -> None:
        """Reload from the current sources, dropping programmatic overrides."""
        with self._lock:
            self._overrides = {}
            self.load()

    def override(self, **section_updates: Dict[str, Any]) -> None:
        """
        Apply programmatic overrides, e.g. ``override(limits={"rules": 10})``.

        Raises:
            ConfigurationError: If the result does not validate
        """
        with self._lock:
            for section, values in section_updates.items():
                self._overrides.setdefault(section, {}).update(values)
            self._merge_overrides()
            self._validate_config()

    def _load_yaml_config(self) -> None:
        """Load YAML configuration file (absent file means defaults)."""
        if not self.config_path.exists():
            self._yaml_data = {}
            return

        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Malformed configuration file {self.config_path}: {e}")
        if not isinstance(data, dict):
            raise ConfigurationError(f"Configuration file {self.config_path} is not a mapping")
        self._yaml_data = data

    def _merge_env_variables(self) -> None:
        """Merge ``BCELAB_*`` environment variables into configuration."""
        try:
            env = EnvOverrides()
        except Exception as e:
            raise ConfigurationError(f"Invalid BCELAB_* environment variable: {e}")
        for section, values in env.as_sections().items():
            self._yaml_data.setdefault(section, {})
            self._yaml_data[section].update(values)

    def _merge_overrides(self) -> None:
        for section, values in self._overrides.items():
            self._yaml_data.setdefault(section, {})
            self._yaml_data[section].update(values)

    def _validate_config(self) -> None:
        """Validate and create LabConfig object."""
        try:
            self._lab_config = LabConfig(**self._yaml_data)
        except Exception as e:
            raise ConfigurationError(f"Configuration validation failed: {e}")

    @property
    def limits(self) -> LimitsConfig:
        """Get enumeration caps."""
        if self._lab_config is None:
            raise RuntimeError("Configuration not loaded")
        return self._lab_config.limits

    @property
    def solver(self) -> SolverConfig:
        """Get solver configuration."""
        if self._lab_config is None:
            raise RuntimeError("Configuration not loaded")
        return self._lab_config.solver

    @property
    def output(self) -> OutputConfig:
        """Get output configuration."""
        if self._lab_config is None:
            raise RuntimeError("Configuration not loaded")
        return self._lab_config.output

    @property
    def logging(self) -> LoggingConfig:
        """Get logging configuration."""
        if self._lab_config is None:
            raise RuntimeError("Configuration not loaded")
        return self._lab_config.logging

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by key (dot notation supported).

        Args:
            key: Configuration key (e.g., 'limits.rules', 'solver.directions')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        if self._lab_config is None:
            raise RuntimeError("Configuration not loaded")

        value: Any = self._lab_config.model_dump()
        for k in key.split("."):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert configuration to dictionary.

        Returns:
            Dictionary representation of configuration
        """
        if self._lab_config is None:
            raise RuntimeError("Configuration not loaded")
        return self._lab_config.model_dump()

    def sections(self) -> List[str]:
        """Names of the configuration sections."""
        return list(LabConfig.model_fields)

    def __repr__(self) -> str:
        """String representation of Config."""
        return f"Config(path={self.config_path}, rules_cap={self.limits.rules})"


# Global config instance
config: Config = Config()


__all__ = [
    # Configuration models
    "LimitsConfig",
    "SolverConfig",
    "OutputConfig",
    "LoggingConfig",
    "LabConfig",
    "EnvOverrides",
    # Config manager
    "Config",
    "config",
]
