"""
Core module for bce-lab.

This module provides the foundational components for configuration,
logging, errors and type definitions.
"""

from .config import (
    Config,
    EnvOverrides,
    LabConfig,
    LimitsConfig,
    LoggingConfig,
    OutputConfig,
    SolverConfig,
    config,
)
from .errors import (
    BceLabError,
    CapExceededError,
    ConfigurationError,
    GameFileError,
    GameValidationError,
    NotObedientError,
    RangeViolationError,
    ScenarioParameterError,
    ShapeMismatchError,
    SolverError,
    UnknownPlayerError,
    UnknownScenarioError,
)
from .logger import (
    LabLogger,
    get_global_logger,
    get_logger,
    setup_global_logger,
)
from .types import (
    DEFAULT_CONFIG_PATH,
    DEFAULT_LOG_LEVEL,
    DEFAULT_LOG_PATH,
    LOG_LEVELS,
    NO_SIGNAL,
    History,
    Label,
    PrivateHistory,
    Profile,
    Rational,
    StageRecord,
    StatePath,
    format_profile,
    format_rational,
    format_vector,
    parse_rational,
)

__all__ = [
    # Types
    "Rational",
    "Label",
    "Profile",
    "StageRecord",
    "History",
    "StatePath",
    "PrivateHistory",
    "parse_rational",
    "format_rational",
    "format_vector",
    "format_profile",
    # Constants
    "NO_SIGNAL",
    "DEFAULT_LOG_LEVEL",
    "LOG_LEVELS",
    "DEFAULT_CONFIG_PATH",
    "DEFAULT_LOG_PATH",
    # Errors
    "BceLabError",
    "CapExceededError",
    "ConfigurationError",
    "GameFileError",
    "GameValidationError",
    "NotObedientError",
    "RangeViolationError",
    "ScenarioParameterError",
    "ShapeMismatchError",
    "SolverError",
    "UnknownPlayerError",
    "UnknownScenarioError",
    # Logger
    "LabLogger",
    "get_logger",
    "setup_global_logger",
    "get_global_logger",
    # Config
    "Config",
    "config",
    "LimitsConfig",
    "SolverConfig",
    "OutputConfig",
    "LoggingConfig",
    "LabConfig",
    "EnvOverrides",
]
