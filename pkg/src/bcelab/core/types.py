"""
Core type definitions for bce-lab.

This module defines the exact-arithmetic carrier, the history aliases shared by
every solver module, and the package-wide constants.
"""

from fractions import Fraction
from typing import Annotated, Any, Hashable, Iterable, Mapping, Tuple

from pydantic import PlainSerializer, PlainValidator

# ============================================================================
# Rational Numbers
# ============================================================================


def parse_rational(value: Any) -> Fraction:
    """
    Parse an exact rational number.

    Accepts integers, fractions and strings such as ``"3"``, ``"-5/2"`` or
    ``"0.25"``. Floats are rejected because they are not exact.

    Args:
        value: Raw value

    Returns:
        The value as a Fraction in lowest terms

    Raises:
        ValueError: If the value is not an exact rational
    """
    if isinstance(value, bool):
        raise ValueError(f"Not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError(f"Floating-point value {value!r} is not exact; write it as 'num/den'")
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"Not a rational number: {value!r}") from exc
    raise ValueError(f"Not a rational number: {value!r}")


def format_rational(value: Any) -> str:
    """Format a rational as ``num/den`` (denominator always written)."""
    q = parse_rational(value)
    return f"{q.numerator}/{q.denominator}"


def format_vector(values: Iterable[Any]) -> str:
    """Format a vector of rationals as ``(a/b, c/d)``."""
    return "(" + ", ".join(format_rational(v) for v in values) + ")"


def format_profile(profile: Iterable[Any]) -> str:
    """Format an action or signal profile as ``(T,-)``."""
    return "(" + ",".join(str(x) for x in profile) + ")"


Rational = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]


# ============================================================================
# History Types
# ============================================================================

# Labels of actions, signals, states and messages (strings in files)
Label = Hashable

# One entry per player, in player order
Profile = Tuple[Label, ...]

# (recalled action profile of the previous stage, signal profile of this stage);
# the recalled part is empty at stage 1 and the signal part is empty at stage T+1
StageRecord = Tuple[Profile, Profile]

History = Tuple[StageRecord, ...]
StatePath = Tuple[Label, ...]

PrivateRecord = Tuple[Label, ...]
PrivateHistory = Tuple[PrivateRecord, ...]

# ((recalled actions, signals), state) drawn by a kernel
Outcome = Tuple[StageRecord, Label]
KernelRow = Mapping[Outcome, Fraction]


# ============================================================================
# Constants
# ============================================================================

# Label used for singleton signal, state and action sets
NO_SIGNAL: str = "-"

# Size caps
DEFAULT_CAP_HISTORIES: int = 10**6
DEFAULT_CAP_RULES: int = 10**5
DEFAULT_CAP_DEVIATIONS: int = 10**5
DEFAULT_CAP_STRATEGIES: int = 10**5

# Solver defaults
DEFAULT_DIRECTIONS: int = 8
DEFAULT_AUTO_RULE_LIMIT: int = 4096
DEFAULT_AUTO_DEVIATION_LIMIT: int = 4096

# Logging
DEFAULT_LOG_LEVEL: str = "WARNING"
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

# File paths
DEFAULT_CONFIG_PATH: str = "config/bcelab.yaml"
DEFAULT_LOG_PATH: str = "logs/bcelab.log"

# Exit codes of the command-line front end
EXIT_OK: int = 0
EXIT_NEGATIVE: int = 1
EXIT_USAGE: int = 2
EXIT_CAP: int = 3


__all__ = [
    # Rationals
    "parse_rational",
    "format_rational",
    "format_vector",
    "format_profile",
    "Rational",
    # History aliases
    "Label",
    "Profile",
    "StageRecord",
    "History",
    "StatePath",
    "PrivateRecord",
    "PrivateHistory",
    "Outcome",
    "KernelRow",
    # Constants
    "NO_SIGNAL",
    "DEFAULT_CAP_HISTORIES",
    "DEFAULT_CAP_RULES",
    "DEFAULT_CAP_DEVIATIONS",
    "DEFAULT_CAP_STRATEGIES",
    "DEFAULT_DIRECTIONS",
    "DEFAULT_AUTO_RULE_LIMIT",
    "DEFAULT_AUTO_DEVIATION_LIMIT",
    "DEFAULT_LOG_LEVEL",
    "LOG_LEVELS",
    "DEFAULT_CONFIG_PATH",
    "DEFAULT_LOG_PATH",
    "EXIT_OK",
    "EXIT_NEGATIVE",
    "EXIT_USAGE",
    "EXIT_CAP",
]
