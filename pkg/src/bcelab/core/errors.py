"""
Exception hierarchy for bce-lab.

Validators and verifiers report problems as data; everything else raises one
of the exceptions below. The command-line front end maps them to exit codes.
"""

from typing import Optional


class BceLabError(Exception):
    """Base class for all bce-lab errors."""


class ConfigurationError(BceLabError, ValueError):
    """Configuration file or environment override is invalid."""


class GameValidationError(BceLabError, ValueError):
    """A game, expansion or decision problem violates a structural invariant."""


class ShapeMismatchError(BceLabError, ValueError):
    """Objects passed together do not have matching shapes."""


class UnknownPlayerError(BceLabError, KeyError):
    """A player id or stage index does not exist in the game."""


class GameFileError(BceLabError, ValueError):
    """An input document could not be parsed or does not follow its schema."""


class RangeViolationError(BceLabError, ValueError):
    """A recommendation falls outside the mediation ranges."""


class NotObedientError(BceLabError, ValueError):
    """A mixture expected to be a Bayes correlated equilibrium is not obedient."""


class UnknownScenarioError(BceLabError, KeyError):
    """No built-in scenario has the requested name."""


class ScenarioParameterError(BceLabError, ValueError):
    """Scenario parameters do not satisfy the scenario's assumptions."""


class SolverError(BceLabError, RuntimeError):
    """Internal solver failure: a certificate did not check out."""


class CapExceededError(BceLabError):
    """
    An enumeration grew beyond its configured cap.

    Attributes:
        cap: Name of the cap (e.g. ``"rules"``)
        limit: Configured limit
        requested: Size that would have been needed, when known
    """

    def __init__(self, cap: str, limit: int, requested: Optional[int] = None) -> None:
        self.cap = cap
        self.limit = limit
        self.requested = requested
        size = f" (needs {requested})" if requested is not None else ""
        super().__init__(f"Cap on {cap} exceeded: limit {limit}{size}")


__all__ = [
    "BceLabError",
    "ConfigurationError",
    "GameValidationError",
    "ShapeMismatchError",
    "UnknownPlayerError",
    "GameFileError",
    "RangeViolationError",
    "NotObedientError",
    "UnknownScenarioError",
    "ScenarioParameterError",
    "SolverError",
    "CapExceededError",
]
