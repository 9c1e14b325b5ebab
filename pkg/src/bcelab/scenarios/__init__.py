"""
Built-in scenarios: the worked examples and the bargaining application, with
exactly checked claims.
"""

from .catalog import (
    BargainingParameters,
    bargaining_game,
    bargaining_parameters,
    bargaining_vertices,
)
from .runner import SCENARIOS, ClaimResult, Scenario, ScenarioReport, available, build, run

__all__ = [
    "BargainingParameters",
    "bargaining_game",
    "bargaining_parameters",
    "bargaining_vertices",
    "SCENARIOS",
    "ClaimResult",
    "Scenario",
    "ScenarioReport",
    "available",
    "build",
    "run",
]
