"""
Finite multi-stage base games: representation, histories, outcomes and files.
"""

from .base import (
    BaseGame,
    GameTree,
    OutcomeDistribution,
    TerminalHistory,
    ValidationIssue,
    ValidationReport,
    decision_points,
    enumerate_pure_strategies,
    enumerate_terminal_histories,
    forward,
    kuhn_reduced_strategies,
    open_loop_distribution,
    outcome_probability,
    payoff_vector,
    play,
    private_history,
    pure_behavior,
    pure_nash_equilibria,
    validate_game,
)
from .io import game_from_dict, game_to_dict, load_game, save_game

__all__ = [
    "BaseGame",
    "GameTree",
    "OutcomeDistribution",
    "TerminalHistory",
    "ValidationIssue",
    "ValidationReport",
    "decision_points",
    "enumerate_pure_strategies",
    "enumerate_terminal_histories",
    "forward",
    "kuhn_reduced_strategies",
    "open_loop_distribution",
    "outcome_probability",
    "payoff_vector",
    "play",
    "private_history",
    "pure_behavior",
    "pure_nash_equilibria",
    "validate_game",
    "game_from_dict",
    "game_to_dict",
    "load_game",
    "save_game",
]
