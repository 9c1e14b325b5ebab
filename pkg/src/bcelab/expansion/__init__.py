"""
Expansions of a base game: induced games, consistency and factorization of
kernel families, canonical expansions and best-response checks.
"""

from .canonical import (
    ProfitableDeviation,
    best_response_check,
    canonical_expansion,
    follow_messages,
    obedient_outcome,
    optimal_value,
)
from .io import (
    information_from_dict,
    load_expansion,
    load_family,
    load_information,
    xi_table_to_dict,
)
from .kernels import (
    Expansion,
    FactorizationResult,
    InducedGame,
    KernelFamily,
    consistency_check,
    consistency_issues,
    factorization_test,
    induce_game,
    split_history,
    strip_terminal,
)

__all__ = [
    "ProfitableDeviation",
    "best_response_check",
    "canonical_expansion",
    "follow_messages",
    "obedient_outcome",
    "optimal_value",
    "information_from_dict",
    "load_expansion",
    "load_family",
    "load_information",
    "xi_table_to_dict",
    "Expansion",
    "FactorizationResult",
    "InducedGame",
    "KernelFamily",
    "consistency_check",
    "consistency_issues",
    "factorization_test",
    "induce_game",
    "split_history",
    "strip_terminal",
]
