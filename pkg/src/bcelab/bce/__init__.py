"""
Bayes correlated equilibria: feedback rules, obedience LPs, membership,
extreme payoffs, payoff polytopes and verification.
"""

from .characterization import CharacterizationReport, sequential_move_characterization
from .feedback import (
    BCEMixture,
    FeedbackRule,
    FunctionRule,
    MixtureEntry,
    RuleBase,
    count_feedback_rules,
    enumerate_feedback_rules,
    rule_from_profile,
    tabulate,
)
from .io import (
    load_mixture,
    load_rules,
    load_target,
    mixture_to_dict,
    save_mixture,
    target_from_dict,
)
from .mediated import (
    AllRecommendations,
    BestResponse,
    DeviationStrategy,
    Mediator,
    StartNode,
    best_response,
    count_deviations,
    enumerate_deviations,
    outcome_under,
    traverse,
)
from .obedience import ObedienceLP, SolverOptions, assemble_obedience_lp, decompose_realization_plan
from .polytope import (
    PayoffPolytope,
    convex_hull,
    feasible_payoff_hull,
    payoff_polytope_2p,
    render_svg,
    write_vertices_csv,
)
from .solver import (
    DirectionResult,
    MembershipResult,
    Violation,
    membership_test,
    optimize_direction,
    optimize_over,
    outcome_of,
    verify_bce,
)

__all__ = [
    "CharacterizationReport",
    "sequential_move_characterization",
    "BCEMixture",
    "FeedbackRule",
    "FunctionRule",
    "MixtureEntry",
    "RuleBase",
    "count_feedback_rules",
    "enumerate_feedback_rules",
    "rule_from_profile",
    "tabulate",
    "load_mixture",
    "load_rules",
    "load_target",
    "mixture_to_dict",
    "save_mixture",
    "target_from_dict",
    "AllRecommendations",
    "BestResponse",
    "DeviationStrategy",
    "Mediator",
    "StartNode",
    "best_response",
    "count_deviations",
    "enumerate_deviations",
    "outcome_under",
    "traverse",
    "ObedienceLP",
    "SolverOptions",
    "assemble_obedience_lp",
    "decompose_realization_plan",
    "PayoffPolytope",
    "convex_hull",
    "feasible_payoff_hull",
    "payoff_polytope_2p",
    "render_svg",
    "write_vertices_csv",
    "DirectionResult",
    "MembershipResult",
    "Violation",
    "membership_test",
    "optimize_direction",
    "optimize_over",
    "outcome_of",
    "verify_bce",
]
