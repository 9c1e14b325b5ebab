"""
Rationalizability of observed choices in single-agent decision problems,
with sure and true dominance by deviation plans.
"""

from .dominance import (
    DeviationPlan,
    DominanceResult,
    dominance_slack,
    is_surely_dominated,
    is_truly_dominated,
    plan_from_strategy,
)
from .io import load_problem, problem_from_dict, problem_to_dict
from .problem import DECISION_MAKER, DecisionProblem, additive_problem
from .verdict import RationalizabilityVerdict, is_rationalizable

__all__ = [
    "DeviationPlan",
    "DominanceResult",
    "dominance_slack",
    "is_surely_dominated",
    "is_truly_dominated",
    "plan_from_strategy",
    "load_problem",
    "problem_from_dict",
    "problem_to_dict",
    "DECISION_MAKER",
    "DecisionProblem",
    "additive_problem",
    "RationalizabilityVerdict",
    "is_rationalizable",
]
