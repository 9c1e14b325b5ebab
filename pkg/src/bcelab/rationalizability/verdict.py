"""
Rationalizability of an observed choice profile.

A profile ``a*`` is rationalizable when some joint distribution over
feedback rules and states is obedient and recommends ``a*`` with positive
probability. The answer is ``max μ(F*)`` over the obedience LP with a free
prior; when the optimum is zero the sure-dominance LP supplies the plan
that rules ``a*`` out.
"""

from fractions import Fraction
from typing import Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from ..bce.feedback import BCEMixture
from ..bce.obedience import SolverOptions, assemble_obedience_lp
from ..core.errors import SolverError
from ..core.logger import get_logger
from ..core.types import Label, Rational, format_rational
from ..lp.simplex import solve
from .dominance import DeviationPlan, is_surely_dominated
from .problem import ActionPath, DecisionProblem

logger = get_logger(__name__)

ZERO = Fraction(0)


class RationalizabilityVerdict(BaseModel):
    """
    Attributes:
        target: The observed profile
        status: ``rationalizable``, ``dominated`` or ``boundary`` (neither LP certifies)
        value: Exact optimum of ``μ(F*)``
        witness: Obedient mixture over rules and states when rationalizable
        plan: Surely dominating deviation plan when dominated
    """

    target: ActionPath
    status: Literal["rationalizable", "dominated", "boundary"]
    value: Rational = Field(default=ZERO)
    witness: Optional[BCEMixture] = None
    plan: Optional[DeviationPlan] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def rationalizable(self) -> bool:
        return self.status == "rationalizable"

    def lines(self) -> List[str]:
        label = ",".join(map(str, self.target))
        out = [f"{label}: {self.status} (max μ(F*) = {format_rational(self.value)})"]
        if self.witness is not None:
            out += ["  " + line for line in self.witness.describe()]
        if self.plan is not None:
            out += ["  " + line for line in self.plan.lines()]
        return out


def is_rationalizable(
    problem: DecisionProblem,
    target: Sequence[Label],
    options: Optional[SolverOptions] = None,
) -> RationalizabilityVerdict:
    """
    Raises:
        ShapeMismatchError: If ``target`` is not an action profile
        CapExceededError: If rule or deviation enumeration exceeds a cap
        SolverError: If the obedience LP does not solve
    """
    goal = problem.check_target(target)
    game = problem.as_game()
    settings = (options or SolverOptions()).model_copy(update={"free_prior": True})
    obedience = assemble_obedience_lp(game, settings)

    objective: Dict[int, Fraction] = {}
    for terminal, form in obedience.outcome.items():
        if tuple(a[0] for a in terminal.actions) != goal:
            continue
        for col, c in form.items():
            objective[col] = objective.get(col, ZERO) + c
    logger.debug(
        "Rationalizability LP for %s: %d columns, %d rows",
        ",".join(map(str, goal)), obedience.num_mixture_vars, obedience.lp.num_constraints,
    )

    result = solve(obedience.with_objective(objective))
    if not result.optimal or result.solution is None or result.value is None:
        raise SolverError(f"Rationalizability LP is {result.status}")

    if result.value > 0:
        logger.info("%s is rationalizable (μ(F*) = %s)", goal, format_rational(result.value))
        return RationalizabilityVerdict(
            target=goal, status="rationalizable", value=result.value,
            witness=obedience.decode(result.solution),
        )

    dominance = is_surely_dominated(problem, goal)
    if dominance.dominated:
        return RationalizabilityVerdict(target=goal, status="dominated", plan=dominance.plan)
    logger.warning("%s is neither rationalizable nor surely dominated", goal)
    return RationalizabilityVerdict(target=goal, status="boundary")


__all__ = ["RationalizabilityVerdict", "is_rationalizable"]
