"""
BCE membership, extreme payoffs and direct verification of mixtures.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import ShapeMismatchError, SolverError
from ..core.logger import get_logger
from ..core.types import Rational, format_rational, parse_rational
from ..games.base import BaseGame, OutcomeDistribution, payoff_vector
from ..lp.simplex import feasible_point, solve
from .feedback import BCEMixture
from .mediated import (
    DeviationStrategy,
    best_response,
    consistent_with,
    count_deviations,
    enumerate_deviations,
    obeys,
    traverse,
)
from .obedience import ObedienceLP, SolverOptions, assemble_obedience_lp

logger = get_logger(__name__)

ZERO = Fraction(0)


class MembershipResult(BaseModel):
    """Answer of a membership test."""

    member: bool = Field(..., description="Target is induced by some BCE")
    witness: Optional[BCEMixture] = Field(default=None, description="Obedient mixture when member")
    one_sided: bool = Field(
        default=False, description="Negative answer only holds for the restricted family"
    )
    reason: str = Field(default="", description="Why the target is rejected")

    model_config = ConfigDict(arbitrary_types_allowed=True)


class DirectionResult(BaseModel):
    """Maximum of a weighted payoff sum over the BCE polytope."""

    value: Rational
    payoffs: Tuple[Rational, ...]
    witness: BCEMixture

    model_config = ConfigDict(arbitrary_types_allowed=True)


@dataclass
class Violation:
    """A pure deviation that beats obedience (ex-ante, total payoffs)."""

    player: object
    deviation: DeviationStrategy
    obedient_payoff: Fraction
    deviation_payoff: Fraction

    @property
    def gain(self) -> Fraction:
        return self.deviation_payoff - self.obedient_payoff

    def describe(self) -> str:
        return (
            f"player {self.player}: {self.deviation.describe()} "
            f"({format_rational(self.deviation_payoff)} > {format_rational(self.obedient_payoff)})"
        )


# ============================================================================
# Membership
# ============================================================================


def outcome_of(problem: ObedienceLP, solution: Sequence[Fraction]) -> OutcomeDistribution:
    """Obedient outcome distribution of an LP point."""
    return OutcomeDistribution.from_pairs(
        (z, sum((c * solution[k] for k, c in form.items()), ZERO))
        for z, form in problem.outcome.items()
    )


def membership_test(
    game: BaseGame,
    target: OutcomeDistribution,
    options: Optional[SolverOptions] = None,
) -> MembershipResult:
    """
    Decide whether ``target`` is the outcome distribution of some BCE.

    Raises:
        ShapeMismatchError: If ``target`` does not sum to 1
        CapExceededError: If enumeration exceeds a cap
    """
    if target.total != 1:
        raise ShapeMismatchError(f"Target sums to {format_rational(target.total)}, not 1")
    tree = game.tree()
    outside = [z for z in target.support if z not in tree.index]
    if outside:
        return MembershipResult(
            member=False, reason=f"target puts mass outside HΩ at {outside[0].describe()}"
        )

    problem = assemble_obedience_lp(game, options)
    lp = problem.with_objective({})
    for z in tree.terminals:
        row = problem.outcome.get(z, {})
        p = target.probability(z)
        if not row:
            if p:
                return MembershipResult(
                    member=False, reason=f"{z.describe()} is never reached under obedience"
                )
            continue
        lp.add_equality(row, p)

    result = feasible_point(lp)
    if not result.optimal:
        reason = (
            "no mixture over the supplied rules reproduces the target"
            if problem.restricted
            else "no obedient mixture reproduces the target"
        )
        logger.info("Membership: not a member (%s)", reason)
        return MembershipResult(member=False, one_sided=problem.restricted, reason=reason)

    witness = problem.decode(result.solution)
    logger.info("Membership: member, witness over %d rules", len(witness.support()))
    return MembershipResult(member=True, witness=witness)


# ============================================================================
# Directions
# ============================================================================


def optimize_over(problem: ObedienceLP, direction: Sequence[object]) -> DirectionResult:
    """Maximize ``direction · u`` over an assembled obedience LP."""
    weights = [parse_rational(d) for d in direction]
    lp = problem.with_objective(problem.direction_objective(weights))
    result = solve(lp)
    if not result.optimal:
        raise SolverError(f"Obedience LP is {result.status} in direction {weights}")
    x = result.solution
    payoffs = tuple(sum((c * x[k] for k, c in form.items()), ZERO) for form in problem.payoff)
    assert result.value is not None
    return DirectionResult(value=result.value, payoffs=payoffs, witness=problem.decode(x))


def optimize_direction(
    game: BaseGame, direction: Sequence[object], options: Optional[SolverOptions] = None
) -> DirectionResult:
    """
    Maximize the weighted sum of expected payoffs over all BCE.

    Raises:
        ShapeMismatchError: If ``direction`` has the wrong length
        SolverError: If the obedience LP is infeasible or unbounded
    """
    problem = assemble_obedience_lp(game, options)
    result = optimize_over(problem, direction)
    logger.info("Direction %s: value %s", list(direction), format_rational(result.value))
    return result


# ============================================================================
# Verification
# ============================================================================


def verify_bce(game: BaseGame, mixture: BCEMixture, cap: Optional[int] = None) -> List[Violation]:
    """
    Check every obedience constraint of ``mixture`` exactly.

    When a player's pure deviations number at most ``cap`` every profitable
    one is listed; otherwise only a best response is reported.

    Raises:
        ShapeMismatchError: If the mixture does not sum to 1
    """
    if mixture.total != 1:
        raise ShapeMismatchError(f"Mixture sums to {format_rational(mixture.total)}, not 1")
    if cap is None:
        from ..core.config import config

        cap = config.limits.deviations
    nodes = mixture.start_nodes(game)
    violations: List[Violation] = []
    for i, player in enumerate(game.players):
        leaves = list(traverse(game, nodes, deviator=i, branch=True))
        br = best_response(game, leaves, i)
        if br.gain <= 0:
            continue
        if count_deviations(game, i) > cap:
            violations.append(Violation(player, br.strategy, br.obedient_value, br.value))
            continue
        values = [
            (leaf.path, payoff_vector(game, leaf.terminal)[i] * leaf.weight) for leaf in leaves
        ]
        obedient = sum((v for path, v in values if obeys(path)), ZERO)
        for g in enumerate_deviations(game, i, cap):
            value = sum((v for path, v in values if consistent_with(path, g.choices)), ZERO)
            if value > obedient:
                violations.append(Violation(player, g, obedient, value))
    logger.info("verify_bce: %d violated rows", len(violations))
    return violations


__all__ = [
    "MembershipResult",
    "DirectionResult",
    "Violation",
    "outcome_of",
    "membership_test",
    "optimize_over",
    "optimize_direction",
    "verify_bce",
]
