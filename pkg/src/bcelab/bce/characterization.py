"""
Closed-form BCE conditions for two-stage sequential-move games.

Player 1 moves at stage 1, player 2 moves at stage 2 without seeing that move,
and nobody receives a signal. A distribution ``μ`` over ``A_1 × A_2`` is a BCE
outcome exactly when

* every recommendation ``a_1`` gives player 1 at least the pure max-min
  ``m = max_{a_1'} min_{a_2} u_1(a_1', a_2)`` (the mediator can punish a
  disobedient player 1 through player 2's recommendation), and
* every recommendation ``a_2`` is a best response to the posterior it induces.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from ..core.errors import ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import Label, format_rational
from ..games.base import BaseGame, OutcomeDistribution, TerminalHistory, payoff_vector

logger = get_logger(__name__)

ZERO = Fraction(0)

Pair = Tuple[Label, Label]


@dataclass
class LinearCondition:
    """``Σ coefficient · μ(a_1, a_2) >= 0`` with a readable rendering."""

    kind: str
    coefficients: Dict[Pair, Fraction]
    value: Fraction = ZERO
    text: str = ""

    @property
    def holds(self) -> bool:
        return self.value >= 0

    @property
    def trivial(self) -> bool:
        return all(c >= 0 for c in self.coefficients.values())


@dataclass
class CharacterizationReport:
    maxmin: Fraction
    conditions: List[LinearCondition] = field(default_factory=list)

    @property
    def violated(self) -> List[LinearCondition]:
        return [c for c in self.conditions if not c.holds]

    @property
    def member(self) -> bool:
        return not self.violated

    def lines(self) -> List[str]:
        out = [f"max-min of player 1: {format_rational(self.maxmin)}"]
        for c in self.conditions:
            mark = "ok" if c.holds else "VIOLATED"
            out.append(f"[{c.kind}] {c.text}: {mark}")
        return out


def _term(c: int, pair: Pair) -> str:
    mu = f"μ({pair[0]},{pair[1]})"
    return mu if c == 1 else f"{c}{mu}"


def render_condition(coefficients: Dict[Pair, Fraction]) -> str:
    """Scale to coprime integers and put negative terms on the right."""
    nonzero = {p: c for p, c in coefficients.items() if c}
    if not nonzero:
        return "0 ≥ 0"
    scale = math.lcm(*(c.denominator for c in nonzero.values()))
    ints = {p: int(c * scale) for p, c in nonzero.items()}
    g = math.gcd(*ints.values())
    ints = {p: c // g for p, c in ints.items()}
    left = " + ".join(_term(c, p) for p, c in ints.items() if c > 0) or "0"
    right = " + ".join(_term(-c, p) for p, c in ints.items() if c < 0) or "0"
    return f"{left} ≥ {right}"


def _check_shape(game: BaseGame) -> None:
    if game.num_players != 2 or game.stages != 2:
        raise ShapeMismatchError("Sequential-move conditions need 2 players and 2 stages")
    if len(game.actions[1][0]) != 1 or len(game.actions[0][1]) != 1:
        raise ShapeMismatchError("Player 1 must move only at stage 1 and player 2 only at stage 2")
    singleton = all(len(s) == 1 for row in game.signals for s in row)
    if not singleton or any(len(w) != 1 for w in game.states):
        raise ShapeMismatchError("Sequential-move conditions need singleton signals and states")


def _pair(terminal: TerminalHistory) -> Pair:
    return terminal.history[1][0][0], terminal.history[2][0][1]


def sequential_move_characterization(
    game: BaseGame, target: OutcomeDistribution
) -> CharacterizationReport:
    """
    Evaluate the two closed-form conditions on ``target``.

    Raises:
        ShapeMismatchError: If the game is not a signal-free two-stage
            sequential-move game
    """
    _check_shape(game)
    terminals = {_pair(z): z for z in game.tree().terminals}
    u = {pair: payoff_vector(game, z) for pair, z in terminals.items()}
    mu = {pair: target.probability(z) for pair, z in terminals.items()}
    first = game.actions[0][0]
    second = game.actions[1][1]

    maxmin = max(min(u[(a1, a2)][0] for a2 in second) for a1 in first)
    report = CharacterizationReport(maxmin)
    for a1 in first:
        coeffs = {(a1, a2): u[(a1, a2)][0] - maxmin for a2 in second}
        report.conditions.append(_condition("player 1 max-min", coeffs, mu))
    for a2 in second:
        for b2 in second:
            if a2 == b2:
                continue
            coeffs = {(a1, a2): u[(a1, a2)][1] - u[(a1, b2)][1] for a1 in first}
            report.conditions.append(_condition("player 2 obedience", coeffs, mu))
    logger.debug(
        "Sequential-move check: %d of %d conditions violated",
        len(report.violated),
        len(report.conditions),
    )
    return report


def _condition(
    kind: str, coeffs: Dict[Pair, Fraction], mu: Dict[Pair, Fraction]
) -> LinearCondition:
    value = sum((c * mu[p] for p, c in coeffs.items()), ZERO)
    return LinearCondition(kind, coeffs, value, render_condition(coeffs))


__all__ = [
    "LinearCondition",
    "CharacterizationReport",
    "render_condition",
    "sequential_move_characterization",
]
