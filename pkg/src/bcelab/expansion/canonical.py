"""
Canonical expansions and best-response checks in induced games.

The canonical expansion of a Bayes correlated equilibrium uses the
recommendations as messages: ``M_{i,t} = A_{i,t}`` and ``ξ_t`` equal to the
equilibrium's behavioral recommendation kernels.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from ..core.errors import NotObedientError, ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import Label, PrivateHistory, format_rational
from ..games.base import (
    BaseGame,
    Behavior,
    OutcomeDistribution,
    enumerate_pure_strategies,
    play,
    pure_behavior,
)
from ..bce.feedback import BCEMixture
from ..bce.solver import verify_bce
from ..refinements.kernels import kernels_from_mixture
from .kernels import Expansion, KernelFamily, induce_game

logger = get_logger(__name__)

ONE = Fraction(1)

PureStrategy = Dict[Tuple[int, PrivateHistory], Label]


def canonical_expansion(game: BaseGame, mixture: BCEMixture) -> Expansion:
    """
    Messages are recommendations; ``ξ_t(h^t, m^{t-1}, w^t)`` is the
    conditional-frequency kernel of ``mixture``, uniform off the tree.

    Raises:
        NotObedientError: If ``mixture`` fails ``verify_bce``
    """
    violations = verify_bce(game, mixture)
    if violations:
        logger.warning("canonical_expansion: %d obedience violations", len(violations))
        raise NotObedientError(violations[0].describe())
    kernels = kernels_from_mixture(game, mixture)
    messages = tuple(tuple(tuple(row) for row in game.actions[i]) for i in range(game.num_players))
    return Expansion(
        messages,
        lambda t, h, m, w: kernels.row(t, h, w, m),
        f"canonical({len(mixture.support())} rules)",
    )


def follow_messages(
    family: KernelFamily, mapping: Optional[Sequence[Mapping[Label, Label]]] = None
) -> List[Behavior]:
    """
    Play the stage message: player ``i`` chooses ``mapping[i][m]`` on message
    ``m`` (the message itself when no mapping is given).
    """
    strategies: List[Behavior] = []
    for i in range(family.game.num_players):
        table = dict(mapping[i]) if mapping is not None else {}

        def behavior(
            t: int, own: PrivateHistory, table: Dict[Label, Label] = table
        ) -> Dict[Label, Fraction]:
            m = own[t - 1][-1][1]
            return {table.get(m, m): ONE}

        strategies.append(behavior)
    return strategies


@dataclass(frozen=True)
class ProfitableDeviation:
    """A pure strategy beating the profile for one player."""

    player: object
    strategy: Tuple[Tuple[Tuple[int, PrivateHistory], Label], ...]
    baseline: Fraction
    value: Fraction

    @property
    def gain(self) -> Fraction:
        return self.value - self.baseline

    def describe(self) -> str:
        moves = ", ".join(f"t{t} {own!r} -> {a}" for (t, own), a in self.strategy)
        return (
            f"player {self.player}: {format_rational(self.value)} > "
            f"{format_rational(self.baseline)} with [{moves}]"
        )


def best_response_check(
    induced: Union[KernelFamily, BaseGame],
    strategies: Sequence[Behavior],
    cap: Optional[int] = None,
) -> List[ProfitableDeviation]:
    """
    Every pure strategy that strictly improves a player's expected payoff
    against ``strategies``; empty iff the profile is a Bayes-Nash equilibrium.

    Raises:
        CapExceededError: If a player has more than ``cap`` pure strategies
    """
    game = induced.game if isinstance(induced, KernelFamily) else induced
    if len(strategies) != game.num_players:
        raise ShapeMismatchError(f"Expected {game.num_players} strategies")
    baseline = play(game, strategies).expected_payoffs(game)
    found: List[ProfitableDeviation] = []
    for i, player in enumerate(game.players):
        for pure in enumerate_pure_strategies(game, player, cap):
            profile = list(strategies)
            profile[i] = pure_behavior(pure)
            value = play(game, profile).expected_payoffs(game)[i]
            if value > baseline[i]:
                found.append(ProfitableDeviation(player, tuple(pure.items()), baseline[i], value))
    logger.info("best_response_check %s: %d profitable deviations", game.name, len(found))
    return found


def optimal_value(game: BaseGame, player: object = 0, cap: Optional[int] = None) -> Fraction:
    """Best expected payoff of a single player over its pure strategies."""
    if game.num_players != 1:
        raise ShapeMismatchError("optimal_value needs a single-player game")
    return max(
        play(game, [pure_behavior(s)]).expected_payoffs(game)[0]
        for s in enumerate_pure_strategies(game, player, cap)
    )


def obedient_outcome(game: BaseGame, expansion: Expansion) -> OutcomeDistribution:
    """Base-game outcome when every player follows the messages of ``expansion``."""
    induced = induce_game(game, expansion)
    return induced.base_outcome(play(induced.game, follow_messages(induced)))


__all__ = [
    "PureStrategy",
    "ProfitableDeviation",
    "canonical_expansion",
    "follow_messages",
    "best_response_check",
    "optimal_value",
    "obedient_outcome",
]
