"""
Mediation ranges.

``R_{i,t}(h_i^t, â_i^{t-1})`` is the set of actions the mediator may recommend
to player ``i`` at stage ``t``. A range is given by explicit entries, by a
function, or falls back to the full action set.
"""

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from ..core.errors import RangeViolationError, ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import History, Label, PrivateHistory, Profile, StatePath, format_profile
from ..games.base import BaseGame, describe_history, project

logger = get_logger(__name__)

RangeKey = Tuple[int, int, PrivateHistory, Tuple[Label, ...]]
RangeFn = Callable[[int, int, PrivateHistory, Tuple[Label, ...]], Iterable[Label]]


@dataclass
class MediationRange:
    """
    Attributes:
        game: The base game
        table: ``{(player index, t, h_i^t, â_i^{t-1}): allowed labels}``
        rule: Optional ``rule(i, t, h_i^t, â_i^{t-1})`` used where the table is silent
    """

    game: BaseGame
    table: Dict[RangeKey, Tuple[Label, ...]] = field(default_factory=dict)
    rule: Optional[RangeFn] = None

    @classmethod
    def full(cls, game: BaseGame) -> "MediationRange":
        return cls(game)

    def allowed(
        self, player: int, t: int, own: PrivateHistory, past: Tuple[Label, ...]
    ) -> Tuple[Label, ...]:
        key = (player, t, tuple(own), tuple(past))
        if key in self.table:
            labels = self.table[key]
        elif self.rule is not None:
            labels = tuple(self.rule(player, t, tuple(own), tuple(past)))
        else:
            return self.game.actions[player][t - 1]
        if not labels:
            raise ShapeMismatchError(
                f"Empty mediation range for player {self.game.players[player]} at stage {t}"
            )
        unknown = [a for a in labels if a not in self.game.actions[player][t - 1]]
        if unknown:
            raise ShapeMismatchError(f"Mediation range uses unknown actions {unknown}")
        return tuple(labels)

    def allowed_profiles(
        self, t: int, history: History, recommendations: Tuple[Profile, ...]
    ) -> List[Profile]:
        """``×_i R_{i,t}(h_i^t, â_i^{t-1})`` at a full history."""
        per_player = []
        for i in range(self.game.num_players):
            own = tuple(project(record, i) for record in history[:t])
            past = tuple(r[i] for r in recommendations[: t - 1])
            per_player.append(self.allowed(i, t, own, past))
        return [tuple(p) for p in itertools.product(*per_player)]

    def contains(self, history: History, recommendations: Tuple[Profile, ...]) -> bool:
        """True when every recommendation so far lies in its range."""
        for t, rec in enumerate(recommendations, start=1):
            for i in range(self.game.num_players):
                own = tuple(project(record, i) for record in history[:t])
                past = tuple(r[i] for r in recommendations[: t - 1])
                if rec[i] not in self.allowed(i, t, own, past):
                    return False
        return True

    def consistent_private(self, player: int, own: PrivateHistory, recs: Tuple[Label, ...]) -> bool:
        """Whether ``(h_i^t, â_i^t)`` uses only recommendations inside the ranges."""
        for t in range(1, len(recs) + 1):
            if recs[t - 1] not in self.allowed(player, t, own[:t], recs[: t - 1]):
                return False
        return True

    def as_allowed(self) -> Callable[[int, History, StatePath, Tuple[Profile, ...]], List[Profile]]:
        """Adapter for ``enumerate_feedback_rules(allowed=...)``."""
        return lambda t, h, w, recs: self.allowed_profiles(t, h, recs)

    def rule_violation(self, rule: object) -> Optional[str]:
        """First tree cell where ``rule`` recommends outside the ranges, if any."""
        tree = self.game.tree()
        for t, layer in enumerate(tree.prefixes, start=1):
            for h, w in layer:
                recs = rule.on_path(self.game, h, w)  # type: ignore[attr-defined]
                allowed = self.allowed_profiles(t, h, recs)
                if tuple(recs[-1]) not in allowed:
                    shown = format_profile(recs[-1])
                    return f"stage {t}, {describe_history(h, w)}: {shown} outside range"
        return None

    def check_mixture(self, mixture: object) -> None:
        """
        Raises:
            RangeViolationError: If a supported rule leaves the ranges
        """
        for entry in mixture.support():  # type: ignore[attr-defined]
            problem = self.rule_violation(entry.rule)
            if problem:
                logger.warning("Rule %s violates the mediation ranges", entry.rule.describe())
                raise RangeViolationError(f"{entry.rule.describe()}: {problem}")


__all__ = ["RangeKey", "RangeFn", "MediationRange"]
