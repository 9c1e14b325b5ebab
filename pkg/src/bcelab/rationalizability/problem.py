"""
Single-agent decision problems with a constant state.

A decision problem has periods ``1..T``, an action set per period, a finite
state set drawn once and never changing, and a utility over complete action
profiles and states.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from ..core.errors import GameValidationError, ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import NO_SIGNAL, History, Label, Profile, StatePath, format_rational
from ..games.base import BaseGame, TerminalHistory

logger = get_logger(__name__)

ActionPath = Tuple[Label, ...]
DECISION_MAKER = "dm"


@dataclass(frozen=True, eq=False)
class DecisionProblem:
    """
    Attributes:
        actions: ``actions[t-1]`` is ``A_t``
        states: ``Ω``
        utility: ``{(a_1..a_T, ω): u}``, total on ``A × Ω``
        name: Display name
    """

    actions: Tuple[Tuple[Label, ...], ...]
    states: Tuple[Label, ...]
    utility: Mapping[Tuple[ActionPath, Label], Fraction]
    name: str = "problem"
    _cache: Dict[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.actions:
            raise GameValidationError("A decision problem needs at least one period")
        for t, labels in enumerate(self.actions, start=1):
            if not labels or len(set(labels)) != len(labels):
                raise GameValidationError(f"Action set of period {t} is empty or repeats labels")
        if not self.states or len(set(self.states)) != len(self.states):
            raise GameValidationError("State set is empty or repeats labels")
        missing = [
            (a, w) for a in self.profiles() for w in self.states if (a, w) not in self.utility
        ]
        if missing:
            a, w = missing[0]
            raise GameValidationError(f"Utility missing at {','.join(map(str, a))} in state {w}")

    @property
    def periods(self) -> int:
        return len(self.actions)

    def profiles(self) -> List[ActionPath]:
        return [tuple(a) for a in itertools.product(*self.actions)]

    def u(self, profile: Sequence[Label], state: Label) -> Fraction:
        return Fraction(self.utility[(tuple(profile), state)])

    def check_target(self, target: Sequence[Label]) -> ActionPath:
        """
        Raises:
            ShapeMismatchError: If ``target`` is not an action profile of the problem
        """
        target = tuple(target)
        if len(target) != self.periods or any(a not in A for a, A in zip(target, self.actions)):
            raise ShapeMismatchError(f"{','.join(map(str, target))} is not an action profile")
        return target

    def as_game(self) -> BaseGame:
        """
        One player without signals; the state is drawn uniformly at stage 1
        and kept. The uniform prior only fixes the support: rationalizability
        mixes over states freely.
        """
        if "game" in self._cache:
            return self._cache["game"]
        T = self.periods
        p = Fraction(1, len(self.states))

        def transition(t: int, action: Profile, history: History, states: StatePath) -> Dict:
            return {((tuple(action), (NO_SIGNAL,)), states[-1]): Fraction(1)}

        def payoff(terminal: TerminalHistory) -> Tuple[Fraction]:
            return (self.u(tuple(a[0] for a in terminal.actions), terminal.states[0]),)

        game = BaseGame(
            players=(DECISION_MAKER,),
            actions=(tuple(tuple(labels) for labels in self.actions),),
            signals=(tuple((NO_SIGNAL,) for _ in range(T)),),
            states=tuple(tuple(self.states) for _ in range(T)),
            initial={((NO_SIGNAL,), w): p for w in self.states},
            transition=transition,
            payoff=payoff,
            name=self.name,
        )
        self._cache["game"] = game
        return game

    def lines(self) -> List[str]:
        out = [f"{self.name}: {self.periods} periods, states {', '.join(map(str, self.states))}"]
        for a in self.profiles():
            values = "  ".join(f"{w}: {format_rational(self.u(a, w))}" for w in self.states)
            out.append(f"  {','.join(map(str, a))}  {values}")
        return out


def additive_problem(
    actions: Sequence[Sequence[Label]],
    states: Sequence[Label],
    stage_payoff: Mapping[Tuple[int, Label, Label], Fraction],
    name: str = "problem",
) -> DecisionProblem:
    """Utility as the sum over periods of ``stage_payoff[(t, a_t, ω)]``."""
    utility: Dict[Tuple[ActionPath, Label], Fraction] = {}
    for profile in itertools.product(*actions):
        for w in states:
            try:
                utility[(tuple(profile), w)] = sum(
                    (Fraction(stage_payoff[(t, a, w)]) for t, a in enumerate(profile, start=1)),
                    Fraction(0),
                )
            except KeyError as e:
                raise GameValidationError(f"Stage payoff missing at {e.args[0]}")
    return DecisionProblem(tuple(tuple(a) for a in actions), tuple(states), utility, name)


__all__ = ["ActionPath", "DECISION_MAKER", "DecisionProblem", "additive_problem"]
