"""
Feedback rules and mixtures over them.

A feedback rule is a deterministic recommendation plan. In its full form the
stage-``t`` cell is ``(t, h^t, w^t, â^{t-1})``; in the reduced form the cell is
``(t, h^t, w^t)`` because a deterministic rule's past recommendations are a
function of the history it has seen.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import (
    Any,
    Callable,
    Dict,
    Hashable,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from ..core.errors import CapExceededError, ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import History, Label, PrivateHistory, Profile, StatePath, format_profile
from ..games.base import BaseGame, OutcomeDistribution, describe_history, project
from .mediated import Mediator, StartNode, traverse

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

Cell = Tuple[Any, ...]
Allowed = Callable[[int, History, StatePath, Tuple[Profile, ...]], Iterable[Profile]]


class RuleBase:
    """Deterministic mediator: subclasses implement ``choice``."""

    label: Optional[str] = None

    def choice(
        self, t: int, history: History, states: StatePath, recommendations: Tuple[Profile, ...]
    ) -> Profile:
        raise NotImplementedError

    def recommend(
        self, t: int, history: History, states: StatePath, recommendations: Tuple[Profile, ...]
    ) -> Mapping[Profile, Fraction]:
        return {tuple(self.choice(t, history, states, recommendations)): ONE}

    def on_path(self, game: BaseGame, history: History, states: StatePath) -> Tuple[Profile, ...]:
        """Recommendations this rule has made along the prefixes of ``(h^t, w^t)``."""
        recs: Tuple[Profile, ...] = ()
        for k in range(1, len(history) + 1):
            recs += (tuple(self.choice(k, history[:k], states[:k], recs)),)
        return recs

    def describe(self) -> str:
        return self.label or type(self).__name__


@dataclass(frozen=True, eq=False)
class FeedbackRule(RuleBase):
    """
    Tabulated feedback rule.

    Attributes:
        cells: ``((cell, profile), ...)`` with cells ``(t, h, w)`` when
            ``reduced`` and ``(t, h, w, â^{t-1})`` otherwise
        reduced: Cell form
        fallback: Per-stage profile used for cells not listed
        label: Optional display name
    """

    cells: Tuple[Tuple[Cell, Profile], ...]
    reduced: bool = False
    fallback: Tuple[Profile, ...] = ()
    label: Optional[str] = None

    @cached_property
    def table(self) -> Dict[Cell, Profile]:
        return dict(self.cells)

    def cell(
        self, t: int, history: History, states: StatePath, recommendations: Tuple[Profile, ...]
    ) -> Cell:
        if self.reduced:
            return (t, history, states)
        return (t, history, states, tuple(recommendations))

    def choice(
        self, t: int, history: History, states: StatePath, recommendations: Tuple[Profile, ...]
    ) -> Profile:
        key = self.cell(t, history, states, recommendations)
        if key in self.table:
            return self.table[key]
        if len(self.fallback) >= t:
            return self.fallback[t - 1]
        raise ShapeMismatchError(
            f"Feedback rule undefined at stage {t}, {describe_history(history, states)}"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeedbackRule):
            return NotImplemented
        return (self.reduced, self.table, self.fallback) == (
            other.reduced,
            other.table,
            other.fallback,
        )

    def __hash__(self) -> int:
        return hash((self.reduced, frozenset(self.table.items()), self.fallback))

    def describe(self) -> str:
        if self.label:
            return self.label
        parts = []
        for key, profile in self.cells:
            t, h, w = key[:3]
            recs = ""
            if len(key) > 3 and key[3]:
                recs = f" rec={''.join(format_profile(r) for r in key[3])}"
            parts.append(f"[t{t} {describe_history(h, w)}{recs}] -> {format_profile(profile)}")
        return "; ".join(parts)


@dataclass(frozen=True, eq=False)
class FunctionRule(RuleBase):
    """Feedback rule given by a function ``fn(t, h^t, w^t, â^{t-1}) -> profile``."""

    fn: Callable[[int, History, StatePath, Tuple[Profile, ...]], Profile]
    label: Optional[str] = None

    def choice(
        self, t: int, history: History, states: StatePath, recommendations: Tuple[Profile, ...]
    ) -> Profile:
        return tuple(self.fn(t, history, states, recommendations))


# ============================================================================
# Enumeration
# ============================================================================


def _stage_cells(
    game: BaseGame, t: int, reduced: bool
) -> List[Tuple[History, StatePath, Optional[Tuple[Profile, ...]]]]:
    prefixes = game.tree().prefixes[t - 1]
    if reduced:
        return [(h, w, None) for h, w in prefixes]
    past = list(itertools.product(*(game.action_profiles(k) for k in range(1, t))))
    return [(h, w, tuple(r)) for h, w in prefixes for r in past]


def count_feedback_rules(game: BaseGame, reduced: bool = False, limit: Optional[int] = None) -> int:
    """
    ``|F|`` as the product over cells of ``|A_t|``.

    With ``limit`` the count stops growing once it passes the limit.
    """
    total = 1
    for t in range(1, game.stages + 1):
        prefixes = len(game.tree().prefixes[t - 1])
        past = 1
        if not reduced:
            for k in range(1, t):
                past *= len(game.action_profiles(k))
        cells = prefixes * past
        options = len(game.action_profiles(t))
        for _ in range(cells):
            total *= options
            if limit is not None and total > limit:
                return total
    return total


def enumerate_feedback_rules(
    game: BaseGame,
    reduced: bool = False,
    allowed: Optional[Allowed] = None,
    cap: Optional[int] = None,
) -> List[FeedbackRule]:
    """
    All feedback rules of ``game``, stage by stage.

    Args:
        game: The base game
        reduced: Use ``(t, h, w)`` cells
        allowed: Optional ``allowed(t, h, w, â^{t-1})`` restricting the
            profiles of a cell (used for rules respecting mediation ranges)
        cap: Maximum number of rules (default from configuration)

    Raises:
        CapExceededError: If the family is larger than ``cap``
    """
    if cap is None:
        from ..core.config import config

        cap = config.limits.rules
    if allowed is None:
        count = count_feedback_rules(game, reduced, cap)
        if count > cap:
            logger.warning("Feedback-rule count exceeds cap %d", cap)
            raise CapExceededError("rules", cap, count)

    partial: List[Dict[Cell, Profile]] = [{}]
    for t in range(1, game.stages + 1):
        cells = _stage_cells(game, t, reduced)
        extended: List[Dict[Cell, Profile]] = []
        for table in partial:
            keys: List[Cell] = []
            options: List[List[Profile]] = []
            for h, w, past in cells:
                if reduced:
                    recs = tuple(table[(k, h[:k], w[:k])] for k in range(1, t))
                    key: Cell = (t, h, w)
                else:
                    recs = past or ()
                    key = (t, h, w, recs)
                profiles = (
                    list(game.action_profiles(t))
                    if allowed is None
                    else [tuple(p) for p in allowed(t, h, w, recs)]
                )
                keys.append(key)
                options.append(profiles)
            for combo in itertools.product(*options):
                updated = dict(table)
                updated.update(zip(keys, combo))
                extended.append(updated)
                if len(extended) > cap:
                    logger.warning("Feedback-rule count exceeds cap %d", cap)
                    raise CapExceededError("rules", cap)
        partial = extended
    fallback = tuple(game.action_profiles(t)[0] for t in range(1, game.stages + 1))
    rules = [FeedbackRule(tuple(table.items()), reduced, fallback) for table in partial]
    logger.debug("Enumerated %d feedback rules (reduced=%s)", len(rules), reduced)
    return rules


def tabulate(rule: RuleBase, game: BaseGame, reduced: bool = True) -> FeedbackRule:
    """Tabulate ``rule`` on every cell of the game tree."""
    cells: Dict[Cell, Profile] = {}
    for t in range(1, game.stages + 1):
        for h, w, past in _stage_cells(game, t, reduced):
            recs = rule.on_path(game, h[:-1], w[:-1]) if reduced else (past or ())
            key: Cell = (t, h, w) if reduced else (t, h, w, recs)
            cells[key] = tuple(rule.choice(t, h, w, recs))
    fallback = tuple(game.action_profiles(t)[0] for t in range(1, game.stages + 1))
    return FeedbackRule(tuple(cells.items()), reduced, fallback, rule.label)


def rule_from_profile(
    game: BaseGame, profile: Sequence[Mapping[Tuple[int, PrivateHistory], Label]]
) -> FunctionRule:
    """
    Rule recommending a pure strategy profile of the base game at every history.

    Where a player's strategy is undefined (unreachable under its own play) the
    first action is recommended; this depends on the player's own history only.
    """
    if len(profile) != game.num_players:
        raise ShapeMismatchError(f"Expected {game.num_players} strategies")

    def fn(t: int, h: History, w: StatePath, recs: Tuple[Profile, ...]) -> Profile:
        result = []
        for i, strategy in enumerate(profile):
            own = tuple(project(record, i) for record in h)
            result.append(strategy.get((t, own), game.actions[i][t - 1][0]))
        return tuple(result)

    return FunctionRule(fn, "profile")


# ============================================================================
# Mixtures
# ============================================================================

Initial = Tuple[Profile, Label]


@dataclass(frozen=True)
class MixtureEntry:
    """Weight on a mediator; ``initial`` fixes ``(s_1, w_1)`` under a free prior."""

    rule: Mediator
    weight: Fraction
    initial: Optional[Initial] = None


@dataclass(frozen=True)
class BCEMixture:
    """Probability vector over feedback rules (optionally joint with the stage-1 draw)."""

    entries: Tuple[MixtureEntry, ...] = field(default_factory=tuple)

    @classmethod
    def point_mass(cls, rule: Mediator) -> "BCEMixture":
        return cls((MixtureEntry(rule, ONE),))

    @classmethod
    def uniform(cls, rules: Sequence[Mediator]) -> "BCEMixture":
        if not rules:
            raise ShapeMismatchError("Cannot mix an empty family")
        weight = Fraction(1, len(rules))
        return cls(tuple(MixtureEntry(r, weight) for r in rules))

    @property
    def total(self) -> Fraction:
        return sum((e.weight for e in self.entries), ZERO)

    @property
    def free_prior(self) -> bool:
        return any(e.initial is not None for e in self.entries)

    def support(self) -> List[MixtureEntry]:
        return [e for e in self.entries if e.weight > 0]

    def start_nodes(self, game: BaseGame) -> List[StartNode]:
        nodes: List[StartNode] = []
        for k, entry in enumerate(self.entries):
            if entry.weight <= 0:
                continue
            if entry.initial is None:
                for h, w, p in game.initial_rows():
                    nodes.append(StartNode(entry.weight * p, entry.rule, 1, h, w, (), k))
            else:
                signals, state = entry.initial
                nodes.append(
                    StartNode(entry.weight, entry.rule, 1, (((), tuple(signals)),), (state,), (), k)
                )
        return nodes

    def combine(self, other: "BCEMixture", weight: Fraction) -> "BCEMixture":
        """``weight * self + (1 - weight) * other``."""
        weight = Fraction(weight)
        if not 0 <= weight <= 1:
            raise ShapeMismatchError("Combination weight must lie in [0, 1]")
        entries = [MixtureEntry(e.rule, e.weight * weight, e.initial) for e in self.entries]
        entries += [MixtureEntry(e.rule, e.weight * (1 - weight), e.initial) for e in other.entries]
        return BCEMixture(tuple(e for e in entries if e.weight))

    def outcome_distribution(self, game: BaseGame) -> OutcomeDistribution:
        """Distribution over HΩ under obedient play."""
        return OutcomeDistribution.from_pairs(
            (leaf.terminal, leaf.weight) for leaf in traverse(game, self.start_nodes(game))
        )

    def describe(self) -> List[str]:
        lines = []
        for e in self.support():
            rule = e.rule.describe() if hasattr(e.rule, "describe") else repr(e.rule)
            prefix = ""
            if e.initial is not None:
                prefix = f"[s1={format_profile(e.initial[0])} w1={e.initial[1]}] "
            lines.append(f"{e.weight.numerator}/{e.weight.denominator}: {prefix}{rule}")
        return lines


__all__ = [
    "Cell",
    "Allowed",
    "RuleBase",
    "FeedbackRule",
    "FunctionRule",
    "count_feedback_rules",
    "enumerate_feedback_rules",
    "tabulate",
    "rule_from_profile",
    "Initial",
    "MixtureEntry",
    "BCEMixture",
]
