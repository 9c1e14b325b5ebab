"""
Expansions, induced games and kernel families.

An expansion adds message sets ``M_{i,t}`` drawn by kernels
``ξ_t(m_t | h^t, m^{t-1}, w^t)``. In the induced game the stage-``t`` signal of
player ``i`` is the pair ``(s_{i,t}, m_{i,t})`` and the kernels are the products
``π_{t+1} = ξ_{t+1} · p_{t+1}``. A kernel family has the same shape but arbitrary
kernels, so it need not come from any expansion.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from pydantic import BaseModel, Field

from ..core.errors import ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import (
    NO_SIGNAL,
    History,
    Label,
    Profile,
    StatePath,
    format_profile,
    format_rational,
)
from ..games.base import (
    BaseGame,
    OutcomeDistribution,
    TerminalHistory,
    describe_history,
    open_loop_distribution,
)

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

MessageSets = Tuple[Tuple[Tuple[Label, ...], ...], ...]
MessagePath = Tuple[Profile, ...]
XiFn = Callable[[int, History, MessagePath, StatePath], Mapping[Profile, Fraction]]
XiKey = Tuple[int, History, MessagePath, StatePath]


def message_profiles(messages: MessageSets, t: int) -> List[Profile]:
    return [tuple(p) for p in itertools.product(*(row[t - 1] for row in messages))]


@dataclass(frozen=True, eq=False)
class Expansion:
    """
    Attributes:
        messages: ``messages[i][t-1]`` is ``M_{i,t}``
        xi: ``xi(t, h^t, m^{t-1}, w^t)`` returns ``{m_t profile: probability}``
        name: Display name
    """

    messages: MessageSets
    xi: XiFn
    name: str = "expansion"

    @classmethod
    def from_table(
        cls,
        messages: MessageSets,
        table: Mapping[XiKey, Mapping[Profile, Fraction]],
        name: str = "expansion",
    ) -> "Expansion":
        """Tabulated ``ξ``; rows not in ``table`` are uniform."""

        def xi(t: int, h: History, m: MessagePath, w: StatePath) -> Mapping[Profile, Fraction]:
            row = table.get((t, h, m, w))
            if row is not None:
                return row
            profiles = message_profiles(messages, t)
            return {p: Fraction(1, len(profiles)) for p in profiles}

        return cls(messages, xi, name)

    @classmethod
    def null(cls, game: BaseGame) -> "Expansion":
        """Singleton messages everywhere."""
        messages = tuple(tuple((NO_SIGNAL,) for _ in range(game.stages)) for _ in game.players)
        profile = tuple(NO_SIGNAL for _ in game.players)
        return cls(messages, lambda t, h, m, w: {profile: ONE}, "null")


def check_message_shape(game: BaseGame, messages: MessageSets) -> None:
    """
    Raises:
        ShapeMismatchError: If ``messages`` is not indexed ``[player][stage]`` or has an empty set
    """
    if len(messages) != game.num_players or any(len(row) != game.stages for row in messages):
        raise ShapeMismatchError(
            f"Message sets must be indexed [player][stage] for {game.num_players}x{game.stages}"
        )
    for i, row in enumerate(messages):
        for t, labels in enumerate(row, start=1):
            if not labels or len(set(labels)) != len(labels):
                raise ShapeMismatchError(
                    f"Message set of player {game.players[i]} at stage {t} "
                    "is empty or repeats labels"
                )


# ============================================================================
# Histories with messages
# ============================================================================


def combine(signals: Profile, messages: Profile) -> Profile:
    return tuple(zip(signals, messages))


def split_history(history: History) -> Tuple[History, MessagePath]:
    """Base history and message path of an induced history."""
    base = tuple((tuple(b), tuple(x[0] for x in s)) for b, s in history)
    messages = tuple(tuple(x[1] for x in s) for _, s in history if s)
    return base, messages


def strip_terminal(terminal: TerminalHistory) -> TerminalHistory:
    return TerminalHistory(split_history(terminal.history)[0], terminal.states)


@dataclass(frozen=True, eq=False)
class KernelFamily:
    """
    Kernels ``π_t`` over (base record, messages, state).

    ``game`` is a ``BaseGame`` on the same players, actions and states as
    ``base`` whose stage-``t`` signal labels are ``(s, m)`` pairs.
    """

    base: BaseGame
    messages: MessageSets
    game: BaseGame

    def base_outcome(self, distribution: OutcomeDistribution) -> OutcomeDistribution:
        """Marginal on the base game's terminal histories."""
        return OutcomeDistribution.from_pairs(
            (strip_terminal(z), p) for z, p in distribution.weights.items()
        )


@dataclass(frozen=True, eq=False)
class InducedGame(KernelFamily):
    """``Γ_π`` for an expansion; the kernels factor by construction."""

    expansion: Optional[Expansion] = None


def family_game(
    base: BaseGame,
    messages: MessageSets,
    initial: Mapping[Tuple[Profile, Label], Fraction],
    transition: Callable[[int, Profile, History, StatePath], Mapping],
    name: str,
) -> BaseGame:
    """A game on ``base``'s players, actions and states with signals ``S × M``."""
    check_message_shape(base, messages)
    signals = tuple(
        tuple(
            tuple(itertools.product(base.signals[i][t], messages[i][t]))
            for t in range(base.stages)
        )
        for i in range(base.num_players)
    )
    return BaseGame(
        players=base.players,
        actions=base.actions,
        signals=signals,
        states=base.states,
        initial=initial,
        transition=transition,
        payoff=lambda z: base.payoff(strip_terminal(z)),
        name=name,
    )


def induce_game(game: BaseGame, expansion: Expansion) -> InducedGame:
    """
    ``Γ_π`` with ``π_1 = ξ_1 · p_1`` and ``π_{t+1} = ξ_{t+1} · p_{t+1}``.

    Raises:
        ShapeMismatchError: If the message sets do not fit ``game``
    """
    check_message_shape(game, expansion.messages)

    initial: Dict[Tuple[Profile, Label], Fraction] = {}
    for h1, w1, p in game.initial_rows():
        signals = h1[0][1]
        for m, q in expansion.xi(1, h1, (), w1).items():
            if q:
                key = (combine(signals, m), w1[0])
                initial[key] = initial.get(key, ZERO) + p * Fraction(q)

    def transition(t: int, action: Profile, history: History, states: StatePath) -> Dict:
        h, past = split_history(history)
        row: Dict = {}
        for ((recalled, signals), state), p in game.kernel(t, action, h, states).items():
            if not p:
                continue
            following = h + ((tuple(recalled), tuple(signals)),)
            for m, q in expansion.xi(t + 1, following, past, states + (state,)).items():
                if q:
                    key = ((tuple(recalled), combine(signals, m)), state)
                    row[key] = row.get(key, ZERO) + p * Fraction(q)
        return row

    induced = family_game(
        game, expansion.messages, initial, transition, f"{game.name}+{expansion.name}"
    )
    logger.debug("Induced game %s", induced.name)
    return InducedGame(game, expansion.messages, induced, expansion)


# ============================================================================
# Consistency
# ============================================================================


def action_sequences(game: BaseGame) -> List[Tuple[Profile, ...]]:
    return [
        tuple(seq)
        for seq in itertools.product(*(game.action_profiles(t) for t in range(1, game.stages + 1)))
    ]


def consistency_issues(game: BaseGame, family: KernelFamily) -> List[str]:
    """Action sequences ``a`` where ``marg_{HΩ} π^a`` differs from ``p^a``."""
    issues = []
    for seq in action_sequences(game):
        expected = open_loop_distribution(game, seq)
        induced = family.base_outcome(open_loop_distribution(family.game, seq))
        if induced != expected:
            where = " ".join(format_profile(a) for a in seq)
            diff = [
                f"{z.describe()}: {format_rational(induced.probability(z))} vs "
                f"{format_rational(expected.probability(z))}"
                for z in set(induced.support) | set(expected.support)
                if induced.probability(z) != expected.probability(z)
            ]
            issues.append(f"a={where}: {diff[0]}")
    return issues


def consistency_check(game: BaseGame, family: KernelFamily) -> bool:
    """True iff ``marg_{HΩ} π^a = p^a`` for every action sequence ``a``."""
    issues = consistency_issues(game, family)
    verdict = "consistent" if not issues else issues[0]
    logger.info("consistency_check %s: %s", family.game.name, verdict)
    return not issues


# ============================================================================
# Factorization
# ============================================================================


@dataclass
class FactorizationResult:
    factorizable: bool
    witness: Optional[Expansion] = None
    reason: str = ""
    table: Dict[XiKey, Dict[Profile, Fraction]] = field(default_factory=dict)


class FactorizationSummary(BaseModel):
    factorizable: bool
    reason: str = Field(default="")
    rows: int = Field(default=0, description="Tabulated ξ rows of the witness")


def _quotients(
    table: Dict[XiKey, Dict[Profile, Fraction]],
    key: XiKey,
    m: Profile,
    value: Fraction,
) -> Optional[str]:
    row = table.setdefault(key, {})
    if m in row and row[m] != value:
        return f"ξ_{key[0]} is not well defined at {describe_history(key[1], key[3])}"
    row[m] = value
    return None


def factorization_test(game: BaseGame, family: KernelFamily) -> FactorizationResult:
    """
    Decide whether ``π_t = ξ_t · p_t`` for some expansion ``ξ``.

    ``ξ`` is computed by exact division wherever ``p > 0``; the family fails
    when ``π > 0`` where ``p = 0`` or when a quotient row does not sum to one.
    """
    table: Dict[XiKey, Dict[Profile, Fraction]] = {}

    def fail(reason: str) -> FactorizationResult:
        logger.info("factorization_test %s: %s", family.game.name, reason)
        return FactorizationResult(False, None, reason, table)

    base_initial = {(tuple(s), w): Fraction(p) for (s, w), p in game.initial.items()}
    for (signals, state), pi in family.game.initial.items():
        if not pi:
            continue
        s = tuple(x[0] for x in signals)
        m = tuple(x[1] for x in signals)
        p = base_initial.get((s, state), ZERO)
        if not p:
            return fail(f"π_1 > 0 where p_1 = 0 at s1={format_profile(s)}, w={state}")
        problem = _quotients(table, (1, (((), s),), (), (state,)), m, Fraction(pi) / p)
        if problem:
            return fail(problem)
    for h1, w1, _ in game.initial_rows():
        total = sum(table.get((1, h1, (), w1), {}).values(), ZERO)
        if total != 1:
            return fail(
                f"π_1 / p_1 sums to {format_rational(total)} at {describe_history(h1, w1)}"
            )

    tree = family.game.tree()
    for t in range(1, game.stages):
        for history, states in tree.prefixes[t - 1]:
            h, past = split_history(history)
            for a in game.action_profiles(t):
                base_row = game.kernel(t, a, h, states)
                touched: Dict[XiKey, None] = {}
                row = family.game.kernel(t, a, history, states)
                for ((recalled, signals), state), pi in row.items():
                    if not pi:
                        continue
                    s = tuple(x[0] for x in signals)
                    m = tuple(x[1] for x in signals)
                    p = base_row.get(((tuple(recalled), s), state), ZERO)
                    if not p:
                        return fail(
                            f"π_{t + 1} > 0 where p_{t + 1} = 0 after a{t}={format_profile(a)}, "
                            f"{describe_history(h, states)}"
                        )
                    key = (t + 1, h + ((tuple(recalled), s),), past, states + (state,))
                    problem = _quotients(table, key, m, Fraction(pi) / p)
                    if problem:
                        return fail(problem)
                    touched[key] = None
                for ((recalled, s), state), p in base_row.items():
                    if not p or tuple(recalled) != tuple(a):
                        continue
                    key = (t + 1, h + ((tuple(recalled), tuple(s)),), past, states + (state,))
                    total = sum(table.get(key, {}).values(), ZERO)
                    if total != 1:
                        return fail(
                            f"π_{t + 1} / p_{t + 1} sums to {format_rational(total)} at "
                            f"{describe_history(key[1], key[3])} with messages "
                            f"{' '.join(format_profile(x) for x in past) or '-'}"
                        )

    witness = Expansion.from_table(family.messages, table, f"{family.game.name}-xi")
    logger.info("factorization_test %s: factorizable (%d rows)", family.game.name, len(table))
    return FactorizationResult(True, witness, "", table)


def summarize(result: FactorizationResult) -> FactorizationSummary:
    return FactorizationSummary(
        factorizable=result.factorizable, reason=result.reason, rows=len(result.table)
    )


def describe_xi_table(table: Mapping[XiKey, Mapping[Profile, Fraction]]) -> List[str]:
    lines = []
    for (t, h, past, w), row in table.items():
        msgs = " ".join(format_profile(x) for x in past) or "-"
        dist = ", ".join(f"{format_profile(m)}: {format_rational(p)}" for m, p in row.items() if p)
        lines.append(f"ξ_{t} {describe_history(h, w)} m={msgs} -> {dist}")
    return lines


__all__ = [
    "MessageSets",
    "MessagePath",
    "XiFn",
    "XiKey",
    "Expansion",
    "KernelFamily",
    "InducedGame",
    "FactorizationResult",
    "FactorizationSummary",
    "message_profiles",
    "check_message_shape",
    "combine",
    "split_history",
    "strip_terminal",
    "family_game",
    "induce_game",
    "action_sequences",
    "consistency_issues",
    "consistency_check",
    "factorization_test",
    "summarize",
    "describe_xi_table",
]
