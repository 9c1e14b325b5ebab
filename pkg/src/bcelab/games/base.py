"""
Finite multi-stage base games.

A game has players, stages ``1..T``, per-stage action, signal and state sets,
an initial kernel over (stage-1 signal profile, stage-1 state) and transition
kernels that draw the recalled action profile, the next signal profile and the
next state. Histories are tuples of stage records ``(b_{t-1}, s_t)``; a terminal
history ends with ``(a_T, ())``.

All probabilities and payoffs are ``Fraction`` values.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (
    Any,
    Callable,
    Dict,
    Hashable,
    Iterable,
    Iterator,
    List,
    Literal,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

from pydantic import BaseModel, Field

from ..core.errors import CapExceededError, ShapeMismatchError, UnknownPlayerError
from ..core.logger import get_logger
from ..core.types import (
    NO_SIGNAL,
    History,
    KernelRow,
    Label,
    PrivateHistory,
    Profile,
    StatePath,
    format_profile,
    format_rational,
)

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

TransitionFn = Callable[[int, Profile, History, StatePath], KernelRow]
PayoffFn = Callable[["TerminalHistory"], Sequence[Fraction]]


class TerminalHistory(NamedTuple):
    """A complete play: ``history`` has ``T+1`` records, ``states`` has ``T``."""

    history: History
    states: StatePath

    @property
    def actions(self) -> Tuple[Profile, ...]:
        return tuple(record[0] for record in self.history[1:])

    def describe(self) -> str:
        return describe_history(self.history, self.states)


def describe_history(history: History, states: StatePath) -> str:
    """Compact text form, e.g. ``s1=(-,-) | a1=(T,-) | w=(-)``."""
    parts: List[str] = []
    for t, (recalled, signals) in enumerate(history, start=1):
        if recalled:
            parts.append(f"a{t - 1}={format_profile(recalled)}")
        if signals:
            parts.append(f"s{t}={format_profile(signals)}")
    parts.append("w=" + format_profile(states))
    return " | ".join(parts)


def project(record: Tuple[Profile, Profile], index: int) -> Tuple[Label, ...]:
    return tuple(part[index] for part in record if part)


def singleton_sets(players: int, stages: int) -> Tuple[Tuple[Tuple[Label, ...], ...], ...]:
    """``(NO_SIGNAL,)`` for every player and stage."""
    return tuple(tuple((NO_SIGNAL,) for _ in range(stages)) for _ in range(players))


# ============================================================================
# Base Game
# ============================================================================


@dataclass(frozen=True, eq=False)
class BaseGame:
    """
    A finite multi-stage game.

    Attributes:
        players: Player ids
        actions: ``actions[i][t-1]`` is the action set of player ``i`` at stage ``t``
        signals: ``signals[i][t-1]`` is the signal set of player ``i`` at stage ``t``
        states: ``states[t-1]`` is the state set at stage ``t``
        initial: ``{(s_1 profile, w_1): p}``
        transition: ``transition(t, a_t, h^t, w^t)`` returns
            ``{((b_t, s_{t+1}), w_{t+1}): p}`` for ``t = 1..T-1``
        payoff: payoff vector of a terminal history
        name: Display name
    """

    players: Tuple[Hashable, ...]
    actions: Tuple[Tuple[Tuple[Label, ...], ...], ...]
    signals: Tuple[Tuple[Tuple[Label, ...], ...], ...]
    states: Tuple[Tuple[Label, ...], ...]
    initial: Mapping[Tuple[Profile, Label], Fraction]
    transition: TransitionFn
    payoff: PayoffFn
    name: str = "game"
    _cache: Dict[Any, Any] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        n, stages = len(self.players), len(self.states)
        if n == 0:
            raise ShapeMismatchError("A game needs at least one player")
        if stages == 0:
            raise ShapeMismatchError("A game needs at least one stage")
        if len(set(self.players)) != n:
            raise ShapeMismatchError("Player ids must be distinct")
        for label, table in (("actions", self.actions), ("signals", self.signals)):
            if len(table) != n or any(len(row) != stages for row in table):
                raise ShapeMismatchError(
                    f"{label} must be indexed [player][stage] for {n}x{stages}"
                )

    # ------------------------------------------------------------------ shape

    @property
    def stages(self) -> int:
        return len(self.states)

    @property
    def num_players(self) -> int:
        return len(self.players)

    def player_index(self, player: Hashable) -> int:
        """Index of ``player`` (an id, or a 0-based index when ids are not ints)."""
        if player in self.players:
            return self.players.index(player)
        if isinstance(player, int) and 0 <= player < self.num_players:
            return player
        raise UnknownPlayerError(f"Unknown player: {player!r}")

    def check_stage(self, t: int, last: Optional[int] = None) -> None:
        top = self.stages if last is None else last
        if not 1 <= t <= top:
            raise UnknownPlayerError(f"Unknown stage {t}: expected 1..{top}")

    def stage_actions(self, t: int) -> Tuple[Tuple[Label, ...], ...]:
        return tuple(self.actions[i][t - 1] for i in range(self.num_players))

    def action_profiles(self, t: int) -> Tuple[Profile, ...]:
        key = ("profiles", t)
        if key not in self._cache:
            self._cache[key] = tuple(itertools.product(*self.stage_actions(t)))
        return self._cache[key]

    def signal_profiles(self, t: int) -> Tuple[Profile, ...]:
        return tuple(itertools.product(*(self.signals[i][t - 1] for i in range(self.num_players))))

    # ---------------------------------------------------------------- kernels

    def kernel(self, t: int, action: Profile, history: History, states: StatePath) -> KernelRow:
        """Row of ``p_{t+1}`` given ``(a_t, h^t, w^t)``, for ``1 <= t < T`` (cached)."""
        key = ("kernel", t, action, history, states)
        row = self._cache.get(key)
        if row is None:
            row = {k: Fraction(v) for k, v in self.transition(t, action, history, states).items()}
            self._cache[key] = row
        return row

    def initial_rows(self) -> Iterator[Tuple[History, StatePath, Fraction]]:
        """Stage-1 prefixes with positive probability."""
        for (signals, state), p in self.initial.items():
            if p > 0:
                yield ((((), tuple(signals)),), (state,), Fraction(p))

    def children(
        self, t: int, action: Profile, history: History, states: StatePath
    ) -> Iterator[Tuple[History, StatePath, Fraction]]:
        """
        On-tree successors of ``(h^t, w^t)`` after ``a_t``.

        For ``t = T`` the single terminal child is returned. Outcomes whose
        recalled actions differ from ``action`` are skipped.
        """
        if t == self.stages:
            yield history + ((tuple(action), ()),), states, ONE
            return
        for ((recalled, signals), state), p in self.kernel(t, action, history, states).items():
            if p > 0 and tuple(recalled) == tuple(action):
                yield history + ((tuple(recalled), tuple(signals)),), states + (state,), p

    def tree(self, cap: Optional[int] = None) -> "GameTree":
        """
        Cached on-tree enumeration (see ``GameTree``).

        The cap is checked on every call, also when the tree is already cached.

        Raises:
            CapExceededError: If there are more terminal histories than the cap
        """
        key = ("tree",)
        tree = self._cache.get(key)
        if tree is None:
            tree = self._cache[key] = GameTree.build(self, cap)
            return tree
        limit = _history_cap(cap)
        if len(tree.terminals) > limit:
            logger.warning(
                "History cap %d exceeded: %d terminal histories", limit, len(tree.terminals)
            )
            raise CapExceededError("histories", limit, len(tree.terminals))
        return tree


# ============================================================================
# Tree
# ============================================================================


@dataclass
class GameTree:
    """
    Histories reachable with positive probability under some action sequence.

    ``prefixes[t-1]`` lists the pairs ``(h^t, w^t)`` for ``t = 1..T``;
    ``terminals`` lists HΩ, interned by ``index``.
    """

    prefixes: List[List[Tuple[History, StatePath]]]
    terminals: List[TerminalHistory]
    index: Dict[TerminalHistory, int]

    @classmethod
    def build(cls, game: BaseGame, cap: Optional[int] = None) -> "GameTree":
        limit = _history_cap(cap)
        layer = [(h, w) for h, w, _ in game.initial_rows()]
        prefixes = [layer]
        for t in range(1, game.stages):
            seen: Dict[Tuple[History, StatePath], None] = {}
            for h, w in layer:
                for a in game.action_profiles(t):
                    for child_h, child_w, _ in game.children(t, a, h, w):
                        seen.setdefault((child_h, child_w), None)
                if len(seen) > limit:
                    logger.warning("History cap %d exceeded at stage %d", limit, t + 1)
                    raise CapExceededError("histories", limit, len(seen))
            layer = list(seen)
            prefixes.append(layer)

        size = len(layer) * len(game.action_profiles(game.stages))
        if size > limit:
            logger.warning("History cap %d exceeded: %d terminal histories", limit, size)
            raise CapExceededError("histories", limit, size)
        terminals = [
            TerminalHistory(h + ((a, ()),), w)
            for h, w in layer
            for a in game.action_profiles(game.stages)
        ]
        logger.debug("Game %s: %d terminal histories", game.name, len(terminals))
        return cls(prefixes, terminals, {z: k for k, z in enumerate(terminals)})


def _history_cap(cap: Optional[int]) -> int:
    if cap is not None:
        return cap
    from ..core.config import config

    return config.limits.histories


# ============================================================================
# Outcomes
# ============================================================================


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact distribution over terminal histories (positive weights only)."""

    weights: Mapping[TerminalHistory, Fraction]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[TerminalHistory, Fraction]]) -> "OutcomeDistribution":
        acc: Dict[TerminalHistory, Fraction] = {}
        for z, p in pairs:
            if p:
                acc[z] = acc.get(z, ZERO) + p
        return cls({z: p for z, p in acc.items() if p != 0})

    @property
    def total(self) -> Fraction:
        return sum(self.weights.values(), ZERO)

    @property
    def support(self) -> List[TerminalHistory]:
        return list(self.weights)

    def probability(self, terminal: TerminalHistory) -> Fraction:
        return self.weights.get(terminal, ZERO)

    def expected_payoffs(self, game: BaseGame) -> Tuple[Fraction, ...]:
        totals = [ZERO] * game.num_players
        for z, p in self.weights.items():
            for i, u in enumerate(payoff_vector(game, z)):
                totals[i] += p * u
        return tuple(totals)

    def marginal(self, key: Callable[[TerminalHistory], Hashable]) -> Dict[Hashable, Fraction]:
        acc: Dict[Hashable, Fraction] = {}
        for z, p in self.weights.items():
            k = key(z)
            acc[k] = acc.get(k, ZERO) + p
        return acc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OutcomeDistribution):
            return NotImplemented
        return dict(self.weights) == dict(other.weights)

    def __hash__(self) -> int:
        return hash(frozenset(self.weights.items()))

    def describe(self) -> List[str]:
        return [f"{z.describe()}: {format_rational(p)}" for z, p in self.weights.items()]


def forward(
    game: BaseGame,
    choose: Callable[[int, History, StatePath], Mapping[Profile, Fraction]],
) -> OutcomeDistribution:
    """
    Exact forward evaluation: ``choose(t, h^t, w^t)`` gives the distribution of
    the stage-``t`` action profile.
    """
    layer = list(game.initial_rows())
    terminals: List[Tuple[TerminalHistory, Fraction]] = []
    for t in range(1, game.stages + 1):
        following: List[Tuple[History, StatePath, Fraction]] = []
        for h, w, p in layer:
            for a, q in choose(t, h, w).items():
                if not q:
                    continue
                for child_h, child_w, r in game.children(t, a, h, w):
                    if t == game.stages:
                        terminals.append((TerminalHistory(child_h, child_w), p * q))
                    else:
                        following.append((child_h, child_w, p * q * r))
        layer = following
    return OutcomeDistribution.from_pairs(terminals)


def open_loop_distribution(
    game: BaseGame, action_sequence: Sequence[Profile]
) -> OutcomeDistribution:
    """``p^a``: the outcome distribution of a fixed action sequence."""
    if len(action_sequence) != game.stages:
        raise ShapeMismatchError(f"Expected {game.stages} action profiles")
    return forward(game, lambda t, h, w: {tuple(action_sequence[t - 1]): ONE})


Behavior = Callable[[int, PrivateHistory], Mapping[Label, Fraction]]


def play(game: BaseGame, strategies: Sequence[Behavior]) -> OutcomeDistribution:
    """
    Outcome of a behavioral strategy profile.

    ``strategies[i](t, h_i^t)`` returns player ``i``'s action distribution at
    stage ``t``.
    """
    if len(strategies) != game.num_players:
        raise ShapeMismatchError(f"Expected {game.num_players} strategies")

    def choose(t: int, h: History, w: StatePath) -> Dict[Profile, Fraction]:
        marginals = []
        for i, strategy in enumerate(strategies):
            own = tuple(project(record, i) for record in h)
            marginals.append([(a, Fraction(q)) for a, q in strategy(t, own).items() if q])
        joint: Dict[Profile, Fraction] = {}
        for combo in itertools.product(*marginals):
            prob = ONE
            for _, q in combo:
                prob *= q
            joint[tuple(a for a, _ in combo)] = prob
        return joint

    return forward(game, choose)


def pure_behavior(strategy: Mapping[Tuple[int, PrivateHistory], Label]) -> Behavior:
    """Behavior of a pure strategy keyed by ``(t, h_i^t)``."""
    return lambda t, own: {strategy[(t, own)]: ONE}


# ============================================================================
# Core Operations
# ============================================================================


def enumerate_terminal_histories(
    game: BaseGame, cap: Optional[int] = None
) -> List[TerminalHistory]:
    """
    HΩ: every terminal history with positive probability under its own
    embedded action sequence.

    Raises:
        CapExceededError: If there are more than ``cap`` terminal histories
    """
    if cap is not None:
        return GameTree.build(game, cap).terminals
    return game.tree().terminals


def outcome_probability(game: BaseGame, terminal: TerminalHistory) -> Fraction:
    """``p^a(h, w)`` with ``a`` read from the recalled actions of ``h``."""
    history, states = terminal
    if len(history) != game.stages + 1 or len(states) != game.stages:
        raise ShapeMismatchError(
            f"Terminal history needs {game.stages + 1} records and {game.stages} states"
        )
    (recalled, signals) = history[0]
    prob = Fraction(game.initial.get((tuple(signals), states[0]), ZERO))
    for t in range(1, game.stages):
        if not prob:
            return ZERO
        action = history[t][0]
        row = game.kernel(t, action, history[:t], states[:t])
        prob *= row.get((history[t], states[t]), ZERO)
    return prob


def private_history(
    game: BaseGame, terminal: TerminalHistory, player: Hashable, t: int
) -> PrivateHistory:
    """
    ``h_i^t``: player ``i``'s own recalled actions and signals through stage
    ``t`` (``1 <= t <= T+1``).

    Raises:
        UnknownPlayerError: For an unknown player or stage
    """
    index = game.player_index(player)
    game.check_stage(t, game.stages + 1)
    return tuple(project(record, index) for record in terminal.history[:t])


def payoff_vector(game: BaseGame, terminal: TerminalHistory) -> Tuple[Fraction, ...]:
    """``(u_1, ..., u_n)(h, w)``."""
    return tuple(Fraction(u) for u in game.payoff(terminal))


# ============================================================================
# Validation
# ============================================================================

IssueKind = Literal[
    "structure",
    "labels",
    "kernel_sum",
    "negative_probability",
    "perfect_recall",
    "payoff_signal_dependence",
    "payoff_shape",
    "history_cap",
]


class ValidationIssue(BaseModel):
    """One violated invariant."""

    kind: IssueKind = Field(..., description="Invariant family")
    location: str = Field(..., description="Where the problem was found")
    detail: str = Field(default="", description="Human-readable explanation")


class ValidationReport(BaseModel):
    """All problems found in a game; empty iff the game is valid."""

    issues: List[ValidationIssue] = Field(default_factory=list)
    cap_exceeded: Optional[Tuple[int, int]] = Field(
        default=None, description="(limit, histories needed) when enumeration stopped at the cap"
    )

    @property
    def valid(self) -> bool:
        return not self.issues

    def kinds(self) -> List[str]:
        return sorted({issue.kind for issue in self.issues})

    def add(self, kind: IssueKind, location: str, detail: str = "") -> None:
        self.issues.append(ValidationIssue(kind=kind, location=location, detail=detail))

    def lines(self) -> List[str]:
        return [f"[{i.kind}] {i.location}: {i.detail}" for i in self.issues]


def _check_structure(game: BaseGame, report: ValidationReport) -> None:
    for i, player in enumerate(game.players):
        for t in range(1, game.stages + 1):
            for label, table in (("actions", game.actions), ("signals", game.signals)):
                labels = table[i][t - 1]
                if not labels:
                    report.add("structure", f"{label}[{player}][{t}]", "empty set")
                elif len(set(labels)) != len(labels):
                    report.add("structure", f"{label}[{player}][{t}]", "duplicate labels")
    for t, labels in enumerate(game.states, start=1):
        if not labels:
            report.add("structure", f"states[{t}]", "empty set")
        elif len(set(labels)) != len(labels):
            report.add("structure", f"states[{t}]", "duplicate labels")


def _check_row(
    report: ValidationReport,
    location: str,
    row: Mapping[Any, Fraction],
    valid_key: Callable[[Any], Optional[str]],
) -> None:
    total = ZERO
    for key, p in row.items():
        if p < 0:
            report.add("negative_probability", location, f"{key!r} has probability {p}")
        problem = valid_key(key)
        if problem:
            report.add("labels", location, problem)
        total += p
    if total != 1:
        report.add("kernel_sum", location, f"row sums to {format_rational(total)}")


def _profile_problem(profile: Any, sets: Sequence[Sequence[Label]], what: str) -> Optional[str]:
    if not isinstance(profile, tuple) or len(profile) != len(sets):
        return f"{what} {profile!r} is not a profile of {len(sets)} labels"
    for label, allowed in zip(profile, sets):
        if label not in allowed:
            return f"{what} {profile!r} uses unknown label {label!r}"
    return None


def _cap_breach(
    game: BaseGame, report: ValidationReport, limit: int, size: int, stage: int
) -> ValidationReport:
    logger.warning("validate_game %s: history cap %d exceeded at stage %d", game.name, limit, stage)
    report.add("history_cap", f"stage {stage}", f"more than {limit} histories (at least {size})")
    report.cap_exceeded = (limit, size)
    return report


def validate_game(game: BaseGame, cap: Optional[int] = None) -> ValidationReport:
    """
    Check every invariant of ``game`` and report all violations.

    Kernel rows are checked at every history reachable with positive
    probability under some action sequence.
    Enumeration stops at the history cap; the breach is reported as a
    ``history_cap`` issue and recorded in ``cap_exceeded``.
    """
    report = ValidationReport()
    _check_structure(game, report)
    if not report.valid:
        return report

    n = game.num_players

    def initial_key(key: Any) -> Optional[str]:
        if not isinstance(key, tuple) or len(key) != 2:
            return f"malformed key {key!r}"
        signals, state = key
        problem = _profile_problem(tuple(signals), [game.signals[i][0] for i in range(n)], "signal")
        if problem:
            return problem
        if state not in game.states[0]:
            return f"unknown state {state!r}"
        return None

    _check_row(report, "initial_kernel", game.initial, initial_key)

    limit = _history_cap(cap)
    layer = [(h, w) for h, w, _ in game.initial_rows()]
    for t in range(1, game.stages):
        seen: Dict[Tuple[History, StatePath], None] = {}
        next_signals = [game.signals[i][t] for i in range(n)]
        for h, w in layer:
            for a in game.action_profiles(t):
                location = (
                    f"transition_kernels[{t + 1}] at a{t}={format_profile(a)}, "
                    f"{describe_history(h, w)}"
                )
                try:
                    row = game.kernel(t, a, h, w)
                except Exception as exc:
                    report.add("structure", location, f"kernel raised {exc!r}")
                    continue

                def outcome_key(key: Any, t: int = t) -> Optional[str]:
                    try:
                        (recalled, signals), state = key
                    except (TypeError, ValueError):
                        return f"malformed outcome {key!r}"
                    problem = _profile_problem(
                        tuple(recalled), game.stage_actions(t), "recalled action"
                    ) or _profile_problem(tuple(signals), next_signals, "signal")
                    if problem:
                        return problem
                    if state not in game.states[t]:
                        return f"unknown state {state!r}"
                    return None

                _check_row(report, location, row, outcome_key)
                for key, p in row.items():
                    if p > 0 and outcome_key(key) is None and tuple(key[0][0]) != tuple(a):
                        report.add(
                            "perfect_recall",
                            location,
                            f"recalled {format_profile(key[0][0])} has probability "
                            f"{format_rational(p)}",
                        )
                for child_h, child_w, _ in game.children(t, a, h, w):
                    seen.setdefault((child_h, child_w), None)
            if len(seen) > limit:
                return _cap_breach(game, report, limit, len(seen), t + 1)
        layer = list(seen)

    size = len(layer) * len(game.action_profiles(game.stages))
    if size > limit:
        return _cap_breach(game, report, limit, size, game.stages + 1)

    groups: Dict[
        Tuple[Tuple[Profile, ...], StatePath], Tuple[TerminalHistory, Tuple[Fraction, ...]]
    ] = {}
    for h, w in layer:
        for a in game.action_profiles(game.stages):
            terminal = TerminalHistory(h + ((a, ()),), w)
            try:
                vector = payoff_vector(game, terminal)
            except Exception as exc:
                report.add("payoff_shape", terminal.describe(), f"payoff raised {exc!r}")
                continue
            if len(vector) != n:
                report.add(
                    "payoff_shape", terminal.describe(), f"{len(vector)} payoffs for {n} players"
                )
                continue
            key = (terminal.actions, terminal.states)
            if key in groups and groups[key][1] != vector:
                report.add(
                    "payoff_signal_dependence",
                    terminal.describe(),
                    f"differs from {groups[key][0].describe()} with the same actions and states",
                )
            groups.setdefault(key, (terminal, vector))
    logger.debug("validate_game %s: %d issues", game.name, len(report.issues))
    return report


# ============================================================================
# Strategies
# ============================================================================


def kuhn_reduced_strategies(
    points_by_stage: Sequence[Sequence[Hashable]],
    actions_at: Callable[[Hashable], Sequence[Label]],
    parent: Callable[[Hashable], Hashable],
    last_own_action: Callable[[Hashable], Label],
    cap: int,
    cap_name: str = "strategies",
) -> List[Dict[Hashable, Label]]:
    """
    Pure strategies defined only at points reachable under their own choices.

    A stage-``t`` point is reached when its parent was reached and the parent's
    chosen action equals the point's recorded last own action.

    Raises:
        CapExceededError: If more than ``cap`` strategies exist
    """
    strategies: List[Dict[Hashable, Label]] = [{}]
    for t, points in enumerate(points_by_stage):
        extended: List[Dict[Hashable, Label]] = []
        for strategy in strategies:
            if t == 0:
                reached = list(points)
            else:
                reached = [
                    p for p in points if strategy.get(parent(p), _UNSET) == last_own_action(p)
                ]
            for choice in itertools.product(*(actions_at(p) for p in reached)):
                updated = dict(strategy)
                updated.update(zip(reached, choice))
                extended.append(updated)
                if len(extended) > cap:
                    logger.warning("Cap on %s (%d) exceeded", cap_name, cap)
                    raise CapExceededError(cap_name, cap)
        strategies = extended
    return strategies


_UNSET = object()


def decision_points(game: BaseGame, player: Hashable) -> List[List[Tuple[int, PrivateHistory]]]:
    """Per stage, the private histories ``(t, h_i^t)`` player ``i`` can reach."""
    index = game.player_index(player)
    tree = game.tree()
    points: List[List[Tuple[int, PrivateHistory]]] = []
    for t, layer in enumerate(tree.prefixes, start=1):
        seen: Dict[Tuple[int, PrivateHistory], None] = {}
        for h, _ in layer:
            seen.setdefault((t, tuple(project(record, index) for record in h)), None)
        points.append(list(seen))
    return points


def enumerate_pure_strategies(
    game: BaseGame, player: Hashable, cap: Optional[int] = None
) -> List[Dict[Tuple[int, PrivateHistory], Label]]:
    """Kuhn-reduced pure strategies of ``player`` in ``game``."""
    index = game.player_index(player)
    if cap is None:
        from ..core.config import config

        cap = config.limits.strategies
    return kuhn_reduced_strategies(
        decision_points(game, player),
        lambda point: game.actions[index][point[0] - 1],
        lambda point: (point[0] - 1, point[1][:-1]),
        lambda point: point[1][-1][0],
        cap,
    )


def pure_nash_equilibria(
    game: BaseGame, cap: Optional[int] = None
) -> List[Tuple[Dict[Tuple[int, PrivateHistory], Label], ...]]:
    """Pure-strategy Nash equilibria by exhaustive enumeration."""
    per_player = [enumerate_pure_strategies(game, p, cap) for p in game.players]
    values: Dict[Tuple[int, ...], Tuple[Fraction, ...]] = {}
    for combo in itertools.product(*(range(len(s)) for s in per_player)):
        behaviors = [pure_behavior(per_player[i][k]) for i, k in enumerate(combo)]
        values[combo] = play(game, behaviors).expected_payoffs(game)

    equilibria = []
    for combo, payoff in values.items():
        stable = True
        for i, options in enumerate(per_player):
            for k in range(len(options)):
                deviation = combo[:i] + (k,) + combo[i + 1 :]
                if values[deviation][i] > payoff[i]:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            equilibria.append(tuple(per_player[i][k] for i, k in enumerate(combo)))
    logger.debug("%d pure Nash equilibria in %s", len(equilibria), game.name)
    return equilibria


__all__ = [
    "BaseGame",
    "GameTree",
    "TerminalHistory",
    "OutcomeDistribution",
    "ValidationIssue",
    "ValidationReport",
    "Behavior",
    "describe_history",
    "project",
    "singleton_sets",
    "forward",
    "play",
    "pure_behavior",
    "open_loop_distribution",
    "enumerate_terminal_histories",
    "outcome_probability",
    "private_history",
    "payoff_vector",
    "validate_game",
    "kuhn_reduced_strategies",
    "decision_points",
    "enumerate_pure_strategies",
    "pure_nash_equilibria",
]
