"""
Mediated play.

A mediator recommends an action profile at every stage after observing the
full history, the states and its own past recommendations. This module walks
the game under a mediator while all players obey, or while one player (the
deviator) follows a policy or branches over all of its actions. Leaves carry
the deviator's information-set path, which is what the obedience LPs and the
best-response dynamic program are built from.

A deviator information set is ``(t, h_i^t, â_i^t)``: stage, private history and
the player's own recommendations so far.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (
    Callable,
    Dict,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Protocol,
    Sequence,
    Tuple,
    runtime_checkable,
)

from ..core.errors import CapExceededError
from ..core.logger import get_logger
from ..core.types import History, Label, PrivateHistory, Profile, StatePath, format_profile
from ..games.base import BaseGame, TerminalHistory, decision_points, payoff_vector, project

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

InfoSet = Tuple[int, PrivateHistory, Tuple[Label, ...]]
Step = Tuple[InfoSet, Label]
Sequence_ = Tuple[History, StatePath, Tuple[Profile, ...]]


@runtime_checkable
class Mediator(Protocol):
    """Anything that recommends profiles given ``(t, h^t, w^t, â^{t-1})``."""

    def recommend(
        self, t: int, history: History, states: StatePath, recommendations: Tuple[Profile, ...]
    ) -> Mapping[Profile, Fraction]: ...


@dataclass(frozen=True)
class AllRecommendations:
    """Pseudo-mediator proposing every profile with weight one (sequence encoding)."""

    game: BaseGame

    def recommend(
        self, t: int, history: History, states: StatePath, recommendations: Tuple[Profile, ...]
    ) -> Mapping[Profile, Fraction]:
        return {a: ONE for a in self.game.action_profiles(t)}


@dataclass(frozen=True)
class StartNode:
    """
    Where a traversal begins.

    ``history``/``states`` hold a stage-``stage`` prefix. When
    ``len(recommendations) == stage`` the stage's recommendation is already
    drawn and the mediator is not consulted at that stage.
    """

    weight: Fraction
    mediator: Mediator
    stage: int
    history: History
    states: StatePath
    recommendations: Tuple[Profile, ...] = ()
    column: Optional[Hashable] = None


class Leaf(NamedTuple):
    weight: Fraction
    terminal: TerminalHistory
    recommendations: Tuple[Profile, ...]
    path: Tuple[Step, ...]
    column: Optional[Hashable]

    @property
    def sequence(self) -> Sequence_:
        """Mediator sequence ``(h^T, w^T, â^T)`` ending at this leaf."""
        return self.terminal.history[:-1], self.terminal.states, self.recommendations


Policy = Callable[[InfoSet], Mapping[Label, Fraction]]


def info_set(history: History, recommendations: Tuple[Profile, ...], player: int) -> InfoSet:
    t = len(history)
    own = tuple(project(record, player) for record in history)
    return t, own, tuple(rec[player] for rec in recommendations)


def start_nodes_from_prior(
    game: BaseGame, mediator: Mediator, weight: Fraction = ONE, column: Optional[Hashable] = None
) -> List[StartNode]:
    """One start node per positive stage-1 prefix, weighted by ``p_1``."""
    return [
        StartNode(weight * p, mediator, 1, h, w, (), column) for h, w, p in game.initial_rows()
    ]


def traverse(
    game: BaseGame,
    nodes: Iterable[StartNode],
    deviator: Optional[int] = None,
    policy: Optional[Policy] = None,
    branch: bool = False,
) -> Iterator[Leaf]:
    """
    Walk the game from every start node.

    Args:
        game: The base game
        nodes: Start nodes
        deviator: Index of the deviating player (None: everybody obeys)
        policy: Deviator's behavior at an information set (default: obey)
        branch: Expand every deviator action with weight one

    Yields:
        Leaves with positive weight (deviator branching excluded from weights)
    """
    T = game.stages
    for node in nodes:
        stack: List[Tuple[int, History, StatePath, Tuple[Profile, ...], Fraction, Tuple[Step, ...]]]
        stack = [(node.stage, node.history, node.states, node.recommendations, node.weight, ())]
        while stack:
            t, h, w, recs, weight, path = stack.pop()
            if len(recs) >= t:
                options: Mapping[Profile, Fraction] = {recs[t - 1]: ONE}
                recs = recs[: t - 1]
            else:
                options = node.mediator.recommend(t, h, w, recs)
            pending = []
            for rec, q in options.items():
                if not q:
                    continue
                rec = tuple(rec)
                recs_t = recs + (rec,)
                if deviator is None:
                    moves = [(rec, ONE, path)]
                else:
                    J = info_set(h, recs_t, deviator)
                    if branch:
                        choices: Iterable[Tuple[Label, Fraction]] = [
                            (a, ONE) for a in game.actions[deviator][t - 1]
                        ]
                    elif policy is not None:
                        choices = policy(J).items()
                    else:
                        choices = [(rec[deviator], ONE)]
                    moves = [
                        (rec[:deviator] + (a,) + rec[deviator + 1 :], p, path + ((J, a),))
                        for a, p in choices
                        if p
                    ]
                for action, p, new_path in moves:
                    for child_h, child_w, r in game.children(t, action, h, w):
                        new_weight = weight * q * p * r
                        if not new_weight:
                            continue
                        if t == T:
                            yield Leaf(
                                new_weight,
                                TerminalHistory(child_h, child_w),
                                recs_t,
                                new_path,
                                node.column,
                            )
                        else:
                            pending.append((t + 1, child_h, child_w, recs_t, new_weight, new_path))
            stack.extend(reversed(pending))


# ============================================================================
# Deviation Strategies
# ============================================================================


def _fmt_private(own: PrivateHistory) -> str:
    return "".join(format_profile(record) for record in own)


def describe_info_set(J: InfoSet) -> str:
    t, own, recs = J
    return f"t{t} h={_fmt_private(own)} rec={format_profile(recs)}"


@dataclass(frozen=True)
class DeviationStrategy:
    """
    A pure deviation of one player, defined at the information sets it can
    reach under its own choices.
    """

    player: int
    choices: Mapping[InfoSet, Label] = field(default_factory=dict)

    def policy(self, J: InfoSet) -> Mapping[Label, Fraction]:
        action = self.choices.get(J, J[2][-1])
        return {action: ONE}

    @property
    def trivial(self) -> bool:
        """True when it obeys at every information set."""
        return all(a == J[2][-1] for J, a in self.choices.items())

    def describe(self) -> str:
        parts = [
            f"{describe_info_set(J)} -> {a}" for J, a in self.choices.items() if a != J[2][-1]
        ]
        return "; ".join(parts) if parts else "obey"


def deviation_points(game: BaseGame, player: int) -> List[List[InfoSet]]:
    """Every ``(t, h_i^t, â_i^t)``: reachable private history × own recommendation sequence."""
    points: List[List[InfoSet]] = []
    for t, stage_points in enumerate(decision_points(game, player), start=1):
        recs = list(itertools.product(*(game.actions[player][k] for k in range(t))))
        points.append([(t, own, r) for _, own in stage_points for r in recs])
    return points


def _parent(J: InfoSet) -> InfoSet:
    t, own, recs = J
    return t - 1, own[:-1], recs[:-1]


def _last_own(J: InfoSet) -> Label:
    return J[1][-1][0]


def count_kuhn_strategies(
    points_by_stage: Sequence[Sequence[Hashable]],
    actions_at: Callable[[Hashable], Sequence[Label]],
    parent: Callable[[Hashable], Hashable],
    last_own_action: Callable[[Hashable], Label],
) -> int:
    """Number of Kuhn-reduced pure strategies (without enumerating them)."""
    children: Dict[Tuple[Hashable, Label], List[Hashable]] = {}
    for points in points_by_stage[1:]:
        for p in points:
            children.setdefault((parent(p), last_own_action(p)), []).append(p)
    count: Dict[Hashable, int] = {}
    for points in reversed(points_by_stage):
        for p in points:
            total = 0
            for a in actions_at(p):
                product = 1
                for c in children.get((p, a), []):
                    product *= count[c]
                total += product
            count[p] = total
    result = 1
    for p in points_by_stage[0] if points_by_stage else []:
        result *= count[p]
    return result


def count_deviations(game: BaseGame, player: int) -> int:
    return count_kuhn_strategies(
        deviation_points(game, player),
        lambda J: game.actions[player][J[0] - 1],
        _parent,
        _last_own,
    )


def enumerate_deviations(
    game: BaseGame, player: int, cap: Optional[int] = None
) -> List[DeviationStrategy]:
    """
    Kuhn-reduced pure deviation strategies of ``player`` (the obedient one included).

    Raises:
        CapExceededError: If there are more than ``cap`` of them
    """
    from ..games.base import kuhn_reduced_strategies

    if cap is None:
        from ..core.config import config

        cap = config.limits.deviations
    count = count_deviations(game, player)
    if count > cap:
        logger.warning(
            "Player %s has %d pure deviations (cap %d)", game.players[player], count, cap
        )
        raise CapExceededError("deviations", cap, count)
    strategies = kuhn_reduced_strategies(
        deviation_points(game, player),
        lambda J: game.actions[player][J[0] - 1],
        _parent,
        _last_own,
        cap,
        "deviations",
    )
    return [DeviationStrategy(player, choices) for choices in strategies]


# ============================================================================
# Evaluation
# ============================================================================


class RecommendedOutcome(NamedTuple):
    terminal: TerminalHistory
    recommendations: Tuple[Profile, ...]


def outcome_under(
    game: BaseGame,
    mediator: Mediator,
    deviation: Optional[DeviationStrategy] = None,
) -> Dict[RecommendedOutcome, Fraction]:
    """
    Distribution over ``(h, w, â)`` when the mediator follows ``mediator``,
    ``deviation.player`` follows ``deviation`` and everybody else obeys.
    """
    nodes = start_nodes_from_prior(game, mediator)
    if deviation is None:
        leaves = traverse(game, nodes)
    else:
        leaves = traverse(game, nodes, deviator=deviation.player, policy=deviation.policy)
    result: Dict[RecommendedOutcome, Fraction] = {}
    for leaf in leaves:
        key = RecommendedOutcome(leaf.terminal, leaf.recommendations)
        result[key] = result.get(key, ZERO) + leaf.weight
    return result


def obeys(path: Sequence[Step]) -> bool:
    return all(a == J[2][-1] for J, a in path)


def consistent_with(path: Sequence[Step], choices: Mapping[InfoSet, Label]) -> bool:
    return all(choices.get(J, J[2][-1]) == a for J, a in path)


@dataclass
class BestResponse:
    """Best response of one player to a fixed mediator (ex ante, unnormalized)."""

    player: int
    obedient_value: Fraction
    value: Fraction
    strategy: DeviationStrategy

    @property
    def gain(self) -> Fraction:
        return self.value - self.obedient_value


def best_response(game: BaseGame, leaves: Iterable[Leaf], player: int) -> BestResponse:
    """
    Backward induction over the deviator's information sets.

    ``leaves`` must come from a branching traversal for ``player``. Ties
    prefer obedience.
    """
    direct: Dict[Step, Fraction] = {}
    children: Dict[Step, Dict[InfoSet, None]] = {}
    actions: Dict[InfoSet, Dict[Label, None]] = {}
    roots: Dict[InfoSet, None] = {}
    obedient = ZERO
    for leaf in leaves:
        u = payoff_vector(game, leaf.terminal)[player]
        path = leaf.path
        roots.setdefault(path[0][0], None)
        for J, a in path:
            actions.setdefault(J, {}).setdefault(a, None)
        for k in range(len(path) - 1):
            children.setdefault(path[k], {}).setdefault(path[k + 1][0], None)
        direct[path[-1]] = direct.get(path[-1], ZERO) + leaf.weight * u
        if obeys(path):
            obedient += leaf.weight * u

    value: Dict[InfoSet, Fraction] = {}
    best: Dict[InfoSet, Label] = {}
    for J in sorted(actions, key=lambda j: -j[0]):
        rec = J[2][-1]
        top: Optional[Tuple[Fraction, Label]] = None
        ordered = sorted(actions[J], key=lambda a: a != rec)
        for a in ordered:
            v = direct.get((J, a), ZERO) + sum(
                (value[c] for c in children.get((J, a), {})), ZERO
            )
            if top is None or v > top[0]:
                top = (v, a)
        assert top is not None
        value[J], best[J] = top

    reached: Dict[InfoSet, Label] = {}
    frontier = list(roots)
    while frontier:
        J = frontier.pop()
        reached[J] = best[J]
        frontier.extend(children.get((J, best[J]), {}))
    total = sum((value[J] for J in roots), ZERO)
    return BestResponse(player, obedient, total, DeviationStrategy(player, reached))


__all__ = [
    "InfoSet",
    "Step",
    "Mediator",
    "AllRecommendations",
    "StartNode",
    "Leaf",
    "Policy",
    "info_set",
    "start_nodes_from_prior",
    "traverse",
    "describe_info_set",
    "DeviationStrategy",
    "deviation_points",
    "count_kuhn_strategies",
    "count_deviations",
    "enumerate_deviations",
    "RecommendedOutcome",
    "outcome_under",
    "obeys",
    "consistent_with",
    "BestResponse",
    "best_response",
]
