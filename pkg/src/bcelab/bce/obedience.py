"""
Obedience linear programs.

Two mediator encodings define the same polytope of outcome distributions:

* ``rules``: one variable per feedback rule (per rule and stage-1 draw when the
  prior is free);
* ``sequences``: one variable per mediator sequence ``(h^t, w^t, â^t)``
  visited by obedient play or by a single deviator, tied together by
  realization constraints.

Two deviation encodings express "no pure deviation is profitable":

* ``pure``: one row per Kuhn-reduced pure deviation strategy;
* ``recursive``: free value variables ``v_J`` per deviator information set
  with ``v_J >= (value of action a at J)`` and ``obedient >= sum of root values``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import History, Profile, StatePath
from ..games.base import BaseGame, TerminalHistory, payoff_vector
from ..lp.simplex import LinearProgram
from .feedback import (
    BCEMixture,
    FeedbackRule,
    MixtureEntry,
    count_feedback_rules,
    enumerate_feedback_rules,
)
from .mediated import (
    AllRecommendations,
    InfoSet,
    Leaf,
    StartNode,
    Step,
    consistent_with,
    count_deviations,
    enumerate_deviations,
    traverse,
)

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

MediatorSequence = Tuple[History, StatePath, Tuple[Profile, ...]]


class SolverOptions(BaseModel):
    """How an obedience LP is assembled."""

    mediator_encoding: Literal["auto", "rules", "sequences"] = Field(
        default="auto", description="Variables: feedback rules or mediator sequences"
    )
    deviation_encoding: Literal["auto", "pure", "recursive"] = Field(
        default="auto", description="Rows: pure deviations or recursive best-response values"
    )
    reduced_rules: bool = Field(default=False, description="Enumerate rules on (t, h, w) cells")
    rules: Optional[List[Any]] = Field(
        default=None, description="Restricted rule family (answers become one-sided)"
    )
    free_prior: bool = Field(
        default=False, description="Mix jointly over rules and the stage-1 draw"
    )
    cap_rules: Optional[int] = Field(default=None, ge=1)
    cap_deviations: Optional[int] = Field(default=None, ge=1)

    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    @property
    def restricted(self) -> bool:
        return self.rules is not None

    def limits(self) -> Tuple[int, int, int, int]:
        from ..core.config import config

        return (
            self.cap_rules or config.limits.rules,
            self.cap_deviations or config.limits.deviations,
            config.solver.auto_rule_limit,
            config.solver.auto_deviation_limit,
        )


@dataclass
class ObedienceLP:
    """
    Obedience constraints over a mixture, as an exact LP without objective.

    Attributes:
        game: The base game
        lp: Constraints (probability/realization rows and obedience rows)
        encoding: ``rules`` or ``sequences``
        deviation_encoding: ``pure`` or ``recursive``
        columns: Rule entries (``rules``) or mediator sequences (``sequences``)
        num_mixture_vars: Variables describing the mixture; value variables follow
        outcome: Obedient probability of each terminal history as a linear form
        payoff: Obedient expected payoff of each player as a linear form
        row_labels: Description of every obedience row
        deviation_count: Pure deviations per player (when counted)
    """

    game: BaseGame
    lp: LinearProgram
    encoding: str
    deviation_encoding: str
    columns: List[Any]
    num_mixture_vars: int
    outcome: Dict[TerminalHistory, Dict[int, Fraction]]
    payoff: List[Dict[int, Fraction]]
    row_labels: List[str] = field(default_factory=list)
    deviation_count: List[int] = field(default_factory=list)
    restricted: bool = False
    free_prior: bool = False
    initial: Dict[Tuple[History, StatePath], Fraction] = field(default_factory=dict)

    def with_objective(self, objective: Dict[int, Fraction]) -> LinearProgram:
        """Copy of the constraints with a maximization objective."""
        return LinearProgram(
            num_vars=self.lp.num_vars,
            equalities=list(self.lp.equalities),
            inequalities=list(self.lp.inequalities),
            objective=dict(objective),
            free_vars=set(self.lp.free_vars),
            names=list(self.lp.names),
        )

    def direction_objective(self, direction: Sequence[Fraction]) -> Dict[int, Fraction]:
        if len(direction) != self.game.num_players:
            raise ShapeMismatchError(f"Direction needs {self.game.num_players} entries")
        objective: Dict[int, Fraction] = {}
        for d, form in zip(direction, self.payoff):
            if not d:
                continue
            for col, c in form.items():
                objective[col] = objective.get(col, ZERO) + Fraction(d) * c
        return objective

    def decode(self, solution: Sequence[Fraction]) -> BCEMixture:
        """Witness mixture from an LP solution."""
        x = list(solution[: self.num_mixture_vars])
        if self.encoding == "rules":
            entries = [
                MixtureEntry(rule, value, initial)
                for (rule, initial), value in zip(self.columns, x)
                if value > 0
            ]
            return BCEMixture(tuple(entries))
        return decompose_realization_plan(self, x)


# ============================================================================
# Assembly
# ============================================================================


def _initial_key(history: History, states: StatePath) -> Tuple[Profile, Any]:
    return history[0][1], states[0]


def _rule_columns(
    game: BaseGame, options: SolverOptions, cap_rules: int
) -> List[Tuple[Any, Optional[Tuple[Profile, Any]]]]:
    rules = options.rules
    if rules is None:
        rules = enumerate_feedback_rules(game, options.reduced_rules, cap=cap_rules)
    if options.free_prior:
        inits = [_initial_key(h, w) for h, w, _ in game.initial_rows()]
        return [(rule, init) for rule in rules for init in inits]
    return [(rule, None) for rule in rules]


def _rule_start_nodes(game: BaseGame, columns: List[Tuple[Any, Any]]) -> List[StartNode]:
    nodes: List[StartNode] = []
    for k, (rule, init) in enumerate(columns):
        if init is None:
            for h, w, p in game.initial_rows():
                nodes.append(StartNode(p, rule, 1, h, w, (), k))
        else:
            signals, state = init
            nodes.append(StartNode(ONE, rule, 1, (((), tuple(signals)),), (state,), (), k))
    return nodes


def _choose_encodings(game: BaseGame, options: SolverOptions) -> Tuple[str, str]:
    cap_rules, cap_devs, auto_rules, auto_devs = options.limits()
    mediator = options.mediator_encoding
    if options.restricted:
        mediator = "rules"
    elif mediator == "auto":
        count = count_feedback_rules(game, options.reduced_rules, auto_rules)
        if options.free_prior:
            count *= max(1, sum(1 for _ in game.initial_rows()))
        mediator = "rules" if count <= auto_rules else "sequences"
    deviation = options.deviation_encoding
    if deviation == "auto":
        if mediator == "sequences":
            deviation = "recursive"
        else:
            counts = [count_deviations(game, i) for i in range(game.num_players)]
            deviation = "pure" if max(counts) <= auto_devs else "recursive"
    return mediator, deviation


def assemble_obedience_lp(game: BaseGame, options: Optional[SolverOptions] = None) -> ObedienceLP:
    """
    Build the obedience LP of ``game``.

    Raises:
        CapExceededError: If the rule family or the deviation family is too large
    """
    options = options or SolverOptions()
    cap_rules, cap_devs, _, _ = options.limits()
    encoding, deviation_encoding = _choose_encodings(game, options)
    lp = LinearProgram()

    columns: List[Any]
    if encoding == "rules":
        columns = _rule_columns(game, options, cap_rules)
        for k, (rule, init) in enumerate(columns):
            lp.add_variable(f"mu{k}")
        nodes = _rule_start_nodes(game, columns)
        lp.add_equality({k: ONE for k in range(len(columns))}, ONE)
    else:
        mediator = AllRecommendations(game)
        nodes = [StartNode(ONE, mediator, 1, h, w, (), None) for h, w, _ in game.initial_rows()]
        columns = []

    obedient_leaves = list(traverse(game, nodes))
    branch_leaves = [
        list(traverse(game, nodes, deviator=i, branch=True)) for i in range(game.num_players)
    ]

    seq_index: Dict[MediatorSequence, int] = {}
    if encoding == "sequences":
        columns = _collect_sequences(game, obedient_leaves, branch_leaves)
        seq_index = {s: k for k, s in enumerate(columns)}
        for k in range(len(columns)):
            lp.add_variable(f"y{k}")
        _add_realization_rows(game, lp, columns, seq_index, options.free_prior)

    def column(leaf: Leaf) -> int:
        if encoding == "rules":
            return leaf.column  # type: ignore[return-value]
        return seq_index[leaf.sequence]

    outcome: Dict[TerminalHistory, Dict[int, Fraction]] = {}
    payoff: List[Dict[int, Fraction]] = [{} for _ in game.players]
    for leaf in obedient_leaves:
        col = column(leaf)
        row = outcome.setdefault(leaf.terminal, {})
        row[col] = row.get(col, ZERO) + leaf.weight
        for i, u in enumerate(payoff_vector(game, leaf.terminal)):
            if u:
                payoff[i][col] = payoff[i].get(col, ZERO) + leaf.weight * u

    num_mixture_vars = lp.num_vars
    row_labels: List[str] = []
    deviation_count: List[int] = []
    for i in range(game.num_players):
        leaves = branch_leaves[i]
        if deviation_encoding == "pure":
            deviations = enumerate_deviations(game, i, cap_devs)
            deviation_count.append(len(deviations))
            for g in deviations:
                row = dict(payoff[i])
                for leaf in leaves:
                    if consistent_with(leaf.path, g.choices):
                        u = payoff_vector(game, leaf.terminal)[i]
                        if u:
                            col = column(leaf)
                            row[col] = row.get(col, ZERO) - leaf.weight * u
                row = {c: v for c, v in row.items() if v}
                if row:
                    lp.add_inequality(row, ZERO)
                    row_labels.append(f"player {game.players[i]}: {g.describe()}")
        else:
            _add_recursive_rows(game, lp, i, leaves, payoff[i], column, row_labels)

    logger.debug(
        "Obedience LP for %s: %s/%s encoding, %d variables, %d rows",
        game.name,
        encoding,
        deviation_encoding,
        lp.num_vars,
        lp.num_constraints,
    )
    initial = {(h, w): p for h, w, p in game.initial_rows()}
    return ObedienceLP(
        game=game,
        lp=lp,
        encoding=encoding,
        deviation_encoding=deviation_encoding,
        columns=columns,
        num_mixture_vars=num_mixture_vars,
        outcome=outcome,
        payoff=payoff,
        row_labels=row_labels,
        deviation_count=deviation_count,
        restricted=options.restricted,
        free_prior=options.free_prior,
        initial=initial,
    )


def _collect_sequences(
    game: BaseGame, obedient: List[Leaf], branches: List[List[Leaf]]
) -> List[MediatorSequence]:
    seen: Dict[MediatorSequence, None] = {}
    for leaves in [obedient] + branches:
        for leaf in leaves:
            h, w, recs = leaf.sequence
            for t in range(1, game.stages + 1):
                seen.setdefault((h[:t], w[:t], recs[:t]), None)
    return sorted(seen, key=lambda s: len(s[0]))


def _add_realization_rows(
    game: BaseGame,
    lp: LinearProgram,
    columns: List[MediatorSequence],
    index: Dict[MediatorSequence, int],
    free_prior: bool,
) -> None:
    cells: Dict[Tuple[History, StatePath, Tuple[Profile, ...]], List[int]] = {}
    for k, (h, w, recs) in enumerate(columns):
        cells.setdefault((h, w, recs[:-1]), []).append(k)
    initial = {(h, w): p for h, w, p in game.initial_rows()}
    stage_one: Dict[int, Fraction] = {}
    for (h, w, past), members in cells.items():
        row = {k: ONE for k in members}
        t = len(h)
        if t == 1:
            if free_prior:
                stage_one.update(row)
            else:
                lp.add_equality(row, initial[(h, w)])
        else:
            parent = index[(h[:-1], w[:-1], past)]
            row[parent] = -ONE
            lp.add_equality(row, ZERO)
    if free_prior:
        lp.add_equality(stage_one, ONE)


def _add_recursive_rows(
    game: BaseGame,
    lp: LinearProgram,
    player: int,
    leaves: List[Leaf],
    obedient_payoff: Dict[int, Fraction],
    column: Any,
    labels: List[str],
) -> None:
    direct: Dict[Step, Dict[int, Fraction]] = {}
    children: Dict[Step, Dict[InfoSet, None]] = {}
    steps: Dict[Step, None] = {}
    roots: Dict[InfoSet, None] = {}
    for leaf in leaves:
        path = leaf.path
        roots.setdefault(path[0][0], None)
        for step in path:
            steps.setdefault(step, None)
        for k in range(len(path) - 1):
            children.setdefault(path[k], {}).setdefault(path[k + 1][0], None)
        u = payoff_vector(game, leaf.terminal)[player]
        if u:
            col = column(leaf)
            row = direct.setdefault(path[-1], {})
            row[col] = row.get(col, ZERO) + leaf.weight * u

    value: Dict[InfoSet, int] = {}
    for J, _ in steps:
        if J not in value:
            value[J] = lp.add_variable(f"v{len(value)}[p{player}]", free=True)

    for step in steps:
        J, a = step
        row: Dict[int, Fraction] = {value[J]: ONE}
        for child in children.get(step, {}):
            row[value[child]] = row.get(value[child], ZERO) - ONE
        for col, c in direct.get(step, {}).items():
            row[col] = row.get(col, ZERO) - c
        lp.add_inequality(row, ZERO)
    root_row = dict(obedient_payoff)
    for J in roots:
        root_row[value[J]] = root_row.get(value[J], ZERO) - ONE
    lp.add_inequality(root_row, ZERO)
    labels.append(f"player {game.players[player]}: recursive best response")


# ============================================================================
# Witness Decomposition
# ============================================================================


def decompose_realization_plan(problem: ObedienceLP, y: Sequence[Fraction]) -> BCEMixture:
    """
    Write a realization plan as a mixture of feedback rules.

    Each round builds a pure plan that follows positive residual mass, removes
    the largest multiple of its indicator that keeps the residual nonnegative,
    and repeats until nothing is left.
    """
    game = problem.game
    columns: List[MediatorSequence] = problem.columns
    residual = [Fraction(v) for v in y]
    cells: Dict[Tuple[History, StatePath, Tuple[Profile, ...]], List[int]] = {}
    for k, (h, w, recs) in enumerate(columns):
        cells.setdefault((h, w, recs[:-1]), []).append(k)
    by_stage: Dict[int, List[Tuple[History, StatePath, Tuple[Profile, ...]]]] = {}
    for cell in cells:
        by_stage.setdefault(len(cell[0]), []).append(cell)
    fallback = tuple(game.action_profiles(t)[0] for t in range(1, game.stages + 1))
    index = {s: k for k, s in enumerate(columns)}

    entries: List[MixtureEntry] = []
    remaining = sum((residual[k] for k, s in enumerate(columns) if len(s[0]) == 1), ZERO)
    while remaining > 0:
        choice: Dict[Tuple[Any, ...], Profile] = {}
        indicator: Dict[int, Fraction] = {}
        chosen_initial: Optional[Tuple[History, StatePath]] = None
        if problem.free_prior:
            best = next(
                k for k in range(len(columns)) if len(columns[k][0]) == 1 and residual[k] > 0
            )
            chosen_initial = (columns[best][0], columns[best][1])
        for t in range(1, game.stages + 1):
            for cell in by_stage.get(t, []):
                h, w, past = cell
                members = cells[cell]
                if t == 1:
                    if problem.free_prior:
                        reach = ONE if (h, w) == chosen_initial else ZERO
                    else:
                        reach = problem.initial.get((h, w), ZERO)
                else:
                    reach = indicator.get(index[(h[:-1], w[:-1], past)], ZERO)
                positive = [k for k in members if residual[k] > 0]
                k = positive[0] if (reach and positive) else members[0]
                choice[(t, h, w, past)] = columns[k][2][-1]
                if reach:
                    indicator[k] = reach
        weight = min(residual[k] / v for k, v in indicator.items())
        for k, v in indicator.items():
            residual[k] -= weight * v
        rule = FeedbackRule(tuple(choice.items()), False, fallback)
        initial = None
        if chosen_initial is not None:
            h, w = chosen_initial
            initial = (h[0][1], w[0])
        entries.append(MixtureEntry(rule, weight, initial))
        remaining -= weight
    return BCEMixture(tuple(entries))


__all__ = [
    "SolverOptions",
    "ObedienceLP",
    "assemble_obedience_lp",
    "decompose_realization_plan",
]
