"""
Verification of weak perfect and sequential Bayes correlated equilibria.

Both verifiers check obedience at every private history ``(h_i^t, â_i^t)``
whose recommendations lie in the mediation ranges, against every deviation
that obeys up to stage ``t-1``. Beliefs are inputs: a belief system over
mediated histories ``(h^t, w^t, â^t)`` for the weak perfect variant, a CPS over
``(rule, terminal history)`` pairs for the sequential one.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field

from ..core.errors import ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import History, Profile, StatePath, format_profile, format_rational
from ..games.base import BaseGame, TerminalHistory, describe_history
from ..bce.feedback import BCEMixture
from ..bce.mediated import (
    InfoSet,
    Mediator,
    StartNode,
    best_response,
    describe_info_set,
    deviation_points,
    info_set,
    start_nodes_from_prior,
    traverse,
)
from .cps import CPS
from .kernels import RecommendationKernels
from .ranges import MediationRange

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

MediatedHistory = Tuple[History, StatePath, Tuple[Profile, ...]]
Element = Tuple[int, TerminalHistory]

IssueKind = Literal[
    "obedience",
    "belief",
    "missing_belief",
    "support",
    "range",
    "cps_consistency",
]


class RefinementIssue(BaseModel):
    """One violated condition."""

    kind: IssueKind = Field(..., description="Condition family")
    player: str = Field(default="", description="Player concerned, if any")
    location: str = Field(..., description="Private history or cell")
    detail: str = Field(default="", description="Exact values involved")


class RefinementReport(BaseModel):
    """All violations; empty iff the candidate passes."""

    issues: List[RefinementIssue] = Field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.issues

    def add(self, kind: IssueKind, location: str, detail: str = "", player: object = "") -> None:
        self.issues.append(
            RefinementIssue(kind=kind, player=str(player), location=location, detail=detail)
        )

    def kinds(self) -> List[str]:
        return sorted({issue.kind for issue in self.issues})

    def of_player(self, player: object, kind: Optional[IssueKind] = None) -> List[RefinementIssue]:
        return [
            i for i in self.issues if i.player == str(player) and (kind is None or i.kind == kind)
        ]

    def lines(self) -> List[str]:
        out = []
        for i in self.issues:
            who = f" player {i.player}" if i.player else ""
            out.append(f"[{i.kind}]{who} {i.location}: {i.detail}")
        return out


@dataclass
class BeliefSystem:
    """``{(player index, (t, h_i^t, â_i^t)): {(h^t, w^t, â^t): probability}}``."""

    tables: Dict[Tuple[int, InfoSet], Dict[MediatedHistory, Fraction]] = field(default_factory=dict)

    def get(self, player: int, J: InfoSet) -> Optional[Dict[MediatedHistory, Fraction]]:
        return self.tables.get((player, J))

    def set(self, player: int, J: InfoSet, belief: Dict[MediatedHistory, Fraction]) -> None:
        self.tables[(player, J)] = dict(belief)


def _has_choice(game: BaseGame, player: int, t: int) -> bool:
    return any(len(game.actions[player][k - 1]) > 1 for k in range(t, game.stages + 1))


def _check_obedience(
    game: BaseGame,
    report: RefinementReport,
    player: int,
    J: InfoSet,
    nodes: List[StartNode],
) -> None:
    leaves = list(traverse(game, nodes, deviator=player, branch=True))
    if not leaves:
        return
    br = best_response(game, leaves, player)
    if br.gain > 0:
        report.add(
            "obedience",
            describe_info_set(J),
            f"{br.strategy.describe()} gives {format_rational(br.value)} > "
            f"{format_rational(br.obedient_value)}",
            game.players[player],
        )


# ============================================================================
# Weak perfect Bayes correlated equilibrium
# ============================================================================


def _prefix_probabilities(game: BaseGame, mediator: Mediator) -> Dict[MediatedHistory, Fraction]:
    probs: Dict[MediatedHistory, Fraction] = {}
    for leaf in traverse(game, start_nodes_from_prior(game, mediator)):
        h, w = leaf.terminal.history[:-1], leaf.terminal.states
        for t in range(1, game.stages + 1):
            key = (h[:t], w[:t], leaf.recommendations[:t])
            probs[key] = probs.get(key, ZERO) + leaf.weight
    return probs


def verify_wpbce(
    game: BaseGame,
    ranges: MediationRange,
    kernels: RecommendationKernels,
    beliefs: BeliefSystem,
) -> RefinementReport:
    """
    Check obedience under ``beliefs`` at every range-consistent private
    history, and Bayes consistency of ``beliefs`` wherever the private history
    has positive probability under obedient play.

    Raises:
        ShapeMismatchError: If the kernels belong to another game
    """
    if kernels.game.stages != game.stages or kernels.game.num_players != game.num_players:
        raise ShapeMismatchError("Kernels and game do not match")
    report = RefinementReport()
    tree = game.tree()

    for (t, h, w, recs), row in kernels.rows.items():
        if not ranges.contains(h, recs):
            continue
        allowed = ranges.allowed_profiles(t, h, recs)
        for a, p in row.items():
            if p > 0 and a not in allowed:
                report.add(
                    "range",
                    f"stage {t}, {describe_history(h, w)}",
                    f"{format_profile(a)} outside range",
                )
        total = sum(row.values(), ZERO)
        if total != 1:
            report.add(
                "range",
                f"stage {t}, {describe_history(h, w)}",
                f"kernel sums to {format_rational(total)}",
            )

    prefix = _prefix_probabilities(game, kernels)
    on_tree = [set(layer) for layer in tree.prefixes]
    for i, player in enumerate(game.players):
        grouped: Dict[InfoSet, Dict[MediatedHistory, Fraction]] = {}
        for key, p in prefix.items():
            h, _, recs = key
            grouped.setdefault(info_set(h, recs, i), {})[key] = p

        candidates: Dict[InfoSet, None] = {}
        for points in deviation_points(game, i):
            for J in points:
                if ranges.consistent_private(i, J[1], J[2]):
                    candidates[J] = None
        for (owner, J) in beliefs.tables:
            if owner == i:
                candidates.setdefault(J, None)

        for J in candidates:
            t = J[0]
            supplied = beliefs.get(i, J)
            mass = grouped.get(J)
            belief: Optional[Dict[MediatedHistory, Fraction]] = None
            if mass:
                total = sum(mass.values(), ZERO)
                belief = {key: p / total for key, p in mass.items()}
                if supplied is not None:
                    given = {k: v for k, v in supplied.items() if v}
                    if given != belief:
                        report.add(
                            "belief",
                            describe_info_set(J),
                            "belief differs from Bayes' rule",
                            player,
                        )
            elif supplied is not None:
                belief = {k: v for k, v in supplied.items() if v}
            elif _has_choice(game, i, t):
                report.add(
                    "missing_belief",
                    describe_info_set(J),
                    "off-path history without a belief",
                    player,
                )
                continue
            else:
                continue

            total = sum(belief.values(), ZERO)
            if total != 1:
                report.add(
                    "support",
                    describe_info_set(J),
                    f"belief sums to {format_rational(total)}",
                    player,
                )
            bad = [
                key
                for key in belief
                if len(key[0]) != t
                or len(key[2]) != t
                or (key[0], key[1]) not in on_tree[t - 1]
                or info_set(key[0], key[2], i) != J
            ]
            if bad:
                h, w, _ = bad[0]
                report.add(
                    "support",
                    describe_info_set(J),
                    f"{describe_history(h, w)} does not match the private history",
                    player,
                )
                continue
            nodes = [StartNode(p, kernels, t, h, w, recs) for (h, w, recs), p in belief.items()]
            _check_obedience(game, report, i, J, nodes)
    logger.info("verify_wpbce: %d issues", len(report.issues))
    return report


# ============================================================================
# Sequential Bayes correlated equilibrium
# ============================================================================


def _obedient_distribution(
    game: BaseGame, rule: Mediator, t: int, h: History, w: StatePath, recs: Tuple[Profile, ...]
) -> Dict[TerminalHistory, Fraction]:
    out: Dict[TerminalHistory, Fraction] = {}
    for leaf in traverse(game, [StartNode(ONE, rule, t, h, w, recs)]):
        out[leaf.terminal] = out.get(leaf.terminal, ZERO) + leaf.weight
    return out


def _rule_outcomes(game: BaseGame, mixture: BCEMixture, k: int) -> Dict[TerminalHistory, Fraction]:
    entry = mixture.entries[k]
    if entry.initial is None:
        nodes = start_nodes_from_prior(game, entry.rule)
    else:
        signals, state = entry.initial
        nodes = [StartNode(ONE, entry.rule, 1, (((), tuple(signals)),), (state,))]
    out: Dict[TerminalHistory, Fraction] = {}
    for leaf in traverse(game, nodes):
        out[leaf.terminal] = out.get(leaf.terminal, ZERO) + leaf.weight
    return out


def _signatures(game: BaseGame, mixture: BCEMixture) -> List[List[Tuple[Profile, ...]]]:
    """``sig[k][t-1]``: rule ``k``'s stage-``1..t`` choices on every tree cell."""
    tree = game.tree()
    out: List[List[Tuple[Profile, ...]]] = []
    for entry in mixture.entries:
        stages: List[Tuple[Profile, ...]] = []
        acc: Tuple[Profile, ...] = ()
        for layer in tree.prefixes:
            acc = acc + tuple(
                tuple(entry.rule.on_path(game, h, w)[-1])  # type: ignore[attr-defined]
                for h, w in layer
            )
            stages.append(acc)
        out.append(stages)
    return out


def _fmt_element(element: Hashable) -> str:
    k, z = element  # type: ignore[misc]
    return f"rule {k}, {z.describe()}"


def verify_sbce(
    game: BaseGame,
    ranges: MediationRange,
    mixture: BCEMixture,
    cps: CPS,
) -> RefinementReport:
    """
    Check a candidate sequential Bayes correlated equilibrium.

    The CPS lives on ``(rule index, terminal history)`` pairs, rule indices
    referring to ``mixture.entries``.
    """
    report = RefinementReport()
    tree = game.tree()
    entries = mixture.entries
    if mixture.total != 1:
        raise ShapeMismatchError(f"Mixture sums to {format_rational(mixture.total)}, not 1")

    for k, entry in enumerate(entries):
        if entry.weight > 0:
            problem = ranges.rule_violation(entry.rule)
            if problem:
                report.add("range", f"rule {k}", problem)

    ground = cps.universe
    outcomes = [_rule_outcomes(game, mixture, k) for k in range(len(entries))]
    expected = {
        (k, z): entries[k].weight * p
        for k in range(len(entries))
        for z, p in outcomes[k].items()
        if entries[k].weight > 0
    }
    missing = [e for e in expected if e not in ground]
    if missing:
        report.add(
            "cps_consistency",
            _fmt_element(missing[0]),
            "obedient outcome outside the CPS ground set",
        )
        logger.info("verify_sbce: ground set incomplete")
        return report

    prior = cps.distribution(ground)
    for element in set(prior) | set(expected):
        have, want = prior.get(element, ZERO), expected.get(element, ZERO)
        if have != want:
            report.add(
                "cps_consistency",
                _fmt_element(element),
                f"β = {format_rational(have)}, μ(f)·P(h,w) = {format_rational(want)}",
            )

    elements: List[Element] = [
        e for e in cps.ground if isinstance(e, tuple) and len(e) == 2  # type: ignore[misc]
    ]
    signature = _signatures(game, mixture)
    recs_of: Dict[Element, Tuple[Profile, ...]] = {
        (k, z): tuple(
            entries[k].rule.on_path(game, z.history[:-1], z.states)  # type: ignore[attr-defined]
        )
        for k, z in elements
    }

    for t in range(1, game.stages + 1):
        groups: Dict[Tuple[Tuple[Profile, ...], History, StatePath], List[Element]] = {}
        for k, z in elements:
            key = (signature[k][t - 1], z.history[:t], z.states[:t])
            groups.setdefault(key, []).append((k, z))
        for (_, h, w), event in groups.items():
            dist = cps.distribution(event)
            for k in sorted({k for k, _ in event}):
                weight = sum((p for (j, _), p in dist.items() if j == k), ZERO)
                rule = entries[k].rule
                continuation = _obedient_distribution(
                    game, rule, t, h, w, recs_of_prefix(game, rule, h, w)
                )
                zs = {z for j, z in event if j == k}
                for z in zs | set(continuation):
                    have = dist.get((k, z), ZERO)
                    want = weight * continuation.get(z, ZERO)
                    if have != want:
                        report.add(
                            "cps_consistency",
                            f"stage {t}, rule {k}, {z.describe()}",
                            f"β = {format_rational(have)}, expected {format_rational(want)}",
                        )

    for i, player in enumerate(game.players):
        events: Dict[InfoSet, List[Element]] = {}
        for element in elements:
            _, z = element
            recs = recs_of[element]
            for t in range(1, game.stages + 1):
                J = info_set(z.history[:t], recs[:t], i)
                events.setdefault(J, []).append(element)
        for J, event in events.items():
            t = J[0]
            if not _has_choice(game, i, t) or not ranges.consistent_private(i, J[1], J[2]):
                continue
            dist = cps.distribution(event)
            weights: Dict[Tuple[int, History, StatePath], Fraction] = {}
            for (k, z), p in dist.items():
                key = (k, z.history[:t], z.states[:t])
                weights[key] = weights.get(key, ZERO) + p
            nodes = [
                StartNode(p, entries[k].rule, t, h, w, recs_of_prefix(game, entries[k].rule, h, w))
                for (k, h, w), p in weights.items()
                if p
            ]
            _check_obedience(game, report, i, J, nodes)
    logger.info("verify_sbce: %d issues", len(report.issues))
    return report


def recs_of_prefix(game: BaseGame, rule: Mediator, h: History, w: StatePath) -> Tuple[Profile, ...]:
    """Recommendations of a deterministic rule through the last stage of ``h``."""
    return tuple(rule.on_path(game, h, w))  # type: ignore[attr-defined]


__all__ = [
    "MediatedHistory",
    "RefinementIssue",
    "RefinementReport",
    "BeliefSystem",
    "verify_wpbce",
    "verify_sbce",
    "recs_of_prefix",
]
