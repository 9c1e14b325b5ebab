"""
Candidate-equilibrium bundles.

A bundle names the mediation ranges, the candidate (a mixture of rules, or
explicit kernels) and the beliefs. Schema::

    ranges:                               # optional; silent cells allow every action
      - player: "2"
        stage: 2
        own_history: [["-"], ["-", "1"]] # optional
        recommendations: ["-"]            # own past recommendations, optional
        allowed: ["0"]
    rules: [...]                          # mixture document (see bce.io)
    kernels:                              # optional; replaces the mixture's kernels
      - stage: 2
        given: {history: [...], recommendations: [["T", "-"]]}
        distribution:
          - {recommend: ["-", "L"], prob: "1"}
    beliefs:                              # weak perfect variant
      - player: "2"
        support:
          - {history: [[[], ["-", "-"]], [["B", "-"], ["-", "-"]]],
             states: ["-", "-"], recommendations: [["T", "-"], ["-", "R"]], prob: "1"}
    cps:                                  # sequential variant
      kind: pessimistic                   # or lexicographic / perturbed
      state_order: ["1", "2"]

CPS elements are ``{rule, actions, states?, history?}`` where ``rule`` indexes
the ``rules`` list. With a ``cps`` section the bundle is checked as a
sequential candidate, otherwise as a weak perfect one.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import sympy
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.errors import GameFileError
from ..core.logger import get_logger
from ..core.types import History, Label, PrivateHistory, Profile, Rational
from ..games.base import BaseGame, TerminalHistory
from ..games.io import _labels, parse_model, read_document
from ..bce.feedback import BCEMixture
from ..bce.io import RuleConditioning, mixture_from_dict
from ..bce.mediated import info_set
from .cps import CPS, LexicographicCPS, PerturbedCPS, pessimistic_cps
from .kernels import KernelKey, RecommendationKernels, kernels_from_mixture
from .ranges import MediationRange
from .verify import BeliefSystem, MediatedHistory, RefinementReport, verify_sbce, verify_wpbce

logger = get_logger(__name__)


# ============================================================================
# Document Models
# ============================================================================


class RangeEntry(BaseModel):
    player: str
    stage: int = Field(..., ge=1)
    own_history: Optional[List[List[str]]] = None
    recommendations: Optional[List[str]] = None
    allowed: List[str] = Field(..., min_length=1)

    model_config = ConfigDict(extra="forbid")

    @field_validator("player", "own_history", "recommendations", "allowed", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)

    @property
    def specificity(self) -> int:
        return (self.own_history is not None) + (self.recommendations is not None)

    def applies(self, own: PrivateHistory, past: Tuple[Label, ...]) -> bool:
        if self.own_history is not None and tuple(tuple(r) for r in self.own_history) != own:
            return False
        if self.recommendations is not None and tuple(self.recommendations) != past:
            return False
        return True


class KernelOutcome(BaseModel):
    recommend: List[str]
    prob: Rational

    model_config = ConfigDict(extra="forbid")

    @field_validator("recommend", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return _labels(v)


class KernelEntry(BaseModel):
    stage: int = Field(..., ge=1)
    given: RuleConditioning = Field(default_factory=RuleConditioning)
    distribution: List[KernelOutcome] = Field(..., min_length=1)

    model_config = ConfigDict(extra="forbid")


class SupportEntry(BaseModel):
    history: List[List[List[str]]]
    states: List[str]
    recommendations: List[List[str]]
    prob: Rational

    model_config = ConfigDict(extra="forbid")

    @field_validator("history", "states", "recommendations", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return _labels(v)

    def key(self) -> MediatedHistory:
        h = tuple((tuple(b), tuple(s)) for b, s in self.history)
        return h, tuple(self.states), tuple(tuple(r) for r in self.recommendations)


class BeliefEntry(BaseModel):
    player: str
    support: List[SupportEntry] = Field(..., min_length=1)

    model_config = ConfigDict(extra="forbid")

    @field_validator("player", mode="before")
    @classmethod
    def as_label(cls, v: Any) -> Any:
        return _labels(v)


class ElementSpec(BaseModel):
    rule: int = Field(..., ge=0)
    actions: List[List[str]]
    states: Optional[List[str]] = None
    history: Optional[List[List[List[str]]]] = None

    model_config = ConfigDict(extra="forbid")

    @field_validator("actions", "states", "history", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)

    def matches(self, terminal: TerminalHistory) -> bool:
        if tuple(tuple(a) for a in self.actions) != terminal.actions:
            return False
        if self.states is not None and tuple(self.states) != tuple(terminal.states):
            return False
        if self.history is not None:
            given = tuple((tuple(b), tuple(s)) for b, s in self.history)
            if given != terminal.history[: len(given)]:
                return False
        return True


class WeightedElement(ElementSpec):
    prob: Optional[Rational] = None
    weight: Optional[str] = None


class CPSSpec(BaseModel):
    kind: Literal["pessimistic", "lexicographic", "perturbed"]
    state_order: Optional[List[str]] = None
    levels: Optional[List[List[WeightedElement]]] = None
    weights: Optional[List[WeightedElement]] = None

    model_config = ConfigDict(extra="forbid")

    @field_validator("state_order", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)

    @model_validator(mode="after")
    def check_kind(self) -> "CPSSpec":
        if self.kind == "lexicographic" and not self.levels:
            raise ValueError("a lexicographic CPS needs levels")
        if self.kind == "perturbed" and not self.weights:
            raise ValueError("a perturbed CPS needs weights")
        return self


class BundleDocument(BaseModel):
    ranges: List[RangeEntry] = Field(default_factory=list)
    rules: Optional[List[Dict[str, Any]]] = None
    kernels: List[KernelEntry] = Field(default_factory=list)
    beliefs: List[BeliefEntry] = Field(default_factory=list)
    cps: Optional[CPSSpec] = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def check_candidate(self) -> "BundleDocument":
        if self.rules is None and not self.kernels:
            raise ValueError("a bundle needs rules or kernels")
        if self.cps is not None and self.rules is None:
            raise ValueError("a cps section needs rules")
        return self


# ============================================================================
# Bundle
# ============================================================================


@dataclass
class RefinementBundle:
    """A resolved candidate, ready for ``verify_bundle``."""

    game: BaseGame
    ranges: MediationRange
    mixture: Optional[BCEMixture] = None
    kernels: Optional[RecommendationKernels] = None
    beliefs: BeliefSystem = field(default_factory=BeliefSystem)
    cps: Optional[CPS] = None

    @property
    def sequential(self) -> bool:
        return self.cps is not None


def _player(game: BaseGame, label: str, source: str) -> int:
    if label not in game.players:
        raise GameFileError(f"{source}: unknown player {label!r}")
    return game.players.index(label)


def ranges_from_entries(
    game: BaseGame, entries: List[RangeEntry], source: str = "ranges"
) -> MediationRange:
    by_cell: Dict[Tuple[int, int], List[RangeEntry]] = {}
    for entry in entries:
        i = _player(game, entry.player, source)
        if entry.stage > game.stages:
            raise GameFileError(f"{source}: range for stage {entry.stage} > {game.stages}")
        unknown = [a for a in entry.allowed if a not in game.actions[i][entry.stage - 1]]
        if unknown:
            raise GameFileError(f"{source}: unknown actions {unknown} for player {entry.player}")
        by_cell.setdefault((i, entry.stage), []).append(entry)

    def rule(i: int, t: int, own: PrivateHistory, past: Tuple[Label, ...]) -> Tuple[Label, ...]:
        best: Optional[RangeEntry] = None
        for entry in by_cell.get((i, t), []):
            if entry.applies(own, past) and (best is None or entry.specificity > best.specificity):
                best = entry
        return tuple(best.allowed) if best is not None else game.actions[i][t - 1]

    return MediationRange(game, rule=rule if by_cell else None)


def _past_recommendations(
    game: BaseGame, ranges: MediationRange, t: int, h: History
) -> List[Tuple[Profile, ...]]:
    sequences: List[Tuple[Profile, ...]] = [()]
    for k in range(1, t):
        sequences = [
            recs + (a,) for recs in sequences for a in ranges.allowed_profiles(k, h, recs)
        ]
    return sequences


def kernels_from_entries(
    game: BaseGame, ranges: MediationRange, entries: List[KernelEntry], source: str = "kernels"
) -> RecommendationKernels:
    """Explicit rows at every tree prefix some entry matches; others stay uniform."""
    by_stage: Dict[int, List[KernelEntry]] = {}
    for entry in entries:
        if entry.stage > game.stages:
            raise GameFileError(f"{source}: kernel for stage {entry.stage} > {game.stages}")
        for outcome in entry.distribution:
            if tuple(outcome.recommend) not in game.action_profiles(entry.stage):
                raise GameFileError(
                    f"{source}: {outcome.recommend} is not a stage-{entry.stage} profile"
                )
        by_stage.setdefault(entry.stage, []).append(entry)

    rows: Dict[KernelKey, Dict[Profile, Fraction]] = {}
    for t, layer in enumerate(game.tree().prefixes, start=1):
        if t not in by_stage:
            continue
        for h, w in layer:
            for recs in _past_recommendations(game, ranges, t, h):
                matching = [e for e in by_stage[t] if e.given.applies(h, w, recs)]
                if not matching:
                    continue
                top = max(e.given.specificity for e in matching)
                row: Dict[Profile, Fraction] = {}
                for e in matching:
                    if e.given.specificity != top:
                        continue
                    for outcome in e.distribution:
                        a = tuple(outcome.recommend)
                        row[a] = row.get(a, Fraction(0)) + outcome.prob
                rows[(t, h, w, recs)] = row
    return RecommendationKernels(game, rows, ranges)


def beliefs_from_entries(
    game: BaseGame, entries: List[BeliefEntry], source: str = "beliefs"
) -> BeliefSystem:
    """
    Raises:
        GameFileError: If a belief's support spans several private histories
    """
    beliefs = BeliefSystem()
    for n, entry in enumerate(entries):
        i = _player(game, entry.player, source)
        table: Dict[MediatedHistory, Fraction] = {}
        owners = set()
        for support in entry.support:
            h, w, recs = support.key()
            if len(h) != len(w) or len(recs) != len(h):
                raise GameFileError(f"{source}: belief {n} mixes stages")
            owners.add(info_set(h, recs, i))
            table[(h, w, recs)] = table.get((h, w, recs), Fraction(0)) + support.prob
        if len(owners) != 1:
            raise GameFileError(f"{source}: belief {n} spans {len(owners)} private histories")
        beliefs.set(i, owners.pop(), table)
    return beliefs


def _resolve(
    game: BaseGame, spec: ElementSpec, rules: int, source: str
) -> Tuple[int, TerminalHistory]:
    if spec.rule >= rules:
        raise GameFileError(f"{source}: rule index {spec.rule} out of range")
    found = [z for z in game.tree().terminals if spec.matches(z)]
    if len(found) != 1:
        raise GameFileError(f"{source}: element matches {len(found)} terminal histories")
    return spec.rule, found[0]


def cps_from_spec(game: BaseGame, mixture: BCEMixture, spec: CPSSpec, source: str = "cps") -> CPS:
    rules = len(mixture.entries)
    if spec.kind == "pessimistic":
        return pessimistic_cps(game, mixture, spec.state_order)
    if spec.kind == "lexicographic":
        levels = []
        for level in spec.levels or []:
            table: Dict[Tuple[int, TerminalHistory], Fraction] = {}
            for element in level:
                if element.prob is None:
                    raise GameFileError(f"{source}: lexicographic elements need prob")
                table[_resolve(game, element, rules, source)] = element.prob
            levels.append(table)
        return LexicographicCPS(levels)
    weights = {}
    for element in spec.weights or []:
        if element.weight is None:
            raise GameFileError(f"{source}: perturbed elements need weight")
        try:
            weights[_resolve(game, element, rules, source)] = sympy.sympify(element.weight)
        except sympy.SympifyError as e:
            raise GameFileError(f"{source}: bad weight {element.weight!r}: {e}")
    return PerturbedCPS(weights)


def bundle_from_dict(
    game: BaseGame, data: Dict[str, Any], source: str = "bundle"
) -> RefinementBundle:
    document: BundleDocument = parse_model(BundleDocument, data, source)
    ranges = ranges_from_entries(game, document.ranges, source)
    mixture = None
    if document.rules is not None:
        mixture = mixture_from_dict(game, {"rules": document.rules}, source)
    kernels = None
    if document.kernels:
        kernels = kernels_from_entries(game, ranges, document.kernels, source)
    beliefs = beliefs_from_entries(game, document.beliefs, source)
    cps = cps_from_spec(game, mixture, document.cps, source) if document.cps and mixture else None
    return RefinementBundle(game, ranges, mixture, kernels, beliefs, cps)


def load_bundle(game: BaseGame, path: Union[str, Path]) -> RefinementBundle:
    bundle = bundle_from_dict(game, read_document(path), str(path))
    logger.info(
        "Loaded %s bundle from %s", "sequential" if bundle.sequential else "weak perfect", path
    )
    return bundle


def verify_bundle(bundle: RefinementBundle) -> RefinementReport:
    """Run the verifier the bundle asks for."""
    if bundle.cps is not None and bundle.mixture is not None:
        return verify_sbce(bundle.game, bundle.ranges, bundle.mixture, bundle.cps)
    kernels = bundle.kernels
    if kernels is None:
        assert bundle.mixture is not None
        kernels = kernels_from_mixture(bundle.game, bundle.mixture, bundle.ranges)
    return verify_wpbce(bundle.game, bundle.ranges, kernels, bundle.beliefs)


__all__ = [
    "RangeEntry",
    "KernelEntry",
    "BeliefEntry",
    "CPSSpec",
    "BundleDocument",
    "RefinementBundle",
    "ranges_from_entries",
    "kernels_from_entries",
    "beliefs_from_entries",
    "cps_from_spec",
    "bundle_from_dict",
    "load_bundle",
    "verify_bundle",
]
