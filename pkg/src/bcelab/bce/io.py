"""
Target distributions and rule mixtures as documents.

Target schema::

    outcomes:
      - {actions: [["T", "-"], ["-", "L"]], prob: "1/2"}     # states / history optional
      - {actions: [["B", "-"], ["-", "L"]], prob: "1/2"}

Each entry must identify exactly one terminal history of the game.

Mixture schema::

    rules:
      - name: punish-after-B
        weight: "1/2"
        initial: {signals: ["-", "-"], state: "-"}          # only for a free prior
        default: [["T", "-"], ["-", "R"]]                   # per stage, optional
        cells:
          - stage: 1
            recommend: ["T", "-"]
          - stage: 2
            given: {obedient: true}
            recommend: ["-", "L"]

A cell's ``given`` accepts the game-file conditioning fields (``actions``
meaning the recalled profile of the previous stage) plus ``recommendations``
(the rule's past recommendations) and ``obedient``. The matching cell with
the most fields wins; stages with no match use ``default``.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..core.errors import GameFileError
from ..core.logger import get_logger
from ..core.types import History, Profile, Rational, StatePath, format_rational
from ..games.base import BaseGame, OutcomeDistribution, TerminalHistory
from ..games.io import Conditioning, _labels, parse_model, read_document
from .feedback import BCEMixture, FeedbackRule, FunctionRule, MixtureEntry, RuleBase, tabulate

logger = get_logger(__name__)


# ============================================================================
# Targets
# ============================================================================


class TargetEntry(BaseModel):
    actions: List[List[str]]
    states: Optional[List[str]] = None
    history: Optional[List[List[List[str]]]] = None
    prob: Rational

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


class TargetDocument(BaseModel):
    outcomes: List[TargetEntry] = Field(..., min_length=1)

    model_config = ConfigDict(extra="forbid")


def target_from_dict(
    game: BaseGame, data: Dict[str, Any], source: str = "target"
) -> OutcomeDistribution:
    """
    Resolve a target document against the terminal histories of ``game``.

    Raises:
        GameFileError: If an entry matches no terminal history or several
    """
    document: TargetDocument = parse_model(TargetDocument, data, source)
    terminals = game.tree().terminals
    pairs = []
    for k, entry in enumerate(document.outcomes):
        found = [z for z in terminals if entry.matches(z)]
        if not found:
            raise GameFileError(f"{source}: outcome {k} matches no terminal history")
        if len(found) > 1:
            raise GameFileError(
                f"{source}: outcome {k} matches {len(found)} terminal histories; "
                "add states or history"
            )
        pairs.append((found[0], entry.prob))
    return OutcomeDistribution.from_pairs(pairs)


def load_target(game: BaseGame, path: Union[str, Path]) -> OutcomeDistribution:
    return target_from_dict(game, read_document(path), str(path))


def target_to_dict(target: OutcomeDistribution) -> Dict[str, Any]:
    return {
        "outcomes": [
            {
                "actions": [[str(x) for x in a] for a in z.actions],
                "states": [str(w) for w in z.states],
                "history": [[[str(x) for x in b], [str(x) for x in s]] for b, s in z.history[:-1]],
                "prob": format_rational(p),
            }
            for z, p in target.weights.items()
        ]
    }


# ============================================================================
# Mixtures
# ============================================================================


class RuleConditioning(Conditioning):
    recommendations: Optional[List[List[str]]] = None
    obedient: Optional[bool] = None

    @field_validator(
        "actions", "state", "states", "signals", "history", "recommendations", mode="before"
    )
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)

    def applies(
        self, history: History, states: StatePath, recommendations: tuple
    ) -> bool:
        recalled = history[-1][0]
        if self.actions is not None and not recalled:
            return False
        if not self.matches(recalled, history, states):
            return False
        if self.recommendations is not None:
            if tuple(tuple(r) for r in self.recommendations) != tuple(recommendations):
                return False
        if self.obedient is not None:
            followed = all(
                tuple(history[k][0]) == tuple(recommendations[k - 1])
                for k in range(1, len(history))
            )
            if followed != self.obedient:
                return False
        return True


class RuleCell(BaseModel):
    stage: int = Field(..., ge=1)
    given: RuleConditioning = Field(default_factory=RuleConditioning)
    recommend: List[str]

    model_config = ConfigDict(extra="forbid")

    @field_validator("recommend", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return _labels(v)


class InitialDraw(BaseModel):
    signals: List[str]
    state: str

    model_config = ConfigDict(extra="forbid")

    @field_validator("signals", "state", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return _labels(v)


class RuleSpec(BaseModel):
    name: Optional[str] = None
    weight: Rational = Fraction(1)
    initial: Optional[InitialDraw] = None
    default: Optional[List[List[str]]] = None
    cells: List[RuleCell] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")

    @field_validator("default", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)


class MixtureDocument(BaseModel):
    rules: List[RuleSpec] = Field(..., min_length=1)

    model_config = ConfigDict(extra="forbid")


def compile_rule(game: BaseGame, spec: RuleSpec, position: int = 0) -> FunctionRule:
    """
    Turn a rule specification into a feedback rule.

    Raises:
        GameFileError: If a profile does not fit the game's action sets
    """
    label = spec.name or f"rule{position}"
    for cell in spec.cells:
        if cell.stage > game.stages:
            raise GameFileError(f"{label}: cell for stage {cell.stage} > {game.stages}")
        if tuple(cell.recommend) not in game.action_profiles(cell.stage):
            raise GameFileError(f"{label}: {cell.recommend} is not a stage-{cell.stage} profile")
    if spec.default is not None:
        if len(spec.default) != game.stages:
            raise GameFileError(f"{label}: default must list {game.stages} profiles")
        default = tuple(tuple(p) for p in spec.default)
        for t, p in enumerate(default, start=1):
            if p not in game.action_profiles(t):
                raise GameFileError(f"{label}: default {list(p)} is not a stage-{t} profile")
    else:
        default = tuple(game.action_profiles(t)[0] for t in range(1, game.stages + 1))

    by_stage: Dict[int, List[RuleCell]] = {}
    for cell in spec.cells:
        by_stage.setdefault(cell.stage, []).append(cell)

    def fn(t: int, h: History, w: StatePath, recs: tuple) -> Profile:
        best: Optional[RuleCell] = None
        for cell in by_stage.get(t, []):
            if not cell.given.applies(h, w, recs):
                continue
            if best is None or cell.given.specificity > best.given.specificity:
                best = cell
        return tuple(best.recommend) if best is not None else default[t - 1]

    return FunctionRule(fn, label)


def mixture_from_dict(game: BaseGame, data: Dict[str, Any], source: str = "mixture") -> BCEMixture:
    document: MixtureDocument = parse_model(MixtureDocument, data, source)
    entries = []
    for k, spec in enumerate(document.rules):
        if spec.weight < 0:
            raise GameFileError(f"{source}: negative weight on rule {k}")
        initial = None
        if spec.initial is not None:
            initial = (tuple(spec.initial.signals), spec.initial.state)
        entries.append(MixtureEntry(compile_rule(game, spec, k), spec.weight, initial))
    return BCEMixture(tuple(entries))


def load_mixture(game: BaseGame, path: Union[str, Path]) -> BCEMixture:
    mixture = mixture_from_dict(game, read_document(path), str(path))
    logger.info("Loaded mixture with %d rules from %s", len(mixture.entries), path)
    return mixture


def load_rules(game: BaseGame, path: Union[str, Path]) -> List[RuleBase]:
    """Rules of a mixture document, weights ignored (restricted families)."""
    return [e.rule for e in load_mixture(game, path).entries]  # type: ignore[misc]


def _strs(values: Any) -> List[str]:
    return [str(x) for x in values]


def mixture_to_dict(game: BaseGame, mixture: BCEMixture) -> Dict[str, Any]:
    """Explicit document: every cell of every supported rule, in full form."""
    rules = []
    for k, entry in enumerate(mixture.support()):
        rule = entry.rule
        if not isinstance(rule, FeedbackRule):
            rule = tabulate(rule, game, reduced=True)  # type: ignore[arg-type]
        cells = []
        for key, profile in rule.cells:
            t, h, w = key[:3]
            given: Dict[str, Any] = {
                "history": [[_strs(b), _strs(s)] for b, s in h],
                "states": _strs(w),
            }
            if len(key) > 3:
                given["recommendations"] = [_strs(r) for r in key[3]]
            cells.append({"stage": t, "given": given, "recommend": _strs(profile)})
        spec: Dict[str, Any] = {
            "name": rule.label or f"rule{k}",
            "weight": format_rational(entry.weight),
            "cells": cells,
        }
        if rule.fallback:
            spec["default"] = [_strs(p) for p in rule.fallback]
        if entry.initial is not None:
            spec["initial"] = {"signals": _strs(entry.initial[0]), "state": str(entry.initial[1])}
        rules.append(spec)
    return {"rules": rules}


def save_mixture(game: BaseGame, mixture: BCEMixture, path: Union[str, Path]) -> None:
    document = json.dumps(mixture_to_dict(game, mixture), indent=2)
    Path(path).write_text(document + "\n", encoding="utf-8")


__all__ = [
    "TargetEntry",
    "TargetDocument",
    "target_from_dict",
    "load_target",
    "target_to_dict",
    "RuleConditioning",
    "RuleCell",
    "RuleSpec",
    "MixtureDocument",
    "compile_rule",
    "mixture_from_dict",
    "load_mixture",
    "load_rules",
    "mixture_to_dict",
    "save_mixture",
]
