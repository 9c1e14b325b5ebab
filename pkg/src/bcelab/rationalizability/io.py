"""
Decision-problem files.

Utilities are listed per complete profile, or as per-period payoffs summed
over periods::

    name: table1
    actions: [["l", "c", "r"], ["l", "c", "r"]]
    states: ["w", "w'"]
    stage_payoffs:
      - {period: 1, action: c, state: w, value: 1}
      - {period: 2, action: r, state: "w'", value: 1}
    # or
    utility:
      - {actions: ["l", "c"], state: w, value: "1"}

Profiles or stage cells that are not listed have utility zero.
"""

import itertools
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.errors import GameFileError
from ..core.logger import get_logger
from ..core.types import Rational, format_rational
from ..games.io import _labels, parse_model, read_document
from .problem import ActionPath, DecisionProblem, additive_problem

logger = get_logger(__name__)


class UtilityEntry(BaseModel):
    actions: List[str]
    state: str
    value: Rational

    model_config = ConfigDict(extra="forbid")

    @field_validator("actions", "state", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return _labels(v)


class StagePayoffEntry(BaseModel):
    period: int = Field(..., ge=1)
    action: str
    state: str
    value: Rational

    model_config = ConfigDict(extra="forbid")

    @field_validator("action", "state", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return _labels(v)


class ProblemDocument(BaseModel):
    name: str = "problem"
    actions: List[List[str]]
    states: List[str]
    utility: List[UtilityEntry] = Field(default_factory=list)
    stage_payoffs: List[StagePayoffEntry] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")

    @field_validator("actions", "states", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return _labels(v)

    @model_validator(mode="after")
    def one_form(self) -> "ProblemDocument":
        if self.utility and self.stage_payoffs:
            raise ValueError("give either utility or stage_payoffs, not both")
        return self


def problem_from_dict(data: Dict[str, Any], source: str = "problem") -> DecisionProblem:
    document: ProblemDocument = parse_model(ProblemDocument, data, source)
    actions = tuple(tuple(labels) for labels in document.actions)
    states = tuple(document.states)

    if document.stage_payoffs:
        stage: Dict[Tuple[int, str, str], Fraction] = {
            (t, a, w): Fraction(0)
            for t, labels in enumerate(actions, start=1)
            for a in labels
            for w in states
        }
        for entry in document.stage_payoffs:
            key = (entry.period, entry.action, entry.state)
            if key not in stage:
                raise GameFileError(
                    f"{source}: no action {entry.action} in period {entry.period} "
                    f"or state {entry.state}"
                )
            stage[key] = entry.value
        return additive_problem(actions, states, stage, document.name)

    utility: Dict[Tuple[ActionPath, str], Fraction] = {}
    for entry in document.utility:
        utility[(tuple(entry.actions), entry.state)] = entry.value
    profiles = _profiles(actions)
    for profile in profiles:
        for w in states:
            utility.setdefault((profile, w), Fraction(0))
    unknown = [key for key in utility if key[0] not in profiles or key[1] not in states]
    if unknown:
        raise GameFileError(f"{source}: utility entry {unknown[0]} is outside the problem")
    return DecisionProblem(actions, states, utility, document.name)


def _profiles(actions: Tuple[Tuple[str, ...], ...]) -> List[ActionPath]:
    return [tuple(a) for a in itertools.product(*actions)]


def load_problem(path: Union[str, Path]) -> DecisionProblem:
    problem = problem_from_dict(read_document(path), str(path))
    logger.info("Loaded decision problem %s from %s", problem.name, path)
    return problem


def problem_to_dict(problem: DecisionProblem) -> Dict[str, Any]:
    return {
        "name": problem.name,
        "actions": [[str(a) for a in labels] for labels in problem.actions],
        "states": [str(w) for w in problem.states],
        "utility": [
            {
                "actions": [str(a) for a in profile],
                "state": str(w),
                "value": format_rational(problem.u(profile, w)),
            }
            for profile in problem.profiles()
            for w in problem.states
        ],
    }


__all__ = ["ProblemDocument", "problem_from_dict", "load_problem", "problem_to_dict"]
