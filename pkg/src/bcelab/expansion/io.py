"""
Expansion and kernel-family files.

Both are read against a base game. An expansion lists message sets and
sparse ``ξ`` entries::

    name: example1-signals
    messages:                         # per player, one list per stage
      "1": [["t", "b"], ["-"]]
      "2": [["-"], ["l", "r"]]
    xi_kernels:
      - stage: 2
        given: {actions: ["T", "-"], messages: [["t", "-"]]}
        outcome: ["-", "l"]
        prob: "1"

``given`` takes the game-file conditioning fields on the base history
``h^t`` plus ``messages`` (the message profiles of stages ``1..t-1``). The
most specific matching entries form the row; a point no entry matches gets
the uniform distribution.

A kernel family carries ``raw_kernels: true`` and the kernels ``π`` directly::

    raw_kernels: true
    messages: {"1": [["0", "1"], ["-"]]}
    initial_kernel:
      - {messages: ["1"], state: "-", prob: "1/2"}
    transition_kernels:
      - stage: 2
        given: {actions: ["1"], messages: [["1"]]}
        outcome: {state: "1", messages: ["-"]}
        prob: "2/3"
"""

from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.errors import GameFileError
from ..core.logger import get_logger
from ..core.types import History, Label, Profile, Rational, StatePath, format_rational
from ..games.base import BaseGame
from ..games.io import Conditioning, _labels, _player_rows, parse_model, read_document
from .kernels import (
    Expansion,
    KernelFamily,
    MessagePath,
    MessageSets,
    combine,
    family_game,
    message_profiles,
    split_history,
)

logger = get_logger(__name__)

PlayerTable = Union[Dict[str, List[List[str]]], List[List[List[str]]]]


class MessageConditioning(Conditioning):
    messages: Optional[List[List[str]]] = None

    def applies(
        self, action: Profile, history: History, states: StatePath, past: MessagePath
    ) -> bool:
        if not self.matches(action, history, states):
            return False
        if self.messages is not None and tuple(tuple(m) for m in self.messages) != tuple(past):
            return False
        return True


class XiEntry(BaseModel):
    stage: int = Field(..., ge=1)
    given: MessageConditioning = Field(default_factory=MessageConditioning)
    outcome: List[str]
    prob: Rational

    model_config = ConfigDict(extra="forbid")

    @field_validator("outcome", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return _labels(v)


class FamilyInitial(BaseModel):
    signals: Optional[List[str]] = None
    messages: List[str]
    state: Optional[str] = None
    prob: Rational

    model_config = ConfigDict(extra="forbid")

    @field_validator("signals", "messages", "state", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)


class FamilyOutcome(BaseModel):
    actions: Optional[List[str]] = None
    signals: Optional[List[str]] = None
    messages: List[str]
    state: Optional[str] = None

    model_config = ConfigDict(extra="forbid")

    @field_validator("*", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)


class FamilyEntry(BaseModel):
    stage: int = Field(..., ge=2)
    given: MessageConditioning = Field(default_factory=MessageConditioning)
    outcome: FamilyOutcome
    prob: Rational

    model_config = ConfigDict(extra="forbid")


class InformationDocument(BaseModel):
    """Expansion (``xi_kernels``) or kernel family (``raw_kernels: true``)."""

    name: Optional[str] = None
    raw_kernels: bool = False
    messages: PlayerTable
    xi_kernels: List[XiEntry] = Field(default_factory=list)
    initial_kernel: List[FamilyInitial] = Field(default_factory=list)
    transition_kernels: List[FamilyEntry] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")

    @field_validator("messages", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return _labels(v)

    @model_validator(mode="after")
    def check_sections(self) -> "InformationDocument":
        if self.raw_kernels and self.xi_kernels:
            raise ValueError("a kernel family has no xi_kernels")
        if not self.raw_kernels and (self.initial_kernel or self.transition_kernels):
            raise ValueError(
                "an expansion has no initial_kernel or transition_kernels; set raw_kernels"
            )
        if self.raw_kernels and not self.initial_kernel:
            raise ValueError("a kernel family needs initial_kernel")
        return self


def _message_sets(game: BaseGame, table: PlayerTable, source: str) -> MessageSets:
    try:
        rows = _player_rows(table, [str(p) for p in game.players], "messages")
    except ValueError as e:
        raise GameFileError(f"{source}: {e}")
    for player, row in zip(game.players, rows):
        if len(row) != game.stages:
            raise GameFileError(
                f"{source}: messages of player {player} must list {game.stages} stages"
            )
    return tuple(tuple(tuple(labels) for labels in row) for row in rows)


def _only(labels: Sequence[Label], what: str) -> Label:
    if len(labels) != 1:
        raise GameFileError(f"{what} must be given explicitly (set has {len(labels)} labels)")
    return labels[0]


def expansion_from_document(
    game: BaseGame, document: InformationDocument, source: str
) -> Expansion:
    messages = _message_sets(game, document.messages, source)
    by_stage: Dict[int, List[XiEntry]] = {}
    for entry in document.xi_kernels:
        if entry.stage > game.stages:
            raise GameFileError(f"{source}: xi entry for stage {entry.stage} > {game.stages}")
        if tuple(entry.outcome) not in message_profiles(messages, entry.stage):
            raise GameFileError(
                f"{source}: {entry.outcome} is not a stage-{entry.stage} message profile"
            )
        by_stage.setdefault(entry.stage, []).append(entry)

    def xi(t: int, h: History, past: MessagePath, w: StatePath) -> Dict[Profile, Fraction]:
        recalled = h[-1][0]
        candidates = [
            e for e in by_stage.get(t, [])
            if not (e.given.actions is not None and not recalled)
            and e.given.applies(recalled, h, w, past)
        ]
        if not candidates:
            profiles = message_profiles(messages, t)
            return {p: Fraction(1, len(profiles)) for p in profiles}
        top = max(e.given.specificity for e in candidates)
        row: Dict[Profile, Fraction] = {}
        for e in candidates:
            if e.given.specificity == top:
                m = tuple(e.outcome)
                row[m] = row.get(m, Fraction(0)) + e.prob
        return row

    return Expansion(messages, xi, document.name or "expansion")


def family_from_document(
    game: BaseGame, document: InformationDocument, source: str
) -> KernelFamily:
    messages = _message_sets(game, document.messages, source)
    n = game.num_players

    initial: Dict[Tuple[Profile, Label], Fraction] = {}
    for entry in document.initial_kernel:
        s = tuple(entry.signals) if entry.signals is not None else tuple(
            _only(game.signals[i][0], "stage-1 signal") for i in range(n)
        )
        w = entry.state if entry.state is not None else _only(game.states[0], "stage-1 state")
        key = (combine(s, tuple(entry.messages)), w)
        initial[key] = initial.get(key, Fraction(0)) + entry.prob

    by_stage: Dict[int, List[FamilyEntry]] = {}
    for entry in document.transition_kernels:
        if entry.stage > game.stages:
            raise GameFileError(
                f"{source}: transition entry for stage {entry.stage} > {game.stages}"
            )
        by_stage.setdefault(entry.stage, []).append(entry)

    def transition(
        t: int, action: Profile, history: History, states: StatePath
    ) -> Dict[Any, Fraction]:
        drawn = t + 1
        h, past = split_history(history)
        candidates = [
            e for e in by_stage.get(drawn, []) if e.given.applies(action, h, states, past)
        ]
        row: Dict[Any, Fraction] = {}
        if not candidates:
            return row
        top = max(e.given.specificity for e in candidates)
        for e in candidates:
            if e.given.specificity != top:
                continue
            recalled = tuple(e.outcome.actions) if e.outcome.actions is not None else tuple(action)
            s = tuple(e.outcome.signals) if e.outcome.signals is not None else tuple(
                _only(game.signals[i][drawn - 1], f"stage-{drawn} signal") for i in range(n)
            )
            w = e.outcome.state if e.outcome.state is not None else _only(
                game.states[drawn - 1], f"stage-{drawn} state"
            )
            key = ((recalled, combine(s, tuple(e.outcome.messages))), w)
            row[key] = row.get(key, Fraction(0)) + e.prob
        return row

    name = document.name or f"{game.name}-family"
    return KernelFamily(game, messages, family_game(game, messages, initial, transition, name))


def information_from_dict(
    game: BaseGame, data: Dict[str, Any], source: str = "expansion"
) -> Union[Expansion, KernelFamily]:
    document: InformationDocument = parse_model(InformationDocument, data, source)
    if document.raw_kernels:
        return family_from_document(game, document, source)
    return expansion_from_document(game, document, source)


def load_information(game: BaseGame, path: Union[str, Path]) -> Union[Expansion, KernelFamily]:
    loaded = information_from_dict(game, read_document(path), str(path))
    logger.info("Loaded %s from %s", type(loaded).__name__, path)
    return loaded


def load_expansion(game: BaseGame, path: Union[str, Path]) -> Expansion:
    loaded = load_information(game, path)
    if not isinstance(loaded, Expansion):
        raise GameFileError(f"{path} holds raw kernels, not an expansion")
    return loaded


def load_family(game: BaseGame, path: Union[str, Path]) -> KernelFamily:
    loaded = load_information(game, path)
    if not isinstance(loaded, KernelFamily):
        raise GameFileError(f"{path} holds an expansion, not raw kernels")
    return loaded


def xi_table_to_dict(
    game: BaseGame,
    expansion: Expansion,
    table: Dict[Tuple[int, History, MessagePath, StatePath], Dict[Profile, Fraction]],
) -> Dict[str, Any]:
    """Explicit expansion document from a tabulated ``ξ``."""
    entries = []
    for (t, h, past, w), row in table.items():
        for m, p in row.items():
            if not p:
                continue
            entries.append(
                {
                    "stage": t,
                    "given": {
                        "history": [[[str(x) for x in b], [str(x) for x in s]] for b, s in h],
                        "states": [str(x) for x in w],
                        "messages": [[str(x) for x in prof] for prof in past],
                    },
                    "outcome": [str(x) for x in m],
                    "prob": format_rational(p),
                }
            )
    return {
        "name": expansion.name,
        "messages": {
            str(player): [[str(x) for x in labels] for labels in expansion.messages[i]]
            for i, player in enumerate(game.players)
        },
        "xi_kernels": entries,
    }


__all__ = [
    "MessageConditioning",
    "InformationDocument",
    "expansion_from_document",
    "family_from_document",
    "information_from_dict",
    "load_information",
    "load_expansion",
    "load_family",
    "xi_table_to_dict",
]
