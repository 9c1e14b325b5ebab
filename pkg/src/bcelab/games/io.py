"""
Game description files.

Documents are JSON or YAML (read with ``yaml.safe_load``) and validated with
pydantic. Labels are strings; probabilities and payoffs are integers or
``"num/den"`` strings.

Schema::

    name: example1                      # optional
    players: ["1", "2"]
    stages: 2
    actions:                            # per player, one list per stage
      "1": [["T", "B"], ["-"]]
      "2": [["-"], ["L", "R"]]
    signals: {...}                      # optional, same shape, default "-"
    states: [["-"], ["-"]]              # optional, one list per stage
    initial_kernel:                     # optional when every stage-1 set is a singleton
      - {signals: ["-", "-"], state: "-", prob: "1"}
    transition_kernels:                 # kernel drawing the stage-`stage` record
      - stage: 2
        given: {actions: ["T", "-"]}    # any of: actions, state, states, signals, history
        outcome: {signals: ["-", "-"], state: "-"}   # actions defaults to given actions
        prob: "1"
    payoffs:
      - {actions: [["T", "-"], ["-", "L"]], values: ["2", "2"]}   # states optional

Kernel entries are sparse. For a conditioning point, the matching entries
with the largest number of ``given`` fields form the row; outcomes not listed
have probability zero. When nothing matches and every next-stage signal and
state set is a singleton, the row is the deterministic one.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core.errors import GameFileError
from ..core.logger import get_logger
from ..core.types import NO_SIGNAL, History, Profile, Rational, StatePath, format_rational
from .base import BaseGame, TerminalHistory, singleton_sets

logger = get_logger(__name__)

PlayerTable = Union[Dict[str, List[List[str]]], List[List[List[str]]]]


def _labels(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_labels(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _labels(v) for k, v in value.items()}
    if isinstance(value, bool) or value is None:
        raise ValueError(f"invalid label {value!r}")
    return str(value)


# ============================================================================
# Document Models
# ============================================================================


class InitialEntry(BaseModel):
    signals: Optional[List[str]] = None
    state: Optional[str] = None
    prob: Rational

    model_config = ConfigDict(extra="forbid")

    @field_validator("signals", "state", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)


class Conditioning(BaseModel):
    actions: Optional[List[str]] = None
    state: Optional[str] = None
    states: Optional[List[str]] = None
    signals: Optional[List[str]] = None
    history: Optional[List[List[List[str]]]] = None

    model_config = ConfigDict(extra="forbid")

    @field_validator("*", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)

    @property
    def specificity(self) -> int:
        return sum(getattr(self, f) is not None for f in type(self).model_fields)

    def matches(self, action: Profile, history: History, states: StatePath) -> bool:
        if self.actions is not None and tuple(self.actions) != tuple(action):
            return False
        if self.state is not None and self.state != states[-1]:
            return False
        if self.states is not None and tuple(self.states) != tuple(states):
            return False
        if self.signals is not None and tuple(self.signals) != tuple(history[-1][1]):
            return False
        if self.history is not None:
            given = tuple((tuple(b), tuple(s)) for b, s in self.history)
            if given != history:
                return False
        return True


class OutcomeSpec(BaseModel):
    signals: Optional[List[str]] = None
    state: Optional[str] = None
    actions: Optional[List[str]] = None

    model_config = ConfigDict(extra="forbid")

    @field_validator("*", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)


class TransitionEntry(BaseModel):
    stage: int = Field(..., ge=2, description="Stage whose record the kernel draws")
    given: Conditioning = Field(default_factory=Conditioning)
    outcome: OutcomeSpec = Field(default_factory=OutcomeSpec)
    prob: Rational

    model_config = ConfigDict(extra="forbid")


class PayoffEntry(BaseModel):
    actions: List[List[str]]
    states: Optional[List[str]] = None
    values: List[Rational]

    model_config = ConfigDict(extra="forbid")

    @field_validator("actions", "states", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)


class GameDocument(BaseModel):
    """Validated game description."""

    name: str = "game"
    players: List[str]
    stages: int = Field(..., ge=1)
    actions: PlayerTable
    signals: Optional[PlayerTable] = None
    states: Optional[List[List[str]]] = None
    initial_kernel: List[InitialEntry] = Field(default_factory=list)
    transition_kernels: List[TransitionEntry] = Field(default_factory=list)
    payoffs: List[PayoffEntry]

    model_config = ConfigDict(extra="forbid")

    @field_validator("players", "actions", "signals", "states", mode="before")
    @classmethod
    def as_labels(cls, v: Any) -> Any:
        return None if v is None else _labels(v)

    @model_validator(mode="after")
    def check_shapes(self) -> "GameDocument":
        for label in ("actions", "signals"):
            table = getattr(self, label)
            if table is None:
                continue
            rows = _player_rows(table, self.players, label)
            for player, row in zip(self.players, rows):
                if len(row) != self.stages:
                    raise ValueError(f"{label} of player {player} must list {self.stages} stages")
        if self.states is not None and len(self.states) != self.stages:
            raise ValueError(f"states must list {self.stages} stages")
        for entry in self.transition_kernels:
            if entry.stage > self.stages:
                raise ValueError(f"transition entry for stage {entry.stage} > {self.stages}")
        return self


def _player_rows(table: PlayerTable, players: Sequence[str], label: str) -> List[List[List[str]]]:
    if isinstance(table, dict):
        missing = [p for p in players if p not in table]
        if missing or len(table) != len(players):
            raise ValueError(f"{label} must have one entry per player")
        return [table[p] for p in players]
    if len(table) != len(players):
        raise ValueError(f"{label} must have one entry per player")
    return list(table)


# ============================================================================
# Building
# ============================================================================


def _tuple_table(rows: List[List[List[str]]]) -> Tuple[Tuple[Tuple[str, ...], ...], ...]:
    return tuple(tuple(tuple(labels) for labels in row) for row in rows)


def build_game(document: GameDocument) -> BaseGame:
    """Turn a validated document into a ``BaseGame``."""
    players = tuple(document.players)
    n, stages = len(players), document.stages
    actions = _tuple_table(_player_rows(document.actions, players, "actions"))
    signals = (
        _tuple_table(_player_rows(document.signals, players, "signals"))
        if document.signals is not None
        else singleton_sets(n, stages)
    )
    states = (
        tuple(tuple(row) for row in document.states)
        if document.states is not None
        else tuple((NO_SIGNAL,) for _ in range(stages))
    )

    def only(labels: Sequence[str], what: str) -> str:
        if len(labels) != 1:
            raise GameFileError(f"{what} must be given explicitly (set has {len(labels)} labels)")
        return labels[0]

    initial: Dict[Tuple[Profile, str], Fraction] = {}
    if document.initial_kernel:
        for entry in document.initial_kernel:
            s = tuple(entry.signals) if entry.signals is not None else tuple(
                only(signals[i][0], "stage-1 signal") for i in range(n)
            )
            w = entry.state if entry.state is not None else only(states[0], "stage-1 state")
            initial[(s, w)] = initial.get((s, w), Fraction(0)) + entry.prob
    else:
        s = tuple(only(signals[i][0], "stage-1 signal") for i in range(n))
        initial[(s, only(states[0], "stage-1 state"))] = Fraction(1)

    by_stage: Dict[int, List[TransitionEntry]] = {}
    for entry in document.transition_kernels:
        by_stage.setdefault(entry.stage, []).append(entry)

    def transition(
        t: int, action: Profile, history: History, path: StatePath
    ) -> Dict[Any, Fraction]:
        drawn = t + 1
        candidates = [e for e in by_stage.get(drawn, []) if e.given.matches(action, history, path)]
        next_signals = [signals[i][drawn - 1] for i in range(n)]
        next_states = states[drawn - 1]
        if not candidates:
            if all(len(s) == 1 for s in next_signals) and len(next_states) == 1:
                default = tuple(s[0] for s in next_signals)
                return {((tuple(action), default), next_states[0]): Fraction(1)}
            return {}
        top = max(e.given.specificity for e in candidates)
        row: Dict[Any, Fraction] = {}
        for e in candidates:
            if e.given.specificity != top:
                continue
            recalled = tuple(e.outcome.actions) if e.outcome.actions is not None else tuple(action)
            s = tuple(e.outcome.signals) if e.outcome.signals is not None else tuple(
                only(next_signals[i], f"stage-{drawn} signal") for i in range(n)
            )
            w = e.outcome.state if e.outcome.state is not None else only(
                next_states, f"stage-{drawn} state"
            )
            key = ((recalled, s), w)
            row[key] = row.get(key, Fraction(0)) + e.prob
        return row

    table: List[Tuple[Tuple[Profile, ...], Optional[Tuple[str, ...]], Tuple[Fraction, ...]]] = [
        (
            tuple(tuple(a) for a in entry.actions),
            tuple(entry.states) if entry.states is not None else None,
            tuple(entry.values),
        )
        for entry in document.payoffs
    ]

    def payoff(terminal: TerminalHistory) -> Tuple[Fraction, ...]:
        fallback: Optional[Tuple[Fraction, ...]] = None
        for acts, path, values in table:
            if acts != terminal.actions:
                continue
            if path is None:
                fallback = values
            elif path == tuple(terminal.states):
                return values
        if fallback is None:
            raise GameFileError(f"No payoff entry for {terminal.describe()}")
        return fallback

    return BaseGame(
        players=players,
        actions=actions,
        signals=signals,
        states=states,
        initial=initial,
        transition=transition,
        payoff=payoff,
        name=document.name,
    )


# ============================================================================
# Files
# ============================================================================


def read_document(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a JSON or YAML document.

    Raises:
        GameFileError: If the file is missing or does not parse to a mapping
    """
    target = Path(path)
    try:
        text = target.read_text(encoding="utf-8")
    except OSError as e:
        raise GameFileError(f"Cannot read {target}: {e}")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise GameFileError(f"Malformed document {target}: {e}")
    if not isinstance(data, dict):
        raise GameFileError(f"{target} must contain a mapping")
    return data


def parse_model(model: type, data: Dict[str, Any], source: str) -> Any:
    """Validate ``data`` with a pydantic model, mapping errors to ``GameFileError``."""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise GameFileError(f"{source}: {e}")


def game_from_dict(data: Dict[str, Any], source: str = "game") -> BaseGame:
    return build_game(parse_model(GameDocument, data, source))


def load_game(path: Union[str, Path]) -> BaseGame:
    """Load a game description file."""
    game = game_from_dict(read_document(path), str(path))
    logger.info("Loaded game %s from %s", game.name, path)
    return game


def game_to_dict(game: BaseGame) -> Dict[str, Any]:
    """
    Explicit document for ``game``: every reachable kernel row is written with
    full ``history`` and ``states`` conditioning.
    """
    players = [str(p) for p in game.players]
    tree = game.tree()
    document: Dict[str, Any] = {
        "name": game.name,
        "players": players,
        "stages": game.stages,
        "actions": {p: [list(map(str, s)) for s in game.actions[i]] for i, p in enumerate(players)},
        "signals": {p: [list(map(str, s)) for s in game.signals[i]] for i, p in enumerate(players)},
        "states": [list(map(str, s)) for s in game.states],
        "initial_kernel": [
            {"signals": list(map(str, s)), "state": str(w), "prob": format_rational(p)}
            for (s, w), p in game.initial.items()
            if p
        ],
        "transition_kernels": [],
        "payoffs": [],
    }
    for t in range(1, game.stages):
        for h, w in tree.prefixes[t - 1]:
            for a in game.action_profiles(t):
                for ((b, s), state), p in game.kernel(t, a, h, w).items():
                    if not p:
                        continue
                    document["transition_kernels"].append(
                        {
                            "stage": t + 1,
                            "given": {
                                "actions": list(map(str, a)),
                                "states": list(map(str, w)),
                                "history": [[list(map(str, x)), list(map(str, y))] for x, y in h],
                            },
                            "outcome": {
                                "actions": list(map(str, b)),
                                "signals": list(map(str, s)),
                                "state": str(state),
                            },
                            "prob": format_rational(p),
                        }
                    )
    for z in tree.terminals:
        document["payoffs"].append(
            {
                "actions": [list(map(str, a)) for a in z.actions],
                "states": list(map(str, z.states)),
                "values": [format_rational(u) for u in game.payoff(z)],
            }
        )
    return document


def save_game(game: BaseGame, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(game_to_dict(game), indent=2) + "\n", encoding="utf-8")


__all__ = [
    "GameDocument",
    "InitialEntry",
    "Conditioning",
    "OutcomeSpec",
    "TransitionEntry",
    "PayoffEntry",
    "build_game",
    "read_document",
    "parse_model",
    "game_from_dict",
    "load_game",
    "game_to_dict",
    "save_game",
]
