"""
Conditional probability systems on a finite ground set.

A CPS assigns ``β(X|Z)`` to every event ``X`` and nonempty event ``Z`` such
that (i) ``β(Z|Z) = β(𝒳|Z) = 1``, (ii) ``β(·|Z)`` is additive and (iii) the
chain rule ``β(X|Z) = β(X|Y)·β(Y|Z)`` holds for ``X ⊆ Y ⊆ Z``.

Three representations are supported:

* ``TableCPS``: explicit conditional values, checked as given;
* ``LexicographicCPS``: a sequence of distributions, the first level giving
  ``Z`` positive mass defines ``β(·|Z)``;
* ``PerturbedCPS``: positive weights that are rational functions of ``n``;
  ``β(X|Z)`` is the limit of the weight ratio as ``n → ∞`` (evaluated with
  sympy).
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    List,
    Literal,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import sympy

from ..core.errors import GameValidationError, ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import format_rational
from ..games.base import BaseGame, outcome_probability
from ..bce.feedback import BCEMixture

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

Event = FrozenSet[Hashable]

N = sympy.Symbol("n", positive=True)


class CPS:
    """Base class: subclasses provide ``ground`` and ``distribution``."""

    ground: Tuple[Hashable, ...] = ()

    @property
    def universe(self) -> Event:
        return frozenset(self.ground)

    def distribution(self, event: Iterable[Hashable]) -> Dict[Hashable, Fraction]:
        """``β({x}|Z)`` for every ``x`` in ``Z`` with positive value."""
        raise NotImplementedError

    def conditional(self, x: Iterable[Hashable], z: Iterable[Hashable]) -> Fraction:
        members = frozenset(x)
        return sum((p for e, p in self.distribution(z).items() if e in members), ZERO)

    def events(self) -> List[Event]:
        """Events the representation mentions explicitly."""
        return []


def _require_nonempty(event: Event, ground: Event) -> Event:
    if not event:
        raise ShapeMismatchError("Cannot condition on the empty event")
    unknown = event - ground
    if unknown:
        raise ShapeMismatchError(f"Event mentions {len(unknown)} elements outside the ground set")
    return event


# ============================================================================
# Representations
# ============================================================================


@dataclass
class TableCPS(CPS):
    """Explicit ``{(X, Z): β(X|Z)}`` entries."""

    ground: Tuple[Hashable, ...]
    table: Dict[Tuple[Event, Event], Fraction] = field(default_factory=dict)

    def value(self, x: Event, z: Event) -> Optional[Fraction]:
        if not x:
            return ZERO
        return self.table.get((frozenset(x), frozenset(z)))

    def conditional(self, x: Iterable[Hashable], z: Iterable[Hashable]) -> Fraction:
        value = self.value(frozenset(x), frozenset(z))
        if value is None:
            raise KeyError("conditional value not tabulated")
        return value

    def distribution(self, event: Iterable[Hashable]) -> Dict[Hashable, Fraction]:
        z = _require_nonempty(frozenset(event), self.universe)
        out: Dict[Hashable, Fraction] = {}
        for element in z:
            value = self.value(frozenset([element]), z)
            if value:
                out[element] = value
        return out

    def events(self) -> List[Event]:
        seen: Dict[Event, None] = {}
        for x, z in self.table:
            seen.setdefault(x, None)
            seen.setdefault(z, None)
        return list(seen)


@dataclass
class LexicographicCPS(CPS):
    """Levels of nonnegative weights; their supports must cover the ground set."""

    levels: Sequence[Mapping[Hashable, Fraction]]
    ground: Tuple[Hashable, ...] = ()

    def __post_init__(self) -> None:
        if not self.ground:
            seen: Dict[Hashable, None] = {}
            for level in self.levels:
                for x, p in level.items():
                    if p > 0:
                        seen.setdefault(x, None)
            self.ground = tuple(seen)
        for level in self.levels:
            if any(p < 0 for p in level.values()):
                raise GameValidationError("Lexicographic levels must be nonnegative")

    def distribution(self, event: Iterable[Hashable]) -> Dict[Hashable, Fraction]:
        z = _require_nonempty(frozenset(event), self.universe)
        for level in self.levels:
            mass = {x: Fraction(level.get(x, ZERO)) for x in z}
            total = sum(mass.values(), ZERO)
            if total > 0:
                return {x: p / total for x, p in mass.items() if p}
        raise ShapeMismatchError("No level gives the conditioning event positive mass")


def _to_fraction(value: sympy.Expr) -> Fraction:
    value = sympy.nsimplify(value) if not value.is_Rational else value
    if not value.is_Rational:
        raise GameValidationError(f"Limit {value} is not rational")
    return Fraction(int(value.p), int(value.q))


def _lowest_term(poly: sympy.Poly) -> Tuple[int, Fraction]:
    order, coeff = min(((monom[0], c) for monom, c in poly.terms()), key=lambda t: t[0])
    return order, _to_fraction(coeff)


@dataclass
class PerturbedCPS(CPS):
    """
    ``β(X|Z) = lim_n P^n(X ∩ Z) / P^n(Z)`` for weights ``P^n`` positive for large ``n``.

    Each weight is reduced once to its leading term ``c · n^{-k}``; weights
    that are not rational functions of ``n`` fall back to ``sympy.limit``.
    """

    weights: Mapping[Hashable, sympy.Expr]
    symbol: sympy.Symbol = N
    ground: Tuple[Hashable, ...] = ()
    _leading: Dict[Hashable, Optional[Tuple[int, Fraction]]] = field(
        default_factory=dict, repr=False
    )

    def __post_init__(self) -> None:
        self.weights = {x: sympy.sympify(w) for x, w in self.weights.items()}
        self.ground = tuple(self.weights)
        for x, w in self.weights.items():
            lead = self._leading_term(w)
            self._leading[x] = lead
            if lead is not None and lead[1] <= 0:
                raise GameValidationError(
                    f"Perturbation weight of {x!r} is not positive for large n"
                )

    def _leading_term(self, weight: sympy.Expr) -> Optional[Tuple[int, Fraction]]:
        m = sympy.Symbol("m", positive=True)
        expr = sympy.together(weight.subs(self.symbol, 1 / m))
        num, den = sympy.fraction(expr)
        if not (num.is_polynomial(m) and den.is_polynomial(m)):
            return None
        try:
            top, bottom = _lowest_term(sympy.Poly(num, m)), _lowest_term(sympy.Poly(den, m))
        except GameValidationError:
            return None
        if bottom[1] == 0:
            return None
        return top[0] - bottom[0], top[1] / bottom[1]

    def distribution(self, event: Iterable[Hashable]) -> Dict[Hashable, Fraction]:
        z = _require_nonempty(frozenset(event), self.universe)
        leads = {x: self._leading[x] for x in z}
        if all(lead is not None for lead in leads.values()):
            order = min(lead[0] for lead in leads.values())  # type: ignore[index]
            top = {
                x: lead[1] for x, lead in leads.items() if lead[0] == order  # type: ignore[index]
            }
            total = sum(top.values(), ZERO)
            return {x: c / total for x, c in top.items()}
        total_expr = sum((self.weights[x] for x in z), sympy.Integer(0))
        out: Dict[Hashable, Fraction] = {}
        for x in z:
            value = _to_fraction(sympy.limit(self.weights[x] / total_expr, self.symbol, sympy.oo))
            if value:
                out[x] = value
        return out


# ============================================================================
# Checking
# ============================================================================

Property = Literal["normalization", "additivity", "chain_rule", "range", "undefined"]


@dataclass
class CPSViolation:
    prop: Property
    x: Optional[Event]
    y: Optional[Event]
    z: Event
    detail: str = ""

    def describe(self) -> str:
        def size(e: Optional[Event]) -> str:
            return "-" if e is None else f"|{len(e)}|"

        return f"[{self.prop}] X{size(self.x)} Y{size(self.y)} Z{size(self.z)}: {self.detail}"


def _default_family(cps: CPS) -> List[Event]:
    universe = cps.universe
    if len(universe) <= 5:
        elements = list(cps.ground)
        return [
            frozenset(c)
            for r in range(1, len(elements) + 1)
            for c in itertools.combinations(elements, r)
        ]
    family: Dict[Event, None] = {frozenset([x]): None for x in cps.ground}
    family[universe] = None
    for event in cps.events():
        if event:
            family[event] = None
    return list(family)


def cps_check(
    cps: CPS, family: Optional[Iterable[Iterable[Hashable]]] = None
) -> List[CPSViolation]:
    """
    Check properties (i)-(iii) on a family of events.

    The default family is every nonempty event for ground sets of at most five
    elements, else the singletons, the ground set and the events the CPS
    mentions.
    """
    events = [frozenset(e) for e in family] if family is not None else _default_family(cps)
    universe = cps.universe
    violations: List[CPSViolation] = []
    values: Dict[Tuple[Event, Event], Optional[Fraction]] = {}

    def beta(x: Event, z: Event) -> Optional[Fraction]:
        key = (x, z)
        if key not in values:
            try:
                values[key] = cps.conditional(x, z)
            except (KeyError, ShapeMismatchError):
                values[key] = None
        return values[key]

    conditioning = [z for z in events if z]
    for z in conditioning:
        for x, label in ((z, "β(Z|Z)"), (universe, "β(𝒳|Z)")):
            value = beta(x, z)
            if value is None:
                violations.append(CPSViolation("undefined", x, None, z, f"{label} undefined"))
            elif value != 1:
                violations.append(
                    CPSViolation("normalization", x, None, z, f"{label} = {format_rational(value)}")
                )
        for x in events:
            value = beta(x, z)
            if value is not None and not 0 <= value <= 1:
                violations.append(
                    CPSViolation("range", x, None, z, f"β(X|Z) = {format_rational(value)}")
                )

    members = set(events)
    for x, y in itertools.combinations(events, 2):
        if x & y or (x | y) not in members:
            continue
        for z in conditioning:
            bx, by, bxy = beta(x, z), beta(y, z), beta(x | y, z)
            if None in (bx, by, bxy):
                continue
            if bxy != bx + by:  # type: ignore[operator]
                violations.append(
                    CPSViolation(
                        "additivity",
                        x,
                        y,
                        z,
                        f"{format_rational(bxy)} ≠ {format_rational(bx)} + {format_rational(by)}",
                    )
                )

    for z in conditioning:
        for y in conditioning:
            if not y <= z:
                continue
            for x in events:
                if not x <= y:
                    continue
                bxz, bxy, byz = beta(x, z), beta(x, y), beta(y, z)
                if None in (bxz, bxy, byz):
                    continue
                if bxz != bxy * byz:  # type: ignore[operator]
                    violations.append(
                        CPSViolation(
                            "chain_rule",
                            x,
                            y,
                            z,
                            f"β(X|Z) = {format_rational(bxz)} ≠ "
                            f"{format_rational(bxy)} · {format_rational(byz)}",
                        )
                    )
    logger.debug("cps_check: %d events, %d violations", len(events), len(violations))
    return violations


def cps_from_distribution(distribution: Mapping[Hashable, Fraction]) -> LexicographicCPS:
    """CPS induced by a fully supported distribution."""
    if any(p <= 0 for p in distribution.values()):
        raise GameValidationError("Distribution must be fully supported")
    return LexicographicCPS([dict(distribution)])


# ============================================================================
# Pessimistic perturbations
# ============================================================================

GroundElement = Tuple[int, object]


def pessimistic_cps(
    game: BaseGame,
    mixture: BCEMixture,
    state_order: Optional[Sequence[Hashable]] = None,
) -> PerturbedCPS:
    """
    Perturbation on ``(rule index, terminal history)`` pairs.

    A terminal history weighs ``μ(f) · p(h, w) · n^{-k}`` where every
    disobedient action at a stage whose state has rank ``r`` in
    ``state_order`` (lowest first, ranks from 1) adds ``r`` to ``k``. Rules with
    zero weight are pushed below every deviation. After an unexpected action
    the limit beliefs therefore sit on the lowest state.
    """
    tree = game.tree()
    max_rank = 1
    ranks: Dict[Hashable, int] = {}
    if state_order is not None:
        ranks = {w: k for k, w in enumerate(state_order, start=1)}
        max_rank = len(state_order)
    else:
        for labels in game.states:
            max_rank = max(max_rank, len(labels))
    outside = 1 + game.stages * game.num_players * max_rank
    initial = {(h[0][1], w[0]): p for h, w, p in game.initial_rows()}

    weights: Dict[GroundElement, sympy.Expr] = {}
    for k, entry in enumerate(mixture.entries):
        base = sympy.Rational(entry.weight.numerator, entry.weight.denominator)
        if entry.weight <= 0:
            base = N ** (-outside)
        for z in tree.terminals:
            prob = outcome_probability(game, z)
            if entry.initial is not None:
                start = (tuple(entry.initial[0]), entry.initial[1])
                if start != (z.history[0][1], z.states[0]):
                    continue
                prob /= initial[start]
            if not prob:
                continue
            recs = entry.rule.on_path(game, z.history[:-1], z.states)  # type: ignore[attr-defined]
            exponent = 0
            for t in range(1, game.stages + 1):
                state = z.states[t - 1]
                rank = ranks.get(state) or game.states[t - 1].index(state) + 1
                action = z.history[t][0]
                deviated = sum(1 for i, a in enumerate(action) if a != recs[t - 1][i])
                exponent += rank * deviated
            p = sympy.Rational(prob.numerator, prob.denominator)
            weights[(k, z)] = base * p * N ** (-exponent)
    logger.debug("pessimistic_cps: %d ground elements", len(weights))
    return PerturbedCPS(weights)


__all__ = [
    "Event",
    "N",
    "CPS",
    "TableCPS",
    "LexicographicCPS",
    "PerturbedCPS",
    "CPSViolation",
    "cps_check",
    "cps_from_distribution",
    "pessimistic_cps",
]
