"""
Built-in instances: the worked examples and the bilateral bargaining game.

Builders return plain library objects (games, kernel families, expansions,
mixtures, decision problems). The claims checked against them live in
``runner``.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from ..bce.feedback import BCEMixture, FunctionRule, MixtureEntry
from ..bce.mediated import info_set
from ..core.errors import ScenarioParameterError
from ..core.logger import get_logger
from ..core.types import NO_SIGNAL, History, Label, Profile, StatePath, parse_rational
from ..expansion.kernels import Expansion, KernelFamily, combine, family_game, split_history
from ..games.base import BaseGame, OutcomeDistribution, TerminalHistory
from ..rationalizability.problem import DecisionProblem, additive_problem
from ..refinements.ranges import MediationRange
from ..refinements.verify import BeliefSystem

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

Payoffs = Mapping[Tuple[Label, Label], Tuple[object, object]]


# ============================================================================
# Two-stage sequential-move games
# ============================================================================

EXAMPLE1_PAYOFFS: Dict[Tuple[Label, Label], Tuple[int, int]] = {
    ("T", "L"): (2, 2),
    ("T", "R"): (0, 1),
    ("B", "L"): (3, 0),
    ("B", "R"): (1, 1),
}

EXAMPLE4_PAYOFFS: Dict[Tuple[Label, Label], Tuple[int, int]] = {
    ("U", "X"): (3, 1),
    ("U", "Y"): (0, 0),
    ("M", "X"): (1, 0),
    ("M", "Y"): (2, 3),
    ("D", "X"): (0, 2),
    ("D", "Y"): (1, 1),
}


def _ordered(labels: Sequence[Label]) -> Tuple[Label, ...]:
    return tuple(dict.fromkeys(labels))


def sequential_game(payoffs: Payoffs, name: str = "sequential") -> BaseGame:
    """
    Player 1 moves at stage 1, player 2 at stage 2 without seeing the first
    move; no signals and no states.

    Raises:
        ScenarioParameterError: If the payoff table is not a full matrix
    """
    first = _ordered([a1 for a1, _ in payoffs])
    second = _ordered([a2 for _, a2 in payoffs])
    missing = [(a1, a2) for a1 in first for a2 in second if (a1, a2) not in payoffs]
    if missing or not first or not second:
        raise ScenarioParameterError(
            f"Payoff matrix is incomplete at {missing[:1] or 'every cell'}"
        )
    try:
        table = {
            cell: (parse_rational(u1), parse_rational(u2)) for cell, (u1, u2) in payoffs.items()
        }
    except ValueError as e:
        raise ScenarioParameterError(str(e))

    quiet = (NO_SIGNAL, NO_SIGNAL)

    def transition(t: int, action: Profile, history: History, states: StatePath) -> Dict:
        return {((tuple(action), quiet), NO_SIGNAL): ONE}

    def payoff(terminal: TerminalHistory) -> Tuple[Fraction, Fraction]:
        return table[(terminal.history[1][0][0], terminal.history[2][0][1])]

    return BaseGame(
        players=("1", "2"),
        actions=((first, (NO_SIGNAL,)), ((NO_SIGNAL,), second)),
        signals=(((NO_SIGNAL,), (NO_SIGNAL,)), ((NO_SIGNAL,), (NO_SIGNAL,))),
        states=((NO_SIGNAL,), (NO_SIGNAL,)),
        initial={(quiet, NO_SIGNAL): ONE},
        transition=transition,
        payoff=payoff,
        name=name,
    )


def sequential_target(
    game: BaseGame, weights: Mapping[Tuple[Label, Label], object]
) -> OutcomeDistribution:
    """Outcome distribution of a sequential game from ``{(a1, a2): probability}``."""
    by_pair = {(z.history[1][0][0], z.history[2][0][1]): z for z in game.tree().terminals}
    unknown = [pair for pair in weights if pair not in by_pair]
    if unknown:
        raise ScenarioParameterError(f"{unknown[0]} is not an action pair of {game.name}")
    return OutcomeDistribution.from_pairs(
        (by_pair[pair], parse_rational(p)) for pair, p in weights.items()
    )


def example1() -> BaseGame:
    return sequential_game(EXAMPLE1_PAYOFFS, "example1")


def example4_generic(payoffs: Optional[Payoffs] = None) -> BaseGame:
    return sequential_game(payoffs or EXAMPLE4_PAYOFFS, "example4")


def _example1_rule(first: Label) -> FunctionRule:
    def fn(t: int, h: History, w: StatePath, recs: Tuple[Profile, ...]) -> Profile:
        if t == 1:
            return (first, NO_SIGNAL)
        return (NO_SIGNAL, "L" if h[1][0][0] == first else "R")

    return FunctionRule(fn, f"{first}, then L iff {first} was played")


def example1_mixture() -> BCEMixture:
    """Recommend T or B with probability 1/2 each, then L iff player 1 obeyed."""
    return BCEMixture.uniform([_example1_rule("T"), _example1_rule("B")])


def example1_expansion() -> Expansion:
    """Player 1 hears t or b; player 2 hears l exactly when the move matched the signal."""
    messages = ((("t", "b"), (NO_SIGNAL,)), ((NO_SIGNAL,), ("l", "r")))
    half = Fraction(1, 2)

    def xi(t: int, h: History, past: Tuple[Profile, ...], w: StatePath) -> Dict[Profile, Fraction]:
        if t == 1:
            return {("t", NO_SIGNAL): half, ("b", NO_SIGNAL): half}
        matched = (past[0][0], h[1][0][0]) in {("t", "T"), ("b", "B")}
        return {(NO_SIGNAL, "l" if matched else "r"): ONE}

    return Expansion(messages, xi, "t/b then l/r")


EXAMPLE1_SIGNAL_MAP: List[Dict[Label, Label]] = [{"t": "T", "b": "B"}, {"l": "L", "r": "R"}]


def example1_beliefs(played: Label) -> BeliefSystem:
    """
    Player 2's belief after the off-path recommendation R: player 1 played
    ``played`` against the other recommendation, with probability one.
    """
    recommended = "B" if played == "T" else "T"
    quiet = (NO_SIGNAL, NO_SIGNAL)
    h = (((), quiet), ((played, NO_SIGNAL), quiet))
    w = (NO_SIGNAL, NO_SIGNAL)
    recs = ((recommended, NO_SIGNAL), (NO_SIGNAL, "R"))
    return BeliefSystem({(1, info_set(h, recs, 1)): {(h, w, recs): ONE}})


# ============================================================================
# Consistent kernels that do not factorize
# ============================================================================

BINARY = ("0", "1")
_ONE_SIGNAL = (NO_SIGNAL,)


def _solo_game(
    actions: Tuple[Tuple[Label, ...], ...],
    states: Tuple[Tuple[Label, ...], ...],
    initial: Mapping[Tuple[Profile, Label], Fraction],
    transition: Callable,
    payoff: Callable[[TerminalHistory], Tuple[Fraction]],
    name: str,
) -> BaseGame:
    return BaseGame(
        players=("1",),
        actions=(actions,),
        signals=(tuple(_ONE_SIGNAL for _ in actions),),
        states=states,
        initial=initial,
        transition=transition,
        payoff=payoff,
        name=name,
    )


def example2() -> BaseGame:
    """Two independent uniform binary states; no actions, signals or payoffs."""
    half = Fraction(1, 2)
    return _solo_game(
        (_ONE_SIGNAL, _ONE_SIGNAL),
        (BINARY, BINARY),
        {(_ONE_SIGNAL, w): half for w in BINARY},
        lambda t, a, h, w: {((tuple(a), _ONE_SIGNAL), w2): half for w2 in BINARY},
        lambda z: (ZERO,),
        "example2",
    )


def example2_family(base: BaseGame) -> KernelFamily:
    """``m_1`` uniform and independent of ``ω_1``; ``ω_2 = ω_1 + m_1 mod 2``."""
    messages = ((BINARY, _ONE_SIGNAL),)
    quarter = Fraction(1, 4)
    initial = {(combine(_ONE_SIGNAL, (m,)), w): quarter for m in BINARY for w in BINARY}

    def transition(t: int, action: Profile, history: History, states: StatePath) -> Dict:
        _, past = split_history(history)
        shifted = str((int(states[0]) + int(past[0][0])) % 2)
        return {((tuple(action), combine(_ONE_SIGNAL, _ONE_SIGNAL)), shifted): ONE}

    return KernelFamily(
        base, messages, family_game(base, messages, initial, transition, "example2-kernels")
    )


PAIRS = tuple(a + b for a in BINARY for b in BINARY)


def example2_reinterpreted() -> BaseGame:
    """Both states drawn together at stage 1 as a pair ``ω_1 ω_2``."""
    quarter = Fraction(1, 4)
    return _solo_game(
        (_ONE_SIGNAL, _ONE_SIGNAL),
        (PAIRS, (NO_SIGNAL,)),
        {(_ONE_SIGNAL, w): quarter for w in PAIRS},
        lambda t, a, h, w: {((tuple(a), _ONE_SIGNAL), NO_SIGNAL): ONE},
        lambda z: (ZERO,),
        "example2-pairs",
    )


def example2_reinterpreted_expansion() -> Expansion:
    """``m_1 = ω_2 - ω_1 mod 2``, read off the stage-1 pair."""
    messages = ((BINARY, _ONE_SIGNAL),)

    def xi(t: int, h: History, past: Tuple[Profile, ...], w: StatePath) -> Dict[Profile, Fraction]:
        if t == 1:
            w1, w2 = int(w[0][0]), int(w[0][1])
            return {(str((w2 - w1) % 2),): ONE}
        return {_ONE_SIGNAL: ONE}

    return Expansion(messages, xi, "shift")


EXAMPLE3_RAISE = {"1": Fraction(5, 6), "0": Fraction(1, 2)}
EXAMPLE3_KERNEL: Dict[Tuple[Label, Label], Fraction] = {
    ("1", "1"): Fraction(2, 3),
    ("0", "1"): ONE,
    ("1", "0"): ONE,
    ("0", "0"): ZERO,
}
EXAMPLE3_DISTRIBUTION: Dict[Tuple[Label, Label], Fraction] = {
    ("0", "0"): Fraction(1, 2),
    ("1", "0"): Fraction(1, 6),
    ("1", "1"): Fraction(1, 3),
}


def _binary_row(action: Profile, signals: Profile, p_one: Fraction) -> Dict:
    row = {((tuple(action), signals), "1"): p_one, ((tuple(action), signals), "0"): ONE - p_one}
    return {k: p for k, p in row.items() if p}


def example3() -> BaseGame:
    """
    One player picks ``a_1``; ``ω_2 = 1`` with probability 5/6 after
    ``a_1 = 1`` and 1/2 after ``a_1 = 0``. Payoff 1 iff ``ω_2 = 0``.
    """
    return _solo_game(
        (BINARY, _ONE_SIGNAL),
        ((NO_SIGNAL,), BINARY),
        {(_ONE_SIGNAL, NO_SIGNAL): ONE},
        lambda t, a, h, w: _binary_row(a, _ONE_SIGNAL, EXAMPLE3_RAISE[a[0]]),
        lambda z: (ONE if z.states[1] == "0" else ZERO,),
        "example3",
    )


def example3_family(base: BaseGame) -> KernelFamily:
    """``m_1`` uniform; ``π_2(ω_2 = 1 | a_1, m_1)`` from ``EXAMPLE3_KERNEL``."""
    messages = ((BINARY, _ONE_SIGNAL),)
    half = Fraction(1, 2)
    initial = {(combine(_ONE_SIGNAL, (m,)), NO_SIGNAL): half for m in BINARY}

    def transition(t: int, action: Profile, history: History, states: StatePath) -> Dict:
        _, past = split_history(history)
        kernel = EXAMPLE3_KERNEL[(action[0], past[0][0])]
        return _binary_row(action, combine(_ONE_SIGNAL, _ONE_SIGNAL), kernel)

    return KernelFamily(
        base, messages, family_game(base, messages, initial, transition, "example3-kernels")
    )


def example3_target(base: BaseGame) -> OutcomeDistribution:
    """The distribution of ``(a_1, ω_2)`` under the optimal strategy with the extra signal."""
    by_cell = {(z.history[1][0][0], z.states[1]): z for z in base.tree().terminals}
    return OutcomeDistribution.from_pairs(
        (by_cell[cell], p) for cell, p in EXAMPLE3_DISTRIBUTION.items()
    )


# ============================================================================
# Rationalizability
# ============================================================================

TABLE1_TARGET = ("l", "c")
TABLE1_DEVIATION = {(1, ("l",), ()): {"c": Fraction(1, 2), "r": Fraction(1, 2)}}


def table1() -> DecisionProblem:
    """
    Two periods, actions l, c, r, states w and w'. Each period pays 1 for c
    in w and for r in w', 0 otherwise; payoffs add up over periods.
    """
    actions = (("l", "c", "r"), ("l", "c", "r"))
    states = ("w", "w'")
    stage = {(t, a, w): ZERO for t in (1, 2) for a in actions[0] for w in states}
    for t in (1, 2):
        stage[(t, "c", "w")] = ONE
        stage[(t, "r", "w'")] = ONE
    return additive_problem(actions, states, stage, "table1")


# ============================================================================
# Bilateral bargaining
# ============================================================================

BUYER, SELLER = 0, 1
ACCEPT, REJECT = "1", "0"


@dataclass(frozen=True)
class BargainingParameters:
    """Valuations, their prior and the finite offer grid."""

    states: Tuple[Fraction, ...]
    prior: Tuple[Fraction, ...]
    offers: Tuple[Fraction, ...]

    @property
    def low(self) -> Fraction:
        return min(self.states)

    @property
    def high(self) -> Fraction:
        return max(self.states)

    @property
    def below_low(self) -> Fraction:
        """Largest offer strictly below the lowest valuation."""
        return max(a for a in self.offers if a < self.low)

    @property
    def mean(self) -> Fraction:
        return sum((w * p for w, p in zip(self.states, self.prior)), ZERO)

    def probability(self, state: Fraction) -> Fraction:
        return self.prior[self.states.index(state)]


DESK_BARGAINING = (
    (Fraction(1), Fraction(2)),
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)),
)


def bargaining_parameters(
    states: Optional[Sequence[object]] = None,
    prior: Optional[Sequence[object]] = None,
    offers: Optional[Sequence[object]] = None,
) -> BargainingParameters:
    """
    Validate bargaining parameters; missing ones default to the desk instance
    (valuations 1 and 2, uniform, offers 1/2, 1, 3/2, 2).

    Raises:
        ScenarioParameterError: If a value is not rational, valuations are not
            positive and distinct, the prior is not a positive distribution,
            no offer lies below the lowest valuation, or the offers miss a
            valuation or the mean valuation
    """
    try:
        valued = states if states is not None else DESK_BARGAINING[0]
        ws = tuple(parse_rational(w) for w in valued)
        if prior is not None:
            ps = tuple(parse_rational(p) for p in prior)
        elif states is None:
            ps = DESK_BARGAINING[1]
        else:
            ps = tuple(Fraction(1, len(ws)) for _ in ws)
        offered = offers if offers is not None else DESK_BARGAINING[2]
        fs = tuple(sorted(parse_rational(a) for a in offered))
    except ValueError as e:
        raise ScenarioParameterError(str(e))

    if not ws or len(set(ws)) != len(ws) or any(w <= 0 for w in ws):
        raise ScenarioParameterError("Valuations must be distinct positive rationals")
    if len(ps) != len(ws) or any(p <= 0 for p in ps) or sum(ps, ZERO) != 1:
        raise ScenarioParameterError(
            "The prior must give every valuation positive probability and sum to 1"
        )
    if len(set(fs)) != len(fs) or any(a < 0 for a in fs):
        raise ScenarioParameterError("Offers must be distinct nonnegative rationals")
    params = BargainingParameters(ws, ps, fs)
    if not any(a < params.low for a in fs):
        raise ScenarioParameterError(f"No offer lies below the lowest valuation {params.low}")
    if params.mean not in fs:
        raise ScenarioParameterError(f"The mean valuation {params.mean} must be an offer")
    if not set(ws) <= set(fs):
        raise ScenarioParameterError("Every valuation must be an offer")
    return params


def _label(x: Fraction) -> str:
    return str(x)


def bargaining_game(params: BargainingParameters) -> BaseGame:
    """
    The seller offers ``a_1``; the buyer sees it and accepts (1) or rejects (0).
    Acceptance pays ``(ω - a_1, a_1)`` to (buyer, seller). The valuation is
    drawn at stage 1 and observed by nobody.
    """
    offers = tuple(_label(a) for a in params.offers)
    omega = tuple(_label(w) for w in params.states)
    quiet = (NO_SIGNAL, NO_SIGNAL)

    def transition(t: int, action: Profile, history: History, states: StatePath) -> Dict:
        return {((tuple(action), (action[SELLER], NO_SIGNAL)), states[-1]): ONE}

    def payoff(terminal: TerminalHistory) -> Tuple[Fraction, Fraction]:
        if terminal.history[2][0][BUYER] != ACCEPT:
            return (ZERO, ZERO)
        offer = Fraction(terminal.history[1][0][SELLER])
        return (Fraction(terminal.states[0]) - offer, offer)

    return BaseGame(
        players=("buyer", "seller"),
        actions=(((NO_SIGNAL,), (ACCEPT, REJECT)), (offers, (NO_SIGNAL,))),
        signals=(((NO_SIGNAL,), offers), ((NO_SIGNAL,), (NO_SIGNAL,))),
        states=(omega, omega),
        initial={(quiet, _label(w)): p for w, p in zip(params.states, params.prior)},
        transition=transition,
        payoff=payoff,
        name="bargaining",
    )


def bargaining_vertices(params: BargainingParameters) -> List[Tuple[Fraction, Fraction]]:
    """(buyer, seller) corners of the sequential equilibrium payoff set."""
    return [
        (ZERO, params.below_low),
        (ZERO, params.mean),
        (params.mean - params.below_low, params.below_low),
    ]


def _bargaining_rule(
    offer: Callable[[Fraction], Fraction], accept: Callable[[Fraction, Fraction], bool], label: str
) -> FunctionRule:
    def fn(t: int, h: History, w: StatePath, recs: Tuple[Profile, ...]) -> Profile:
        value = Fraction(w[0])
        if t == 1:
            return (NO_SIGNAL, _label(offer(value)))
        made = Fraction(h[1][0][SELLER])
        return (ACCEPT if accept(made, value) else REJECT, NO_SIGNAL)

    return FunctionRule(fn, label)


def _bargaining_range(
    game: BaseGame, first: Sequence[Fraction], second: Callable[[Fraction], Sequence[str]]
) -> MediationRange:
    allowed_offers = tuple(_label(a) for a in first)

    def rule(i: int, t: int, own: Tuple, past: Tuple) -> Sequence[Label]:
        if i == SELLER and t == 1:
            return allowed_offers
        if i == BUYER and t == 2:
            return tuple(second(Fraction(own[1][-1])))
        return game.actions[i][t - 1]

    return MediationRange(game, rule=rule)


@dataclass
class BargainingConstruction:
    """A candidate sequential equilibrium with its mediation ranges."""

    name: str
    mixture: BCEMixture
    ranges: MediationRange
    payoffs: Optional[Tuple[Fraction, Fraction]]
    sequential: bool = True


def bargaining_constructions(
    game: BaseGame, params: BargainingParameters
) -> List[BargainingConstruction]:
    """
    The three corner constructions, plus a variant of the low-offer one that
    accepts offers above the mean valuation (not sequential) when such offers
    exist.
    """
    low, high, below, mean = params.low, params.high, params.below_low, params.mean

    low_offer = _bargaining_rule(
        lambda w: below, lambda a, w: a <= below, "offer ω_L^-, accept iff a ≤ ω_L^-"
    )
    extraction = _bargaining_rule(lambda w: w, lambda a, w: a <= w, "offer ω, accept iff a ≤ ω")
    accept_mean = _bargaining_rule(
        lambda w: mean, lambda a, w: a < low or a == mean, "offer E, accept E"
    )
    reject_mean = _bargaining_rule(lambda w: mean, lambda a, w: a < low, "offer E, reject E")
    share = below / mean

    constructions = [
        BargainingConstruction(
            "low-offer",
            BCEMixture.point_mass(low_offer),
            _bargaining_range(game, [below], lambda a: [ACCEPT] if a < low else [REJECT]),
            (mean - below, below),
        ),
        BargainingConstruction(
            "full-extraction",
            BCEMixture.point_mass(extraction),
            _bargaining_range(
                game,
                params.states,
                lambda a: [ACCEPT] if a < low else [REJECT] if a > high else [REJECT, ACCEPT],
            ),
            (ZERO, mean),
        ),
        BargainingConstruction(
            "mixed-acceptance",
            BCEMixture((MixtureEntry(accept_mean, share), MixtureEntry(reject_mean, ONE - share))),
            _bargaining_range(
                game,
                [mean],
                lambda a: [REJECT, ACCEPT] if a == mean else [ACCEPT] if a < low else [REJECT],
            ),
            (ZERO, below),
        ),
    ]
    if any(a > mean for a in params.offers):
        generous = _bargaining_rule(
            lambda w: below, lambda a, w: a <= below or a > mean, "offer ω_L^-, accept above E"
        )
        constructions.append(
            BargainingConstruction(
                "accept-above-mean",
                BCEMixture.point_mass(generous),
                _bargaining_range(
                    game, [below], lambda a: [ACCEPT] if a <= below or a > mean else [REJECT]
                ),
                None,
                sequential=False,
            )
        )
    logger.debug("Bargaining: %d constructions", len(constructions))
    return constructions


def state_order(params: BargainingParameters) -> List[str]:
    """Valuation labels from the lowest up, for pessimistic beliefs."""
    return [_label(w) for w in sorted(params.states)]


__all__ = [
    "EXAMPLE1_PAYOFFS",
    "EXAMPLE4_PAYOFFS",
    "EXAMPLE1_SIGNAL_MAP",
    "EXAMPLE3_DISTRIBUTION",
    "TABLE1_TARGET",
    "TABLE1_DEVIATION",
    "BUYER",
    "SELLER",
    "ACCEPT",
    "REJECT",
    "sequential_game",
    "sequential_target",
    "example1",
    "example1_mixture",
    "example1_expansion",
    "example1_beliefs",
    "example2",
    "example2_family",
    "example2_reinterpreted",
    "example2_reinterpreted_expansion",
    "example3",
    "example3_family",
    "example3_target",
    "example4_generic",
    "table1",
    "BargainingParameters",
    "BargainingConstruction",
    "bargaining_parameters",
    "bargaining_game",
    "bargaining_vertices",
    "bargaining_constructions",
    "state_order",
]
