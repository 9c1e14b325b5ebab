"""
Scenario registry and claim evaluation.

``build(name)`` returns a populated ``Scenario``; ``run(name)`` evaluates its
claims exactly and returns a ``ScenarioReport``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Union

from pydantic import BaseModel, Field

from ..bce.characterization import sequential_move_characterization
from ..bce.feedback import BCEMixture, rule_from_profile
from ..bce.polytope import convex_hull, feasible_payoff_hull, payoff_polytope_2p
from ..bce.solver import membership_test, verify_bce
from ..core.errors import GameValidationError, UnknownScenarioError
from ..core.logger import get_logger
from ..core.types import NO_SIGNAL, format_rational
from ..expansion.canonical import (
    best_response_check,
    canonical_expansion,
    follow_messages,
    obedient_outcome,
    optimal_value,
)
from ..expansion.kernels import consistency_check, factorization_test, induce_game
from ..games.base import BaseGame, OutcomeDistribution, play, pure_nash_equilibria, validate_game
from ..rationalizability.dominance import (
    dominance_slack,
    is_surely_dominated,
    is_truly_dominated,
    plan_from_strategy,
)
from ..rationalizability.verdict import is_rationalizable
from ..refinements.cps import cps_check, pessimistic_cps
from ..refinements.kernels import kernels_from_mixture
from ..refinements.ranges import MediationRange
from ..refinements.verify import verify_sbce, verify_wpbce
from . import catalog

logger = get_logger(__name__)

ZERO = Fraction(0)


# ============================================================================
# Reports
# ============================================================================


class ClaimResult(BaseModel):
    """One expected value compared exactly with the computed one."""

    scenario: str = Field(..., description="Scenario name")
    claim: str = Field(..., description="What is checked")
    expected: str = Field(..., description="Expected value, rationals as num/den")
    computed: str = Field(..., description="Computed value, rationals as num/den")
    passed: bool = Field(..., description="Whether both agree exactly")


class ScenarioReport(BaseModel):
    name: str
    claims: List[ClaimResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    @property
    def failures(self) -> List[ClaimResult]:
        return [c for c in self.claims if not c.passed]

    def lines(self) -> List[str]:
        width = max((len(c.claim) for c in self.claims), default=0)
        out = [f"scenario {self.name}: {'pass' if self.passed else 'FAIL'}"]
        for c in self.claims:
            mark = "ok  " if c.passed else "FAIL"
            out.append(
                f"  {mark} {c.claim.ljust(width)}  expected {c.expected}  computed {c.computed}"
            )
        return out

    def write_json(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.model_dump_json(indent=2), encoding="utf-8")


def _show(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, int):
        return format_rational(Fraction(value))
    if isinstance(value, tuple):
        return "(" + ", ".join(_show(v) for v in value) + ")"
    if isinstance(value, list):
        return "[" + ", ".join(_show(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted((_show(k), _show(v)) for k, v in value.items())
        return "{" + ", ".join(f"{k}: {v}" for k, v in items) + "}"
    return str(value)


class _Claims:
    def __init__(self, scenario: str) -> None:
        self.scenario = scenario
        self.results: List[ClaimResult] = []

    def check(self, claim: str, expected: Any, computed: Any) -> None:
        passed = expected == computed
        if not passed:
            logger.warning(
                "%s: %s expected %s, computed %s",
                self.scenario,
                claim,
                _show(expected),
                _show(computed),
            )
        self.results.append(
            ClaimResult(
                scenario=self.scenario,
                claim=claim,
                expected=_show(expected),
                computed=_show(computed),
                passed=passed,
            )
        )


# ============================================================================
# Registry
# ============================================================================


@dataclass
class Scenario:
    """
    Attributes:
        name: Scenario id
        summary: One-line description
        objects: Built games, families, mixtures and problems by role
        claims: Evaluates the scenario's claims into a collector
    """

    name: str
    summary: str
    objects: Dict[str, Any] = field(default_factory=dict)
    claims: Optional[Callable[["Scenario", _Claims], None]] = None

    @property
    def game(self) -> Optional[BaseGame]:
        return self.objects.get("game")


def _pairs(distribution: OutcomeDistribution) -> Dict[tuple, Fraction]:
    return {
        (z.history[1][0][0], z.history[2][0][1]): p for z, p in distribution.weights.items()
    }


def _vertices(points: Iterable) -> List[tuple]:
    return sorted(tuple(p) for p in points)


# ---------------------------------------------------------------- example 1


def _build_example1(**_: Any) -> Scenario:
    game = catalog.example1()
    return Scenario(
        "example1",
        "Two-stage game where player 2 does not see player 1's move",
        {
            "game": game,
            "mixture": catalog.example1_mixture(),
            "expansion": catalog.example1_expansion(),
        },
        _claims_example1,
    )


def _claims_example1(scenario: Scenario, claims: _Claims) -> None:
    """Vertices (1,1), (1,4/3), (2,2), (5/2,1) are solved from the three obedience inequalities."""
    game = scenario.game
    mixture, expansion = scenario.objects["mixture"], scenario.objects["expansion"]
    half = Fraction(1, 2)

    polytope = payoff_polytope_2p(game)
    claims.check(
        "BCE payoff polytope vertices",
        _vertices([(1, 1), (1, Fraction(4, 3)), (2, 2), (Fraction(5, 2), 1)]),
        _vertices(polytope.vertices),
    )
    claims.check(
        "feasible payoff hull",
        _vertices([(0, 1), (3, 0), (2, 2)]),
        _vertices(feasible_payoff_hull(game).vertices),
    )
    claims.check("recommendation mixture is obedient", 0, len(verify_bce(game, mixture)))
    claims.check(
        "mixture outcome",
        {("T", "L"): half, ("B", "L"): half},
        _pairs(mixture.outcome_distribution(game)),
    )

    induced = induce_game(game, expansion)
    signal_play = follow_messages(induced, catalog.EXAMPLE1_SIGNAL_MAP)
    claims.check(
        "playing the signal yields μ(T,L) = μ(B,L) = 1/2",
        {("T", "L"): half, ("B", "L"): half},
        _pairs(induced.base_outcome(play(induced.game, signal_play))),
    )
    claims.check(
        "playing the signal is a Bayes-Nash equilibrium",
        0,
        len(best_response_check(induced, signal_play)),
    )
    claims.check("induced kernels are consistent", True, consistency_check(game, induced))

    canonical = canonical_expansion(game, mixture)
    claims.check(
        "canonical expansion reproduces the mixture outcome",
        True,
        obedient_outcome(game, canonical) == mixture.outcome_distribution(game),
    )

    ranges = MediationRange.full(game)
    kernels = kernels_from_mixture(game, mixture)
    claims.check(
        "weak perfect with belief on B after R",
        True,
        verify_wpbce(game, ranges, kernels, catalog.example1_beliefs("B")).clean,
    )
    doubtful = verify_wpbce(game, ranges, kernels, catalog.example1_beliefs("T"))
    claims.check(
        "belief on T after R breaks player 2's obedience",
        True,
        bool(doubtful.of_player("2", "obedience")),
    )

    equilibria = pure_nash_equilibria(game)
    claims.check("pure Nash equilibria", 1, len(equilibria))
    claims.check(
        "pure Nash point masses are obedient",
        True,
        all(
            not verify_bce(game, BCEMixture.point_mass(rule_from_profile(game, eq)))
            for eq in equilibria
        ),
    )


# ---------------------------------------------------------------- example 2


def _build_example2(**_: Any) -> Scenario:
    game = catalog.example2()
    return Scenario(
        "example2",
        "Consistent kernels whose extra signal causes the second state",
        {"game": game, "family": catalog.example2_family(game)},
        _claims_non_factorizable,
    )


def _claims_non_factorizable(scenario: Scenario, claims: _Claims) -> None:
    game, family = scenario.game, scenario.objects["family"]
    claims.check("kernels are consistent", True, consistency_check(game, family))
    claims.check(
        "kernels factorize through an expansion",
        False,
        factorization_test(game, family).factorizable,
    )


def _build_example2_reinterpreted(**_: Any) -> Scenario:
    game = catalog.example2_reinterpreted()
    return Scenario(
        "example2_reinterpreted",
        "Both states drawn at stage 1; the shift becomes an expansion",
        {"game": game, "expansion": catalog.example2_reinterpreted_expansion()},
        _claims_example2_reinterpreted,
    )


def _claims_example2_reinterpreted(scenario: Scenario, claims: _Claims) -> None:
    game, expansion = scenario.game, scenario.objects["expansion"]
    induced = induce_game(game, expansion)
    quarter = Fraction(1, 4)
    expected = {
        (str((int(w[1]) - int(w[0])) % 2), w): quarter for w in catalog.PAIRS
    }
    computed = {(signals[0][1], w): p for (signals, w), p in induced.game.initial.items() if p}
    claims.check("stage-1 kernel sits on the shift diagonal", expected, computed)
    claims.check("induced kernels are consistent", True, consistency_check(game, induced))
    claims.check(
        "kernels factorize through an expansion",
        True,
        factorization_test(game, induced).factorizable,
    )


# ---------------------------------------------------------------- example 3


def _build_example3(**_: Any) -> Scenario:
    game = catalog.example3()
    return Scenario(
        "example3",
        "Consistent kernels on a controlled state; the optimum is not a BCE outcome",
        {
            "game": game,
            "family": catalog.example3_family(game),
            "target": catalog.example3_target(game),
        },
        _claims_example3,
    )


def _claims_example3(scenario: Scenario, claims: _Claims) -> None:
    _claims_non_factorizable(scenario, claims)
    game, family = scenario.game, scenario.objects["family"]
    claims.check("optimal payoff with the extra signal", Fraction(2, 3), optimal_value(family.game))
    claims.check(
        "optimal distribution is a BCE outcome",
        False,
        membership_test(game, scenario.objects["target"]).member,
    )


# ---------------------------------------------------------------- example 4


def _build_example4(payoffs: Optional[Mapping] = None, **_: Any) -> Scenario:
    game = catalog.example4_generic(payoffs)
    first, second = game.actions[0][0], game.actions[1][1]
    n = len(first) * len(second)
    uniform = {(a1, a2): Fraction(1, n) for a1 in first for a2 in second}
    targets = {"uniform": catalog.sequential_target(game, uniform)}
    for a1 in first:
        for a2 in second:
            targets[f"point {a1},{a2}"] = catalog.sequential_target(game, {(a1, a2): 1})
    return Scenario(
        "example4_generic",
        "Sequential moves without observation: closed-form conditions against the LP",
        {"game": game, "targets": targets},
        _claims_example4,
    )


def _claims_example4(scenario: Scenario, claims: _Claims) -> None:
    game = scenario.game
    for label, target in scenario.objects["targets"].items():
        claims.check(
            f"conditions agree with membership ({label})",
            membership_test(game, target).member,
            sequential_move_characterization(game, target).member,
        )
    claims.check(
        "pure Nash point masses are obedient",
        True,
        all(
            not verify_bce(game, BCEMixture.point_mass(rule_from_profile(game, eq)))
            for eq in pure_nash_equilibria(game)
        ),
    )


# ---------------------------------------------------------------- table 1


def _build_table1(**_: Any) -> Scenario:
    return Scenario(
        "table1",
        "Rationalizable yet truly dominated choice profile",
        {"problem": catalog.table1()},
        _claims_table1,
    )


def _claims_table1(scenario: Scenario, claims: _Claims) -> None:
    problem = scenario.objects["problem"]
    target = catalog.TABLE1_TARGET
    claims.check(
        "(l,c) is rationalizable", "rationalizable", is_rationalizable(problem, target).status
    )
    claims.check("(l,c) is surely dominated", False, is_surely_dominated(problem, target).dominated)
    claims.check("(l,c) is truly dominated", True, is_truly_dominated(problem, target).dominated)
    plan = plan_from_strategy(problem, catalog.TABLE1_DEVIATION)
    half = Fraction(1, 2)
    claims.check(
        "plan after recommendation l,l",
        {("c", "l"): half, ("r", "l"): half},
        plan.row(("l", "l")),
    )
    claims.check(
        "mixing c and r after l beats (l,c) by", half, dominance_slack(problem, plan, target)
    )


# ---------------------------------------------------------------- bargaining


def _build_bargaining(
    states: Optional[List[Any]] = None,
    prior: Optional[List[Any]] = None,
    offers: Optional[List[Any]] = None,
    **_: Any,
) -> Scenario:
    params = catalog.bargaining_parameters(states, prior, offers)
    game = catalog.bargaining_game(params)
    return Scenario(
        "bargaining",
        "Seller offer, buyer accept/reject: sequential BCE payoff corners",
        {
            "game": game,
            "params": params,
            "constructions": catalog.bargaining_constructions(game, params),
        },
        _claims_bargaining,
    )


def _claims_bargaining(scenario: Scenario, claims: _Claims) -> None:
    game, params = scenario.game, scenario.objects["params"]
    vertices = catalog.bargaining_vertices(params)
    order = catalog.state_order(params)
    reached = []
    for construction in scenario.objects["constructions"]:
        cps = pessimistic_cps(game, construction.mixture, order)
        report = verify_sbce(game, construction.ranges, construction.mixture, cps)
        if not construction.sequential:
            claims.check(
                f"{construction.name}: seller gains by offering more",
                True,
                bool(report.of_player("seller", "obedience")),
            )
            continue
        claims.check(f"{construction.name}: sequential BCE", True, report.clean)
        claims.check(f"{construction.name}: CPS properties", 0, len(cps_check(cps)))
        payoffs = construction.mixture.outcome_distribution(game).expected_payoffs(game)
        claims.check(f"{construction.name}: payoffs (buyer, seller)", construction.payoffs, payoffs)
        buyer, seller = payoffs
        claims.check(
            f"{construction.name}: within the payoff bounds",
            True,
            buyer >= 0 and seller >= params.below_low and buyer + seller <= params.mean,
        )
        reached.append(payoffs)
        if construction.name == "mixed-acceptance":
            claims.check(
                "mixed-acceptance: on-path acceptance probability",
                params.below_low / params.mean,
                _acceptance_at_mean(game, construction.mixture, params),
            )
    claims.check(
        "payoff corners", _vertices(convex_hull(vertices)), _vertices(convex_hull(reached))
    )


def _acceptance_at_mean(
    game: BaseGame, mixture: BCEMixture, params: catalog.BargainingParameters
) -> Fraction:
    kernels = kernels_from_mixture(game, mixture)
    offer = (NO_SIGNAL, str(params.mean))
    quiet = (NO_SIGNAL, NO_SIGNAL)
    w = str(params.states[0])
    h = (((), quiet), (offer, (str(params.mean), NO_SIGNAL)))
    row = kernels.row(2, h, (w, w), (offer,))
    return row.get((catalog.ACCEPT, NO_SIGNAL), ZERO)


SCENARIOS: Dict[str, Callable[..., Scenario]] = {
    "example1": _build_example1,
    "example2": _build_example2,
    "example2_reinterpreted": _build_example2_reinterpreted,
    "example3": _build_example3,
    "example4_generic": _build_example4,
    "table1": _build_table1,
    "bargaining": _build_bargaining,
}


def available() -> List[str]:
    return list(SCENARIOS)


def build(name: str, **params: Any) -> Scenario:
    """
    Raises:
        UnknownScenarioError: For an unknown name
        ScenarioParameterError: For invalid bargaining or payoff parameters
    """
    try:
        builder = SCENARIOS[name]
    except KeyError:
        raise UnknownScenarioError(f"Unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    scenario = builder(**params)
    if scenario.game is not None:
        report = validate_game(scenario.game)
        if not report.valid:
            raise GameValidationError(
                f"Scenario {name} builds an invalid game: {report.lines()[0]}"
            )
    logger.debug("Built scenario %s", name)
    return scenario


def run(name: str, **params: Any) -> ScenarioReport:
    """Build ``name`` and evaluate its claims exactly."""
    scenario = build(name, **params)
    claims = _Claims(name)
    if scenario.claims is not None:
        scenario.claims(scenario, claims)
    report = ScenarioReport(name=name, claims=claims.results)
    held = len(report.claims) - len(report.failures)
    logger.info("Scenario %s: %d/%d claims hold", name, held, len(report.claims))
    return report


__all__ = ["ClaimResult", "ScenarioReport", "Scenario", "SCENARIOS", "available", "build", "run"]
