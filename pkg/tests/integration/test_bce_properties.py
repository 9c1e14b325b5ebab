"""
Property suites for the BCE solver on random small games.

Exercises membership against the closed-form conditions, convexity of the
BCE set, the canonical-expansion round trip and the equivalence of
behavioral kernels with the rule mixture they come from.
"""

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from src.bcelab.bce.characterization import sequential_move_characterization
from src.bcelab.bce.feedback import BCEMixture, MixtureEntry, enumerate_feedback_rules
from src.bcelab.bce.mediated import (
    consistent_with,
    enumerate_deviations,
    start_nodes_from_prior,
    traverse,
)
from src.bcelab.bce.solver import membership_test, optimize_direction, verify_bce
from src.bcelab.expansion import (
    best_response_check,
    canonical_expansion,
    consistency_check,
    follow_messages,
    induce_game,
    obedient_outcome,
)
from src.bcelab.games.base import payoff_vector
from src.bcelab.refinements import kernels_from_mixture
from src.bcelab.scenarios import catalog
from tests.game_builders import ACTIONS, SIGNALS, STATES, two_stage_game

pytestmark = [pytest.mark.integration, pytest.mark.slow]

CELLS = (("T", "L"), ("T", "R"), ("B", "L"), ("B", "R"))
PROFILES = tuple((p, q) for p in ACTIONS for q in ACTIONS)

_payoff = st.integers(min_value=-3, max_value=3)


@st.composite
def sequential_games(draw):
    """A 2x2 sequential-move game with small integer payoffs."""
    payoffs = {cell: (draw(_payoff), draw(_payoff)) for cell in CELLS}
    return catalog.sequential_game(payoffs, "random")


@st.composite
def stochastic_games(draw):
    """A two-stage game where both players move, with random kernels, states and signals."""
    prior_states = draw(st.sampled_from([("x",), ("x", "y")]))
    prior_weights = [draw(st.integers(min_value=1, max_value=4)) for _ in prior_states]
    prior = {w: Fraction(p, sum(prior_weights)) for w, p in zip(prior_states, prior_weights)}
    draws = [(s, w) for s in SIGNALS for w in STATES]
    transition = {}
    for a in PROFILES:
        for w in prior_states:
            weights = [draw(st.integers(min_value=0, max_value=3)) for _ in draws]
            assume(sum(weights) > 0)
            transition[(a, w)] = {d: Fraction(p, sum(weights)) for d, p in zip(draws, weights) if p}
    payoffs = {
        (a, b, w): (Fraction(draw(_payoff)), Fraction(draw(_payoff)))
        for a in PROFILES
        for b in PROFILES
        for w in STATES
    }
    informed = draw(st.sampled_from([None, 0, 1]))
    return two_stage_game(prior, transition, lambda a, b, w: payoffs[(a, b, w)], informed)


@st.composite
def distributions(draw, support=CELLS):
    """A rational distribution over action pairs."""
    weights = [draw(st.integers(min_value=0, max_value=6)) for _ in support]
    assume(sum(weights) > 0)
    total = sum(weights)
    return {cell: Fraction(w, total) for cell, w in zip(support, weights) if w}


@st.composite
def directions(draw):
    d = (draw(st.integers(-2, 2)), draw(st.integers(-2, 2)))
    assume(d != (0, 0))
    return d


def _example1_conditions(mu):
    def m(cell):
        return mu.get(cell, Fraction(0))

    return (
        m(("T", "L")) >= m(("B", "L"))
        and m(("B", "R")) >= m(("T", "R"))
        and m(("T", "L")) >= m(("T", "R"))
    )


class TestCharacterization:
    """Membership agrees with the sequential-move conditions."""

    @settings(max_examples=1000)
    @given(mu=distributions())
    def test_example1_inequalities(self, mu):
        """Test Example 1 membership equals the three sequential-move inequalities."""
        game = catalog.example1()
        target = catalog.sequential_target(game, mu)

        assert membership_test(game, target).member == _example1_conditions(mu)

    @settings(max_examples=100)
    @given(game=sequential_games(), mu=distributions())
    def test_random_games(self, game, mu):
        """Test the closed-form conditions agree with the LP on random payoffs."""
        target = catalog.sequential_target(game, mu)

        expected = membership_test(game, target).member
        assert sequential_move_characterization(game, target).member == expected


class TestConvexity:
    """Mixtures of BCE are BCE."""

    @settings(max_examples=100)
    @given(first=directions(), second=directions(), weight=st.fractions(min_value=0, max_value=1))
    def test_example1_combinations(self, first, second, weight):
        """Test combining two direction witnesses stays obedient."""
        game = catalog.example1()
        a = optimize_direction(game, first).witness
        b = optimize_direction(game, second).witness

        assert verify_bce(game, a.combine(b, weight)) == []


class TestCanonicalRoundTrip:
    """A verified witness expands to an equilibrium with the same outcome."""

    @settings(max_examples=100)
    @given(game=sequential_games(), direction=directions())
    def test_round_trip(self, game, direction):
        """Test consistency, obedience and outcome equality of the canonical expansion."""
        witness = optimize_direction(game, direction).witness
        assert verify_bce(game, witness) == []

        expansion = canonical_expansion(game, witness)
        induced = induce_game(game, expansion)

        assert consistency_check(game, induced)
        assert best_response_check(induced, follow_messages(induced)) == []
        assert obedient_outcome(game, expansion) == witness.outcome_distribution(game)

    @settings(max_examples=100, deadline=None)
    @given(game=stochastic_games(), direction=directions())
    def test_round_trip_with_states(self, game, direction):
        """Test the round trip when both players move and the state evolves."""
        witness = optimize_direction(game, direction).witness
        assert verify_bce(game, witness) == []

        expansion = canonical_expansion(game, witness)
        induced = induce_game(game, expansion)

        assert consistency_check(game, induced)
        assert verify_bce(game, BCEMixture.point_mass(kernels_from_mixture(game, witness))) == []
        assert obedient_outcome(game, expansion) == witness.outcome_distribution(game)


class TestKernelEquivalence:
    """Behavioral kernels reproduce the mixture under every pure deviation."""

    @staticmethod
    def _values(game, nodes, player):
        values = [
            (leaf.path, payoff_vector(game, leaf.terminal)[player] * leaf.weight)
            for leaf in traverse(game, nodes, deviator=player, branch=True)
        ]
        return [
            sum((v for path, v in values if consistent_with(path, g.choices)), Fraction(0))
            for g in enumerate_deviations(game, player)
        ]

    @settings(max_examples=50)
    @given(game=sequential_games(), data=st.data())
    def test_kernels_match_mixture(self, game, data):
        """Test obedient play and each deviation give equal values under both."""
        rules = enumerate_feedback_rules(game, True)
        weights = data.draw(st.lists(st.integers(0, 3), min_size=len(rules), max_size=len(rules)))
        assume(sum(weights) > 0)
        total = sum(weights)
        mixture = BCEMixture(
            tuple(MixtureEntry(rule, Fraction(w, total)) for rule, w in zip(rules, weights) if w)
        )
        kernels = kernels_from_mixture(game, mixture)

        from_kernels = BCEMixture.point_mass(kernels).outcome_distribution(game)
        assert from_kernels == mixture.outcome_distribution(game)
        for player in range(game.num_players):
            from_rules = self._values(game, mixture.start_nodes(game), player)
            assert self._values(game, start_nodes_from_prior(game, kernels), player) == from_rules

    @settings(max_examples=50, deadline=None)
    @given(game=stochastic_games(), direction=directions())
    def test_witness_kernels_with_states(self, game, direction):
        """Test the kernels of a solver witness reproduce its outcome."""
        witness = optimize_direction(game, direction).witness
        kernels = kernels_from_mixture(game, witness)

        from_kernels = BCEMixture.point_mass(kernels).outcome_distribution(game)
        assert from_kernels == witness.outcome_distribution(game)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
