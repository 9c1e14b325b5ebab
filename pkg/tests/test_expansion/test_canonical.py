"""
Unit tests for canonical expansions and best-response checks.

Tests src.bcelab.expansion.canonical.
"""

from fractions import Fraction

import pytest

from src.bcelab.bce.feedback import BCEMixture, FunctionRule
from src.bcelab.bce.solver import optimize_direction
from src.bcelab.core.errors import NotObedientError, ShapeMismatchError
from src.bcelab.core.types import NO_SIGNAL
from src.bcelab.expansion import (
    best_response_check,
    canonical_expansion,
    consistency_check,
    follow_messages,
    induce_game,
    obedient_outcome,
)
from src.bcelab.games.base import play
from src.bcelab.scenarios import catalog


class TestCanonicalExpansion:
    """Test canonical_expansion and obedient_outcome."""

    def test_reproduces_mixture_outcome(self, example1, example1_mixture):
        """Test obeying the recommendations gives the mixture's outcome."""
        expansion = canonical_expansion(example1, example1_mixture)

        expected = example1_mixture.outcome_distribution(example1)
        assert obedient_outcome(example1, expansion) == expected

    def test_obedience_is_an_equilibrium(self, example1, example1_mixture):
        """Test nobody gains by ignoring a recommendation."""
        induced = induce_game(example1, canonical_expansion(example1, example1_mixture))

        assert consistency_check(example1, induced)
        assert best_response_check(induced, follow_messages(induced)) == []

    def test_witness_of_a_direction(self, example1):
        """Test the witness maximizing u1 expands to an equilibrium paying (5/2, 1)."""
        witness = optimize_direction(example1, (1, 0)).witness
        expansion = canonical_expansion(example1, witness)

        payoffs = obedient_outcome(example1, expansion).expected_payoffs(example1)
        assert payoffs == (Fraction(5, 2), Fraction(1))

    def test_not_obedient(self, example1):
        """Test a mixture with a profitable deviation is refused."""
        rule = FunctionRule(
            lambda t, h, w, recs: ("T", NO_SIGNAL) if t == 1 else (NO_SIGNAL, "L"),
            "T then L",
        )

        with pytest.raises(NotObedientError, match="player 1"):
            canonical_expansion(example1, BCEMixture.point_mass(rule))


class TestBestResponseCheck:
    """Test best_response_check."""

    def test_signal_map_equilibrium(self, example1):
        """Test playing the message's action in the t/b expansion is an equilibrium."""
        induced = induce_game(example1, catalog.example1_expansion())

        signal_play = follow_messages(induced, catalog.EXAMPLE1_SIGNAL_MAP)
        assert best_response_check(induced, signal_play) == []

    def test_ignoring_messages_is_not(self, example1):
        """Test always playing T and L lets player 1 profit from B."""
        induced = induce_game(example1, catalog.example1_expansion())
        always = [{"t": "T", "b": "T"}, {"l": "L", "r": "L"}]
        found = best_response_check(induced, follow_messages(induced, always))

        assert found
        assert {d.player for d in found} == {"1"}
        assert all(d.gain > 0 for d in found)
        assert max(found, key=lambda d: d.gain).describe().startswith("player 1: 3/1 > 2/1")

    def test_base_game_profile(self, example1):
        """Test a base game is accepted directly."""
        fixed = [
            lambda t, own: {"B": Fraction(1)} if t == 1 else {NO_SIGNAL: Fraction(1)},
            lambda t, own: {NO_SIGNAL: Fraction(1)} if t == 1 else {"R": Fraction(1)},
        ]

        assert best_response_check(example1, fixed) == []
        assert play(example1, fixed).expected_payoffs(example1) == (Fraction(1), Fraction(1))

    def test_strategy_count(self, example1):
        """Test one strategy per player is required."""
        with pytest.raises(ShapeMismatchError):
            best_response_check(example1, [])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
