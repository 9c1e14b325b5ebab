"""
Unit tests for expansions, induced games and kernel families.

Tests src.bcelab.expansion.kernels.
"""

from fractions import Fraction

import pytest

from src.bcelab.core.errors import ShapeMismatchError
from src.bcelab.core.types import NO_SIGNAL
from src.bcelab.expansion import (
    Expansion,
    KernelFamily,
    consistency_check,
    consistency_issues,
    factorization_test,
    follow_messages,
    induce_game,
    optimal_value,
)
from src.bcelab.expansion.kernels import combine, describe_xi_table, family_game
from src.bcelab.games.base import play, validate_game
from src.bcelab.scenarios import catalog

ONE = Fraction(1)
QUIET = (NO_SIGNAL,)


def _always_high(base):
    """Example 3 with ω_2 = 1 whatever the player does."""
    messages = ((catalog.BINARY, QUIET),)
    initial = {(combine(QUIET, (m,)), NO_SIGNAL): Fraction(1, 2) for m in catalog.BINARY}

    def transition(t, action, history, states):
        return {((tuple(action), combine(QUIET, QUIET)), "1"): ONE}

    return KernelFamily(
        base, messages, family_game(base, messages, initial, transition, "always-high")
    )


class TestInducedGame:
    """Test induce_game."""

    def test_example1_induced_is_valid(self, example1):
        """Test the induced game of the t/b expansion is a valid game."""
        induced = induce_game(example1, catalog.example1_expansion())

        assert validate_game(induced.game).valid
        assert induced.base is example1
        assert len(induced.game.tree().terminals) == 8

    def test_signal_play(self, example1, half):
        """Test following t/b and l/r yields (T,L) and (B,L) at 1/2 each."""
        induced = induce_game(example1, catalog.example1_expansion())
        outcome = induced.base_outcome(
            play(induced.game, follow_messages(induced, catalog.EXAMPLE1_SIGNAL_MAP))
        )

        assert outcome.expected_payoffs(example1) == (Fraction(5, 2), Fraction(1))
        assert set(outcome.weights.values()) == {half}

    def test_null_expansion(self, example1):
        """Test singleton messages leave the game unchanged."""
        induced = induce_game(example1, Expansion.null(example1))

        assert consistency_check(example1, induced)
        assert len(induced.game.tree().terminals) == len(example1.tree().terminals)

    def test_message_shape(self, example1):
        """Test message sets must be indexed by player and stage."""
        with pytest.raises(ShapeMismatchError):
            induce_game(example1, Expansion(((("a",),),), lambda *a: {}, "short"))
        with pytest.raises(ShapeMismatchError, match="empty"):
            induce_game(
                example1, Expansion(((("a",), ()), (("-",), ("-",))), lambda *a: {}, "empty")
            )

    def test_from_table_uniform_fallback(self):
        """Test rows missing from a table are uniform."""
        messages = ((("x", "y"),),)
        expansion = Expansion.from_table(messages, {}, "blank")

        assert expansion.xi(1, (), (), ()) == {("x",): Fraction(1, 2), ("y",): Fraction(1, 2)}


class TestConsistency:
    """Test consistency_check."""

    def test_expansions_are_consistent(self, example1):
        """Test an induced game keeps the base outcome of every action sequence."""
        assert consistency_check(example1, induce_game(example1, catalog.example1_expansion()))

    def test_example2_family_is_consistent(self):
        """Test the shifted-state family keeps ω_2 uniform and independent."""
        base = catalog.example2()

        assert consistency_check(base, catalog.example2_family(base))

    def test_example3_family_is_consistent(self):
        """Test the message-dependent family averages to 5/6 and 1/2."""
        base = catalog.example3()

        assert consistency_issues(base, catalog.example3_family(base)) == []

    def test_inconsistent_family(self):
        """Test a family that changes the state law is reported per action."""
        base = catalog.example3()
        issues = consistency_issues(base, _always_high(base))

        assert not consistency_check(base, _always_high(base))
        assert len(issues) == 2
        assert all(issue.startswith("a=") for issue in issues)


class TestFactorization:
    """Test factorization_test."""

    def test_induced_game_factorizes(self, example1):
        """Test an induced game recovers its ξ."""
        result = factorization_test(example1, induce_game(example1, catalog.example1_expansion()))

        assert result.factorizable
        assert result.witness is not None
        assert result.table
        assert all(line.startswith("ξ_") for line in describe_xi_table(result.table))

    def test_witness_rebuilds_the_family(self, example1, half):
        """Test inducing with the recovered ξ reproduces signal play."""
        result = factorization_test(example1, induce_game(example1, catalog.example1_expansion()))
        rebuilt = induce_game(example1, result.witness)
        signal_play = follow_messages(rebuilt, catalog.EXAMPLE1_SIGNAL_MAP)
        outcome = rebuilt.base_outcome(play(rebuilt.game, signal_play))

        assert outcome.expected_payoffs(example1) == (Fraction(5, 2), Fraction(1))

    def test_example2_does_not_factorize(self):
        """Test ω_2 = ω_1 + m_1 cannot come from an expansion."""
        base = catalog.example2()
        result = factorization_test(base, catalog.example2_family(base))

        assert not result.factorizable
        assert result.witness is None
        assert result.reason

    def test_example2_reinterpreted_factorizes(self):
        """Test drawing both states first makes the shift an expansion."""
        base = catalog.example2_reinterpreted()
        induced = induce_game(base, catalog.example2_reinterpreted_expansion())

        assert consistency_check(base, induced)
        assert factorization_test(base, induced).factorizable

    def test_example3_does_not_factorize(self):
        """Test the message-dependent state law is not an expansion."""
        base = catalog.example3()

        assert not factorization_test(base, catalog.example3_family(base)).factorizable


class TestOptimalValue:
    """Test optimal_value on Example 3."""

    def test_base_value(self):
        """Test the best the player can do alone is 1/2."""
        assert optimal_value(catalog.example3()) == Fraction(1, 2)

    def test_family_value(self):
        """Test the extra message raises the value to 2/3."""
        base = catalog.example3()

        assert optimal_value(catalog.example3_family(base).game) == Fraction(2, 3)

    def test_single_player_only(self, example1):
        """Test two-player games are refused."""
        with pytest.raises(ShapeMismatchError):
            optimal_value(example1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
