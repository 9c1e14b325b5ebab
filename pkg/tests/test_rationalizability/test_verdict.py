"""
Unit tests for rationalizability verdicts.

Tests src.bcelab.rationalizability.verdict.
"""

from fractions import Fraction

import pytest

from src.bcelab.core.errors import ShapeMismatchError
from src.bcelab.rationalizability import additive_problem, is_rationalizable
from src.bcelab.scenarios import catalog


@pytest.fixture
def table1():
    return catalog.table1()


class TestVerdict:
    """Test is_rationalizable."""

    def test_table1_target(self, table1):
        """Test (l, c) is rationalizable with informative feedback."""
        verdict = is_rationalizable(table1, catalog.TABLE1_TARGET)

        assert verdict.rationalizable
        assert verdict.value > 0
        assert verdict.witness is not None
        assert verdict.witness.free_prior
        assert verdict.witness.total == 1
        assert verdict.plan is None

    def test_witness_recommends_target(self, table1):
        """Test the witness plays (l, c) with the reported probability."""
        verdict = is_rationalizable(table1, ("l", "c"))
        game = table1.as_game()
        played = verdict.witness.outcome_distribution(game).marginal(
            lambda z: tuple(a[0] for a in z.actions)
        )

        assert played[("l", "c")] == verdict.value

    def test_dominated_profile(self, table1):
        """Test (l, l) is ruled out by a deviation plan."""
        verdict = is_rationalizable(table1, ("l", "l"))

        assert not verdict.rationalizable
        assert verdict.status == "dominated"
        assert verdict.value == 0
        assert verdict.plan is not None
        lines = verdict.lines()
        assert lines[0] == "l,l: dominated (max μ(F*) = 0/1)"
        assert any(line.startswith("  D(") for line in lines[1:])

    def test_best_profile(self, table1):
        """Test a profile that is optimal in one state is rationalizable."""
        verdict = is_rationalizable(table1, ("c", "c"))

        assert verdict.rationalizable
        assert verdict.value == 1

    def test_single_period(self):
        """Test a strictly worse choice is not rationalizable."""
        stage = {(1, "good", "s"): Fraction(1), (1, "bad", "s"): Fraction(0)}
        problem = additive_problem([["good", "bad"]], ["s"], stage)

        assert is_rationalizable(problem, ("good",)).rationalizable
        assert is_rationalizable(problem, ("bad",)).status == "dominated"

    def test_lines_for_rationalizable(self, table1):
        """Test witness rules are listed under the verdict."""
        lines = is_rationalizable(table1, ("l", "c")).lines()

        assert lines[0].startswith("l,c: rationalizable (max μ(F*) = ")
        assert len(lines) > 1

    def test_bad_target(self, table1):
        """Test targets must be profiles."""
        with pytest.raises(ShapeMismatchError):
            is_rationalizable(table1, ("l",))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
