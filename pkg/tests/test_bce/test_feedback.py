"""
Unit tests for feedback rules and mixtures.

Tests src.bcelab.bce.feedback.
"""

from fractions import Fraction

import pytest

from src.bcelab.bce.feedback import (
    BCEMixture,
    FunctionRule,
    count_feedback_rules,
    enumerate_feedback_rules,
    rule_from_profile,
    tabulate,
)
from src.bcelab.core.errors import CapExceededError, ShapeMismatchError
from src.bcelab.core.types import NO_SIGNAL
from src.bcelab.games.base import pure_nash_equilibria
from src.bcelab.scenarios import catalog


def _always(first, second):
    return FunctionRule(
        lambda t, h, w, recs: (first, NO_SIGNAL) if t == 1 else (NO_SIGNAL, second),
        f"{first} then {second}",
    )


def _pairs(distribution):
    return {(z.history[1][0][0], z.history[2][0][1]): p for z, p in distribution.weights.items()}


class TestCounting:
    """Test rule counts and enumeration."""

    def test_reduced_count(self, example1):
        """Test 2 stage-1 choices times 2^2 stage-2 cells."""
        assert count_feedback_rules(example1, reduced=True) == 8

    def test_full_count(self, example1):
        """Test full cells also key on past recommendations."""
        assert count_feedback_rules(example1) == 32

    def test_enumeration_matches_count(self, example1):
        """Test enumeration lists distinct rules."""
        rules = enumerate_feedback_rules(example1, reduced=True)

        assert len(rules) == 8
        assert len(set(rules)) == 8

    def test_rule_cap(self, example1):
        """Test the rule cap raises CapExceededError."""
        with pytest.raises(CapExceededError) as info:
            enumerate_feedback_rules(example1, cap=5)
        assert info.value.cap == "rules"

    def test_allowed_restricts_cells(self, example1):
        """Test a range restriction shrinks the family."""
        only_left = lambda t, h, w, recs: [p for p in example1.action_profiles(t) if p[1] != "R"]
        rules = enumerate_feedback_rules(example1, reduced=True, allowed=only_left)

        assert len(rules) == 2

    def test_tabulate_keeps_choices(self, example1):
        """Test a tabulated rule recommends what the function did."""
        rule = catalog.example1_mixture().entries[0].rule
        table = tabulate(rule, example1)

        assert BCEMixture.point_mass(table).outcome_distribution(example1) == BCEMixture.point_mass(
            rule
        ).outcome_distribution(example1)


class TestMixture:
    """Test BCEMixture."""

    def test_uniform(self, half):
        """Test uniform weights."""
        mixture = BCEMixture.uniform([_always("T", "L"), _always("B", "R")])

        assert mixture.total == 1
        assert [e.weight for e in mixture.entries] == [half, half]
        assert not mixture.free_prior

    def test_uniform_empty(self):
        """Test an empty family is refused."""
        with pytest.raises(ShapeMismatchError):
            BCEMixture.uniform([])

    def test_outcome_distribution(self, example1, example1_mixture, half):
        """Test obedient play of the Example 1 mixture."""
        outcome = example1_mixture.outcome_distribution(example1)
        assert _pairs(outcome) == {("T", "L"): half, ("B", "L"): half}

    def test_combine(self, example1):
        """Test convex combinations weight both sides."""
        left = BCEMixture.point_mass(_always("T", "L"))
        right = BCEMixture.point_mass(_always("B", "R"))
        mixed = left.combine(right, Fraction(1, 3))

        assert mixed.total == 1
        assert _pairs(mixed.outcome_distribution(example1)) == {
            ("T", "L"): Fraction(1, 3),
            ("B", "R"): Fraction(2, 3),
        }

    def test_combine_weight_range(self):
        """Test weights outside [0, 1] are refused."""
        left = BCEMixture.point_mass(_always("T", "L"))
        with pytest.raises(ShapeMismatchError):
            left.combine(left, Fraction(3, 2))

    def test_describe(self, example1_mixture):
        """Test descriptions lead with num/den weights."""
        lines = example1_mixture.describe()

        assert len(lines) == 2
        assert all(line.startswith("1/2: ") for line in lines)


class TestRuleFromProfile:
    """Test rules built from pure strategy profiles."""

    def test_pure_nash_profile(self, example1):
        """Test the pure equilibrium (B, R) becomes a point-mass rule."""
        (profile,) = pure_nash_equilibria(example1)
        mixture = BCEMixture.point_mass(rule_from_profile(example1, profile))

        assert _pairs(mixture.outcome_distribution(example1)) == {("B", "R"): Fraction(1)}

    def test_profile_length(self, example1):
        """Test one strategy per player is required."""
        with pytest.raises(ShapeMismatchError):
            rule_from_profile(example1, [{}])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
