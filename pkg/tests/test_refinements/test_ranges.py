"""
Unit tests for mediation ranges and behavioral kernels.

Tests src.bcelab.refinements.ranges and src.bcelab.refinements.kernels.
"""

from fractions import Fraction

import pytest

from src.bcelab.bce.feedback import BCEMixture
from src.bcelab.core.errors import RangeViolationError, ShapeMismatchError
from src.bcelab.core.types import NO_SIGNAL
from src.bcelab.refinements import MediationRange, kernels_from_mixture
from src.bcelab.scenarios import catalog

QUIET = (NO_SIGNAL, NO_SIGNAL)
ROOT = (((), QUIET),)


def _after(first):
    return (((), QUIET), ((first, NO_SIGNAL), QUIET))


def _only_right(game):
    return MediationRange(
        game, rule=lambda i, t, own, past: ("R",) if (i, t) == (1, 2) else game.actions[i][t - 1]
    )


class TestMediationRange:
    """Test MediationRange."""

    def test_full_range(self, example1):
        """Test the full range allows every action profile."""
        ranges = MediationRange.full(example1)

        assert set(ranges.allowed(0, 1, (("-",),), ())) == {"T", "B"}
        assert set(ranges.allowed_profiles(1, ROOT, ())) == {("T", NO_SIGNAL), ("B", NO_SIGNAL)}

    def test_table_beats_rule(self, example1):
        """Test explicit table cells override the fallback rule."""
        ranges = MediationRange(
            example1,
            table={(0, 1, (("-",),), ()): ("T",)},
            rule=lambda i, t, own, past: example1.actions[i][t - 1],
        )

        assert ranges.allowed(0, 1, (("-",),), ()) == ("T",)
        assert ranges.allowed_profiles(1, ROOT, ()) == [("T", NO_SIGNAL)]
        assert not ranges.consistent_private(0, (("-",),), ("B",))
        assert ranges.consistent_private(0, (("-",),), ("T",))

    def test_contains(self, example1):
        """Test contains checks every stage's recommendation."""
        ranges = _only_right(example1)
        history = _after("T")

        assert ranges.contains(history, (("T", NO_SIGNAL), (NO_SIGNAL, "R")))
        assert not ranges.contains(history, (("T", NO_SIGNAL), (NO_SIGNAL, "L")))

    def test_empty_range(self, example1):
        """Test a range must allow at least one action."""
        ranges = MediationRange(example1, rule=lambda i, t, own, past: ())

        with pytest.raises(ShapeMismatchError, match="Empty"):
            ranges.allowed(0, 1, (("-",),), ())

    def test_unknown_action(self, example1):
        """Test ranges may only name the player's actions."""
        ranges = MediationRange(example1, rule=lambda i, t, own, past: ("X",))

        with pytest.raises(ShapeMismatchError, match="unknown"):
            ranges.allowed(0, 1, (("-",),), ())

    def test_rule_violation(self, example1, example1_mixture):
        """Test a rule recommending L is outside an R-only range."""
        ranges = _only_right(example1)
        problem = ranges.rule_violation(example1_mixture.entries[0].rule)

        assert problem is not None
        assert "outside range" in problem
        with pytest.raises(RangeViolationError):
            ranges.check_mixture(example1_mixture)

    def test_full_range_accepts_mixture(self, example1, example1_mixture):
        """Test the full range accepts every rule."""
        MediationRange.full(example1).check_mixture(example1_mixture)


class TestKernels:
    """Test kernels_from_mixture."""

    def test_root_row(self, example1, example1_mixture, half):
        """Test the stage-1 kernel recommends T and B with probability 1/2."""
        kernels = kernels_from_mixture(example1, example1_mixture)

        row = kernels.row(1, ROOT, (NO_SIGNAL,), ())
        assert row == {("T", NO_SIGNAL): half, ("B", NO_SIGNAL): half}

    def test_conditional_rows(self, example1, example1_mixture):
        """Test L follows obedience and R follows a deviation."""
        kernels = kernels_from_mixture(example1, example1_mixture)
        w = (NO_SIGNAL, NO_SIGNAL)

        recs = (("T", NO_SIGNAL),)
        assert kernels.row(2, _after("T"), w, recs) == {(NO_SIGNAL, "L"): Fraction(1)}
        assert kernels.row(2, _after("B"), w, recs) == {(NO_SIGNAL, "R"): Fraction(1)}

    def test_unstored_rows_are_uniform(self, example1, example1_mixture, half):
        """Test a row the mixture never reaches is uniform."""
        kernels = kernels_from_mixture(example1, example1_mixture)
        row = kernels.row(2, _after("T"), (NO_SIGNAL, NO_SIGNAL), (("X", NO_SIGNAL),))

        assert row == {(NO_SIGNAL, "L"): half, (NO_SIGNAL, "R"): half}

    def test_lines(self, example1, example1_mixture):
        """Test every stored row is listed."""
        kernels = kernels_from_mixture(example1, example1_mixture)

        assert len(kernels.lines()) == len(kernels.rows)
        assert any(line.startswith("t1") for line in kernels.lines())
        assert kernels.describe() == f"kernels({len(kernels.rows)} rows)"

    def test_ranges_are_enforced(self, example1, example1_mixture):
        """Test kernels refuse a mixture outside the ranges."""
        with pytest.raises(RangeViolationError):
            kernels_from_mixture(example1, example1_mixture, _only_right(example1))

    def test_point_mass(self, example1):
        """Test a single rule yields degenerate rows."""
        mixture = BCEMixture.point_mass(catalog.example1_mixture().entries[1].rule)
        kernels = kernels_from_mixture(example1, mixture, MediationRange.full(example1))

        assert kernels.row(1, ROOT, (NO_SIGNAL,), ()) == {("B", NO_SIGNAL): Fraction(1)}


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
