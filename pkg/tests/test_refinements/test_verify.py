"""
Unit tests for the weak perfect and sequential verifiers.

Tests src.bcelab.refinements.verify.
"""

from fractions import Fraction

import pytest

from src.bcelab.bce.feedback import BCEMixture, MixtureEntry
from src.bcelab.bce.mediated import info_set
from src.bcelab.core.errors import ShapeMismatchError
from src.bcelab.core.types import NO_SIGNAL
from src.bcelab.refinements import (
    BeliefSystem,
    LexicographicCPS,
    MediationRange,
    cps_check,
    kernels_from_mixture,
    pessimistic_cps,
    verify_sbce,
    verify_wpbce,
)
from src.bcelab.scenarios import catalog

QUIET = (NO_SIGNAL, NO_SIGNAL)
W2 = (NO_SIGNAL, NO_SIGNAL)


def _stage2(played, recommended, second):
    h = (((), QUIET), ((played, NO_SIGNAL), QUIET))
    return h, W2, ((recommended, NO_SIGNAL), (NO_SIGNAL, second))


def _belief(*weighted):
    """Player 2's belief over stage-2 mediated histories."""
    keys = [(_stage2(*cell), Fraction(p)) for cell, p in weighted]
    h, _, recs = keys[0][0]
    beliefs = BeliefSystem()
    beliefs.set(1, info_set(h, recs, 1), {key: p for key, p in keys})
    return beliefs


@pytest.fixture
def kernels(example1, example1_mixture):
    return kernels_from_mixture(example1, example1_mixture)


@pytest.fixture
def bargaining():
    params = catalog.bargaining_parameters()
    game = catalog.bargaining_game(params)
    constructions = {c.name: c for c in catalog.bargaining_constructions(game, params)}
    return game, params, constructions


class TestWeakPerfect:
    """Test verify_wpbce on Example 1."""

    def test_belief_on_bottom(self, example1, kernels):
        """Test R is obeyed when player 2 believes B was played."""
        report = verify_wpbce(
            example1, MediationRange.full(example1), kernels, catalog.example1_beliefs("B")
        )

        assert report.clean
        assert report.lines() == []

    def test_belief_on_top(self, example1, kernels):
        """Test R is not obeyed when player 2 believes T was played."""
        report = verify_wpbce(
            example1, MediationRange.full(example1), kernels, catalog.example1_beliefs("T")
        )
        issues = report.of_player("2", "obedience")

        assert len(issues) == 1
        assert report.kinds() == ["obedience"]
        assert report.lines()[0].startswith("[obedience] player 2 t2")

    def test_missing_belief(self, example1, kernels):
        """Test the off-path recommendation R needs a belief."""
        report = verify_wpbce(example1, MediationRange.full(example1), kernels, BeliefSystem())

        assert report.kinds() == ["missing_belief"]
        assert report.of_player("2")

    def test_belief_against_bayes(self, example1, kernels):
        """Test on-path beliefs must follow Bayes' rule."""
        beliefs = _belief((("T", "T", "L"), 1))
        report = verify_wpbce(example1, MediationRange.full(example1), kernels, beliefs)

        assert "belief" in report.kinds()

    def test_belief_must_sum_to_one(self, example1, kernels):
        """Test a sub-probability belief is reported."""
        beliefs = _belief((("B", "T", "R"), "1/2"))
        report = verify_wpbce(example1, MediationRange.full(example1), kernels, beliefs)

        assert "support" in report.kinds()

    def test_belief_support_must_match(self, example1, kernels):
        """Test beliefs may only charge histories of the private history."""
        beliefs = _belief((("B", "T", "R"), "1/2"), (("B", "T", "L"), "1/2"))
        report = verify_wpbce(example1, MediationRange.full(example1), kernels, beliefs)

        assert any("does not match" in i.detail for i in report.issues if i.kind == "support")

    def test_kernels_of_another_game(self, example1, kernels):
        """Test kernels must belong to the verified game."""
        with pytest.raises(ShapeMismatchError):
            verify_wpbce(catalog.example3(), MediationRange.full(example1), kernels, BeliefSystem())


class TestSequential:
    """Test verify_sbce on the bargaining constructions."""

    @pytest.mark.parametrize("name", ["low-offer", "full-extraction", "mixed-acceptance"])
    def test_corner_constructions(self, bargaining, name):
        """Test each corner construction is sequential under pessimistic beliefs."""
        game, params, constructions = bargaining
        construction = constructions[name]
        cps = pessimistic_cps(game, construction.mixture, catalog.state_order(params))

        assert verify_sbce(game, construction.ranges, construction.mixture, cps).clean
        payoffs = construction.mixture.outcome_distribution(game).expected_payoffs(game)
        assert payoffs == construction.payoffs

    def test_pessimistic_cps_is_a_cps(self, bargaining):
        """Test the pessimistic perturbation satisfies the CPS properties."""
        game, params, constructions = bargaining
        construction = constructions["low-offer"]

        cps = pessimistic_cps(game, construction.mixture, catalog.state_order(params))
        assert cps_check(cps) == []

    def test_accepting_above_mean(self, bargaining):
        """Test accepting offers above the mean lets the seller raise the offer."""
        game, params, constructions = bargaining
        construction = constructions["accept-above-mean"]
        cps = pessimistic_cps(game, construction.mixture, catalog.state_order(params))
        report = verify_sbce(game, construction.ranges, construction.mixture, cps)

        assert not construction.sequential
        assert report.of_player("seller", "obedience")

    def test_desk_corners(self, bargaining):
        """Test the desk instance corners are (0, 1/2), (0, 3/2) and (1, 1/2)."""
        _, params, constructions = bargaining
        half = Fraction(1, 2)

        assert set(catalog.bargaining_vertices(params)) == {
            (Fraction(0), half),
            (Fraction(0), Fraction(3, 2)),
            (Fraction(1), half),
        }
        assert constructions["low-offer"].payoffs == (Fraction(1), half)

    def test_cps_on_wrong_ground(self, bargaining):
        """Test a CPS missing obedient outcomes fails consistency."""
        game, _, constructions = bargaining
        construction = constructions["low-offer"]
        stray = LexicographicCPS([{"x": Fraction(1)}])
        report = verify_sbce(game, construction.ranges, construction.mixture, stray)

        assert report.kinds() == ["cps_consistency"]

    def test_mixture_must_sum_to_one(self, bargaining):
        """Test a sub-probability mixture is refused."""
        game, params, constructions = bargaining
        rule = constructions["low-offer"].mixture.entries[0].rule
        mixture = BCEMixture((MixtureEntry(rule, Fraction(1, 2)),))

        with pytest.raises(ShapeMismatchError):
            verify_sbce(
                game, MediationRange.full(game), mixture, LexicographicCPS([{"x": Fraction(1)}])
            )

    def test_range_violation_reported(self, bargaining):
        """Test a rule outside the ranges is reported, not raised."""
        game, params, constructions = bargaining
        extraction = constructions["full-extraction"]
        cps = pessimistic_cps(game, extraction.mixture, catalog.state_order(params))
        report = verify_sbce(game, constructions["low-offer"].ranges, extraction.mixture, cps)

        assert "range" in report.kinds()


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
