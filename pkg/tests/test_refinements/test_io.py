"""
Unit tests for candidate-equilibrium bundles.

Tests src.bcelab.refinements.io.
"""

import pytest
import yaml

from src.bcelab.core.errors import GameFileError, RangeViolationError
from src.bcelab.refinements import bundle_from_dict, load_bundle, verify_bundle

OBEYED_L = {"stage": 2, "given": {"obedient": True}, "recommend": ["-", "L"]}


def _sample(samples):
    return yaml.safe_load((samples / "example1_bundle.yaml").read_text())


class TestWeakPerfectBundles:
    """Test bundles without a cps section."""

    def test_sample_bundle(self, samples, example1):
        """Test the sample bundle passes."""
        bundle = load_bundle(example1, samples / "example1_bundle.yaml")

        assert not bundle.sequential
        assert bundle.mixture is not None
        assert bundle.mixture.total == 1
        assert verify_bundle(bundle).clean

    def test_belief_on_top(self, samples, example1):
        """Test moving the belief to T breaks player 2's obedience."""
        data = _sample(samples)
        support = data["beliefs"][0]["support"][0]
        support["history"][1][0][0] = "T"
        support["recommendations"][0][0] = "B"
        report = verify_bundle(bundle_from_dict(example1, data))

        assert report.of_player("2", "obedience")

    def test_ranges_section(self, samples, example1):
        """Test an R-only range refuses rules recommending L."""
        data = _sample(samples)
        data["ranges"] = [{"player": "2", "stage": 2, "allowed": ["R"]}]

        with pytest.raises(RangeViolationError):
            verify_bundle(bundle_from_dict(example1, data))

    def test_explicit_kernels(self, example1):
        """Test kernels given directly still need off-path beliefs."""
        data = {
            "kernels": [
                {"stage": 1, "distribution": [{"recommend": ["T", "-"], "prob": "1"}]},
                {
                    "stage": 2,
                    "given": {"obedient": True},
                    "distribution": [{"recommend": ["-", "L"], "prob": "1"}],
                },
                {
                    "stage": 2,
                    "given": {"obedient": False},
                    "distribution": [{"recommend": ["-", "R"], "prob": "1"}],
                },
            ]
        }
        bundle = bundle_from_dict(example1, data)

        assert bundle.mixture is None
        assert bundle.kernels is not None
        assert verify_bundle(bundle).kinds() == ["missing_belief"]


class TestSequentialBundles:
    """Test bundles with a cps section."""

    def test_pessimistic_cps(self, samples, example1):
        """Test the sample rules with a pessimistic CPS are checked as sequential."""
        data = _sample(samples)
        del data["beliefs"]
        data["cps"] = {"kind": "pessimistic"}
        bundle = bundle_from_dict(example1, data)

        assert bundle.sequential
        assert verify_bundle(bundle).clean

    def test_lexicographic_elements(self, samples, example1):
        """Test lexicographic levels resolve their elements."""
        data = _sample(samples)
        del data["beliefs"]
        data["cps"] = {
            "kind": "lexicographic",
            "levels": [
                [
                    {"rule": 0, "actions": [["T", "-"], ["-", "L"]], "prob": "1/2"},
                    {"rule": 1, "actions": [["B", "-"], ["-", "L"]], "prob": "1/2"},
                ]
            ],
        }
        bundle = bundle_from_dict(example1, data)

        assert bundle.sequential
        assert len(bundle.cps.ground) == 2

    def test_element_out_of_range(self, samples, example1):
        """Test CPS elements must name an existing rule."""
        data = _sample(samples)
        element = {"rule": 5, "actions": [["T", "-"], ["-", "L"]], "weight": "1"}
        data["cps"] = {"kind": "perturbed", "weights": [element]}

        with pytest.raises(GameFileError, match="rule index"):
            bundle_from_dict(example1, data)

    def test_bad_weight(self, samples, example1):
        """Test perturbation weights must parse."""
        data = _sample(samples)
        element = {"rule": 0, "actions": [["T", "-"], ["-", "L"]], "weight": "1/(("}
        data["cps"] = {"kind": "perturbed", "weights": [element]}

        with pytest.raises(GameFileError, match="bad weight"):
            bundle_from_dict(example1, data)


class TestInvalidBundles:
    """Test bundle validation errors."""

    def test_empty_bundle(self, example1):
        """Test a bundle needs a candidate."""
        with pytest.raises(GameFileError, match="rules or kernels"):
            bundle_from_dict(example1, {})

    def test_cps_needs_rules(self, example1):
        """Test a cps section requires rules."""
        data = {
            "kernels": [{"stage": 1, "distribution": [{"recommend": ["T", "-"], "prob": "1"}]}],
            "cps": {"kind": "pessimistic"},
        }

        with pytest.raises(GameFileError, match="needs rules"):
            bundle_from_dict(example1, data)

    def test_unknown_player(self, samples, example1):
        """Test ranges must name a player of the game."""
        data = _sample(samples)
        data["ranges"] = [{"player": "3", "stage": 1, "allowed": ["T"]}]

        with pytest.raises(GameFileError, match="unknown player"):
            bundle_from_dict(example1, data)

    def test_belief_spanning_private_histories(self, samples, example1):
        """Test one belief covers a single private history."""
        data = _sample(samples)
        extra = dict(data["beliefs"][0]["support"][0])
        extra["recommendations"] = [["T", "-"], ["-", "L"]]
        data["beliefs"][0]["support"].append(extra)

        with pytest.raises(GameFileError, match="spans 2 private histories"):
            bundle_from_dict(example1, data)

    def test_kernel_profile(self, example1):
        """Test kernel outcomes must be stage profiles."""
        data = {"kernels": [{"stage": 1, "distribution": [{"recommend": ["-", "L"], "prob": "1"}]}]}

        with pytest.raises(GameFileError, match="stage-1 profile"):
            bundle_from_dict(example1, data)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
