"""
Unit tests for expansion and kernel-family documents.

Tests src.bcelab.expansion.io.
"""

from fractions import Fraction

import pytest
import yaml

from src.bcelab.core.errors import GameFileError
from src.bcelab.expansion import (
    Expansion,
    KernelFamily,
    consistency_check,
    factorization_test,
    induce_game,
    information_from_dict,
    load_expansion,
    load_family,
    load_information,
    optimal_value,
    xi_table_to_dict,
)
from src.bcelab.scenarios import catalog


def _example3_family_document():
    def row(action, message, p_high):
        entries = [
            {
                "stage": 2,
                "given": {"actions": [action], "messages": [[message]]},
                "outcome": {"state": state, "messages": ["-"]},
                "prob": prob,
            }
            for state, prob in (("1", p_high), ("0", str(1 - Fraction(p_high))))
        ]
        return [e for e in entries if Fraction(e["prob"])]

    return {
        "raw_kernels": True,
        "messages": {"1": [["0", "1"], ["-"]]},
        "initial_kernel": [
            {"messages": ["0"], "prob": "1/2"},
            {"messages": ["1"], "prob": "1/2"},
        ],
        "transition_kernels": (
            row("1", "1", "2/3") + row("0", "1", "1") + row("1", "0", "1") + row("0", "0", "0")
        ),
    }


class TestExpansionDocuments:
    """Test expansion files."""

    def test_sample_expansion(self, samples, example1):
        """Test the sample file matches the catalog expansion."""
        expansion = load_expansion(example1, samples / "example1_expansion.yaml")
        induced = induce_game(example1, expansion)
        reference = induce_game(example1, catalog.example1_expansion())

        assert isinstance(expansion, Expansion)
        assert expansion.name == "t/b then l/r"
        assert consistency_check(example1, induced)
        expected = factorization_test(example1, reference).table
        assert factorization_test(example1, induced).table == expected

    def test_unmatched_rows_are_uniform(self, example1):
        """Test a point with no entry draws messages uniformly."""
        expansion = information_from_dict(
            example1, {"messages": {"1": [["t", "b"], ["-"]], "2": [["-"], ["-"]]}}
        )
        row = expansion.xi(1, (((), ("-", "-")),), (), ("-",))

        assert row == {("t", "-"): Fraction(1, 2), ("b", "-"): Fraction(1, 2)}

    def test_unknown_message(self, example1):
        """Test outcomes must be message profiles."""
        data = {
            "messages": {"1": [["t", "b"], ["-"]], "2": [["-"], ["-"]]},
            "xi_kernels": [{"stage": 1, "outcome": ["x", "-"], "prob": "1"}],
        }

        with pytest.raises(GameFileError, match="message profile"):
            information_from_dict(example1, data)

    def test_wrong_stage_count(self, example1):
        """Test message tables list every stage."""
        with pytest.raises(GameFileError, match="stages"):
            information_from_dict(example1, {"messages": {"1": [["t"]], "2": [["-"]]}})

    def test_sections_must_match_kind(self, example1):
        """Test raw kernels cannot appear in an expansion."""
        data = {
            "messages": {"1": [["t"], ["-"]], "2": [["-"], ["-"]]},
            "initial_kernel": [{"messages": ["t", "-"], "prob": "1"}],
        }

        with pytest.raises(GameFileError):
            information_from_dict(example1, data)

    def test_table_document_reloads(self, example1):
        """Test a recovered ξ table written out loads as the same expansion."""
        reference = induce_game(example1, catalog.example1_expansion())
        result = factorization_test(example1, reference)
        document = xi_table_to_dict(example1, result.witness, result.table)
        reloaded = information_from_dict(example1, document)

        assert all("/" in e["prob"] for e in document["xi_kernels"])
        assert factorization_test(example1, induce_game(example1, reloaded)).table == result.table


class TestFamilyDocuments:
    """Test raw kernel-family files."""

    def test_example3_family(self):
        """Test the document form of Example 3's family."""
        base = catalog.example3()
        family = information_from_dict(base, _example3_family_document())

        assert isinstance(family, KernelFamily)
        assert consistency_check(base, family)
        assert not factorization_test(base, family).factorizable
        assert optimal_value(family.game) == Fraction(2, 3)

    def test_load_helpers_check_kind(self, tmp_path, samples, example1):
        """Test load_family and load_expansion refuse the other kind."""
        base = catalog.example3()
        path = tmp_path / "family.yaml"
        path.write_text(yaml.safe_dump(_example3_family_document()))

        assert isinstance(load_information(base, path), KernelFamily)
        assert isinstance(load_family(base, path), KernelFamily)
        with pytest.raises(GameFileError, match="raw kernels"):
            load_expansion(base, path)
        with pytest.raises(GameFileError, match="holds an expansion"):
            load_family(example1, samples / "example1_expansion.yaml")

    def test_family_needs_initial_kernel(self):
        """Test a family without an initial kernel is refused."""
        document = _example3_family_document()
        document["initial_kernel"] = []

        with pytest.raises(GameFileError):
            information_from_dict(catalog.example3(), document)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
