"""
Unit tests for decision problems and their files.

Tests src.bcelab.rationalizability.problem and src.bcelab.rationalizability.io.
"""

from fractions import Fraction

import pytest

from src.bcelab.core.errors import GameFileError, GameValidationError, ShapeMismatchError
from src.bcelab.games.base import payoff_vector, validate_game
from src.bcelab.rationalizability import (
    DECISION_MAKER,
    DecisionProblem,
    additive_problem,
    load_problem,
    problem_from_dict,
    problem_to_dict,
)
from src.bcelab.scenarios import catalog


class TestDecisionProblem:
    """Test DecisionProblem."""

    def test_table1_utilities(self):
        """Test per-period payoffs add up."""
        problem = catalog.table1()

        assert problem.periods == 2
        assert len(problem.profiles()) == 9
        assert problem.u(("c", "c"), "w") == 2
        assert problem.u(("c", "r"), "w'") == 1
        assert problem.u(("l", "l"), "w") == 0

    def test_missing_utility(self):
        """Test utilities must cover every profile and state."""
        with pytest.raises(GameValidationError, match="Utility missing"):
            DecisionProblem((("a", "b"),), ("s",), {(("a",), "s"): Fraction(1)})

    def test_empty_action_set(self):
        """Test every period needs actions."""
        with pytest.raises(GameValidationError, match="period 1"):
            DecisionProblem(((),), ("s",), {})

    def test_missing_stage_payoff(self):
        """Test additive problems need every stage cell."""
        with pytest.raises(GameValidationError, match="Stage payoff missing"):
            additive_problem([["a"]], ["s"], {})

    def test_check_target(self):
        """Test targets must be complete profiles."""
        problem = catalog.table1()

        assert problem.check_target(["l", "c"]) == ("l", "c")
        with pytest.raises(ShapeMismatchError):
            problem.check_target(["l"])
        with pytest.raises(ShapeMismatchError):
            problem.check_target(["l", "x"])

    def test_as_game(self):
        """Test the one-player game keeps the state fixed."""
        game = catalog.table1().as_game()
        terminals = game.tree().terminals

        assert game.players == (DECISION_MAKER,)
        assert validate_game(game).valid
        assert len(terminals) == 18
        assert all(len(set(z.states)) == 1 for z in terminals)
        z = next(
            t
            for t in terminals
            if t.states[0] == "w" and t.actions[0] == ("c",) and t.actions[1] == ("c",)
        )
        assert payoff_vector(game, z) == (Fraction(2),)

    def test_lines(self):
        """Test the listing shows one row per profile."""
        lines = catalog.table1().lines()

        assert lines[0].startswith("table1: 2 periods")
        assert len(lines) == 10


class TestProblemFiles:
    """Test decision-problem documents."""

    def test_sample_table1(self, samples):
        """Test the sample file matches the catalog problem."""
        loaded = load_problem(samples / "table1.yaml")
        reference = catalog.table1()

        assert loaded.name == "table1"
        assert all(
            loaded.u(a, w) == reference.u(a, w)
            for a in reference.profiles()
            for w in reference.states
        )

    def test_utility_form_defaults_to_zero(self):
        """Test unlisted profiles pay zero."""
        problem = problem_from_dict(
            {
                "actions": [["a", "b"]],
                "states": ["s", "t"],
                "utility": [{"actions": ["a"], "state": "s", "value": "3/2"}],
            }
        )

        assert problem.u(("a",), "s") == Fraction(3, 2)
        assert problem.u(("b",), "t") == 0

    def test_both_forms_refused(self):
        """Test utility and stage payoffs cannot be mixed."""
        data = {
            "actions": [["a"]],
            "states": ["s"],
            "utility": [{"actions": ["a"], "state": "s", "value": 1}],
            "stage_payoffs": [{"period": 1, "action": "a", "state": "s", "value": 1}],
        }

        with pytest.raises(GameFileError):
            problem_from_dict(data)

    def test_unknown_stage_cell(self):
        """Test stage payoffs must name existing actions."""
        stage = [{"period": 1, "action": "z", "state": "s", "value": 1}]
        data = {"actions": [["a"]], "states": ["s"], "stage_payoffs": stage}

        with pytest.raises(GameFileError, match="no action z"):
            problem_from_dict(data)

    def test_utility_outside_problem(self):
        """Test utility entries must name a profile and state."""
        utility = [{"actions": ["a"], "state": "q", "value": 1}]
        data = {"actions": [["a"]], "states": ["s"], "utility": utility}

        with pytest.raises(GameFileError, match="outside the problem"):
            problem_from_dict(data)

    def test_dict_reloads(self):
        """Test the explicit form reloads with the same utilities."""
        reference = catalog.table1()
        data = problem_to_dict(reference)
        reloaded = problem_from_dict(data)

        assert data["utility"][0]["value"].count("/") == 1
        assert all(
            reloaded.u(a, w) == reference.u(a, w)
            for a in reference.profiles()
            for w in reference.states
        )


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
