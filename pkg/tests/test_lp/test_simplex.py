"""
Unit tests for the exact simplex.

Tests LinearProgram, solve and feasible_point in src.bcelab.lp.simplex, and
the text dump in src.bcelab.lp.dump.
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.bcelab.core.config import config
from src.bcelab.core.errors import ShapeMismatchError
from src.bcelab.lp import LinearProgram, feasible_point, format_lp, simplex, solve

F = Fraction


class TestLinearProgram:
    """Test the problem container."""

    def test_dense_and_sparse_rows(self):
        """Test both row forms are accepted."""
        lp = LinearProgram(num_vars=2)
        lp.add_equality([1, 1], 1)
        lp.add_inequality({0: F(1, 2)}, 0)

        assert lp.num_constraints == 2
        assert lp.violations([F(1, 2), F(1, 2)]) == []

    def test_row_length_checked(self):
        """Test a dense row of the wrong length raises."""
        lp = LinearProgram(num_vars=2)
        with pytest.raises(ShapeMismatchError):
            lp.add_equality([1, 1, 1], 1)

    def test_sparse_column_checked(self):
        """Test a sparse column outside the variables raises."""
        lp = LinearProgram(num_vars=2)
        with pytest.raises(ShapeMismatchError):
            lp.add_inequality({5: 1}, 0)

    def test_named_variables(self):
        """Test names are kept and gaps filled."""
        lp = LinearProgram()
        lp.add_variable()
        j = lp.add_variable("mu_TL", free=True)

        assert lp.name(j) == "mu_TL"
        assert lp.name(0) == "x0"
        assert lp.is_free(j) and not lp.is_free(0)

    def test_violations_are_exact(self):
        """Test an off-by-epsilon point is reported."""
        lp = LinearProgram(num_vars=1)
        lp.add_equality([1], F(1, 3))

        assert lp.violations([F(1, 3)]) == []
        assert lp.violations([F(333, 1000)])


class TestSolve:
    """Test exact solving."""

    def test_textbook_optimum(self):
        """Test max 3x + 2y on a small polytope."""
        lp = LinearProgram(num_vars=2, objective=[3, 2])
        lp.add_inequality([-1, -1], -4)
        lp.add_inequality([-1, -3], -6)
        lp.add_inequality([-1, 0], -3)
        result = solve(lp)

        assert result.optimal
        assert result.value == 11
        assert result.solution == [F(3), F(1)]

    def test_rational_optimum(self):
        """Test optima with thirds stay exact."""
        lp = LinearProgram(num_vars=2, objective=[1, 1])
        lp.add_inequality([-3, -1], -2)
        lp.add_inequality([-1, -3], -2)
        result = solve(lp)

        assert result.value == F(1)
        assert result.solution == [F(1, 2), F(1, 2)]

    def test_infeasible(self):
        """Test contradictory constraints."""
        lp = LinearProgram(num_vars=1, objective=[1])
        lp.add_inequality([1], 2)
        lp.add_inequality([-1], -1)

        assert solve(lp).status == "infeasible"

    def test_unbounded(self):
        """Test a missing upper bound."""
        lp = LinearProgram(num_vars=2, objective=[1, 0])
        lp.add_inequality([1, -1], 0)

        assert solve(lp).status == "unbounded"

    def test_free_variable(self):
        """Test a free variable may go negative."""
        lp = LinearProgram(num_vars=1, objective=[-1], free_vars={0})
        lp.add_inequality([1], -5)
        result = solve(lp)

        assert result.value == 5
        assert result.solution == [F(-5)]

    def test_degenerate_redundant_equalities(self):
        """Test repeated equalities do not break phase one."""
        lp = LinearProgram(num_vars=3, objective=[1, 2, 3])
        lp.add_equality([1, 1, 1], 1)
        lp.add_equality([2, 2, 2], 2)
        lp.add_equality([1, 1, 1], 1)
        result = solve(lp)

        assert result.value == 3
        assert result.solution == [F(0), F(0), F(1)]

    def test_feasible_point_ignores_objective(self):
        """Test phase one alone returns a feasible vertex."""
        lp = LinearProgram(num_vars=2, objective=[1, 1])
        lp.add_equality([1, 1], 1)
        result = feasible_point(lp)

        assert result.optimal
        assert result.value == 0
        assert sum(result.solution) == 1

    def test_result_serializes_rationals(self):
        """Test results dump num/den strings."""
        lp = LinearProgram(num_vars=1, objective=[1])
        lp.add_inequality([-2], -1)
        dumped = solve(lp).model_dump()

        assert dumped["value"] == "1/2"
        assert dumped["solution"] == ["1/2"]


class TestPivoting:
    """Test the pivot rules and the starting basis."""

    @staticmethod
    def _beale():
        lp = LinearProgram(num_vars=4, objective=[F(3, 4), -20, F(1, 2), -6])
        lp.add_inequality([F(-1, 4), 8, 1, -9], 0)
        lp.add_inequality([F(-1, 2), 12, F(1, 2), -3], 0)
        lp.add_inequality([0, 0, -1, 0], -1)
        return lp

    def test_cycling_example(self):
        """Test the classic cycling instance reaches its optimum."""
        result = solve(self._beale())

        assert result.value == F(5, 4)
        assert self._beale().violations(result.solution) == []

    def test_bland_only(self, monkeypatch):
        """Test switching to Bland's rule at once gives the same optimum."""
        monkeypatch.setattr(simplex, "DEGENERATE_LIMIT", 0)

        assert solve(self._beale()).value == F(5, 4)

    def test_slack_basis_needs_no_phase_one(self):
        """Test homogeneous rows start from a feasible slack basis."""
        lp = LinearProgram(num_vars=2)
        lp.add_inequality([1, -1], 0)
        lp.add_inequality([-1, -1], -1)
        result = feasible_point(lp)

        assert result.optimal
        assert result.iterations == 0
        assert result.solution == [F(0), F(0)]

    def test_assignment_with_redundant_row(self):
        """Test an 8x8 assignment LP, whose equalities are linearly dependent."""
        n = 8
        weights = [2 if i == j else 1 for i in range(n) for j in range(n)]
        lp = LinearProgram(num_vars=n * n, objective=weights)
        for i in range(n):
            lp.add_equality({i * n + j: 1 for j in range(n)}, 1)
            lp.add_equality({j * n + i: 1 for j in range(n)}, 1)
        result = solve(lp)

        assert result.value == 2 * n
        assert result.solution == [F(1) if i == j else F(0) for i in range(n) for j in range(n)]


def _brute_force_max(objective, rows, bound):
    """Best objective over intersections of two tight constraints in a box."""
    constraints = [(list(map(F, r)), F(rhs)) for r, rhs in rows]
    constraints += [([F(1), F(0)], F(0)), ([F(0), F(1)], F(0))]
    constraints += [([F(-1), F(0)], F(-bound)), ([F(0), F(-1)], F(-bound))]
    best = None
    for (a, p), (b, q) in itertools.combinations(constraints, 2):
        det = a[0] * b[1] - a[1] * b[0]
        if det == 0:
            continue
        x = (p * b[1] - a[1] * q) / det
        y = (a[0] * q - p * b[0]) / det
        if all(c[0] * x + c[1] * y >= rhs for c, rhs in constraints):
            value = objective[0] * x + objective[1] * y
            best = value if best is None or value > best else best
    return best


small = st.integers(min_value=-4, max_value=4)


class TestAgainstVertexEnumeration:
    """Two-variable programs checked against every vertex."""

    @given(
        objective=st.tuples(small, small),
        rows=st.lists(st.tuples(st.tuples(small, small), small), min_size=1, max_size=4),
    )
    @settings(max_examples=150)
    def test_matches_brute_force(self, objective, rows):
        """Test the simplex optimum equals the best vertex."""
        bound = 6
        lp = LinearProgram(num_vars=2, objective=list(objective))
        for row, rhs in rows:
            lp.add_inequality(list(row), rhs)
        lp.add_inequality([-1, 0], -bound)
        lp.add_inequality([0, -1], -bound)
        result = solve(lp)
        expected = _brute_force_max(objective, rows, bound)

        if expected is None:
            assert result.status == "infeasible"
        else:
            assert result.optimal
            assert result.value == expected
            assert lp.violations(result.solution) == []


class TestDump:
    """Test the plain-text dump."""

    def test_format(self):
        """Test rationals are written num/den."""
        lp = LinearProgram(num_vars=2, objective=[1, F(-1, 2)], free_vars={1})
        lp.add_equality([1, 1], 1)
        text = format_lp(lp)

        assert "max: 1/1 x0 + -1/2 x1" in text
        assert "eq0: 1/1 x0 + 1/1 x1 = 1/1" in text
        assert "free: x1" in text

    def test_dump_directory(self, tmp_path):
        """Test solves write a dump when lp_dump_dir is set."""
        config.override(solver={"lp_dump_dir": str(tmp_path / "lps")})
        lp = LinearProgram(num_vars=1, objective=[1])
        lp.add_inequality([-1], -1)
        solve(lp)

        dumps = list((tmp_path / "lps").glob("lp-*.txt"))
        assert len(dumps) == 1
        assert dumps[0].read_text().startswith("vars: 1")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
