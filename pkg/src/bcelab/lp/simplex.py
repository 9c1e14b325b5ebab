"""
Exact rational linear programming.

A two-phase primal simplex over ``fractions.Fraction`` on a sparse tableau.
Every optimal answer is certified before it is returned:
the solution is substituted into the original constraints with zero residual
and the objective is recomputed from it.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Literal, Mapping, Optional, Sequence, Set, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import ShapeMismatchError, SolverError
from ..core.logger import get_logger
from ..core.types import Rational

logger = get_logger(__name__)

Row = Union[Sequence[Fraction], Mapping[int, Fraction]]
SparseRow = Dict[int, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


# ============================================================================
# Problem and Result Models
# ============================================================================


def _as_sparse(row: Row, num_vars: int, where: str) -> SparseRow:
    if isinstance(row, Mapping):
        sparse: SparseRow = {}
        for j, v in row.items():
            if not 0 <= j < num_vars:
                raise ShapeMismatchError(f"{where}: column {j} outside 0..{num_vars - 1}")
            if v:
                sparse[j] = Fraction(v)
        return sparse
    if len(row) != num_vars:
        raise ShapeMismatchError(f"{where}: row has {len(row)} entries, expected {num_vars}")
    return {j: Fraction(v) for j, v in enumerate(row) if v}


@dataclass
class LinearProgram:
    """
    ``maximize objective·x`` subject to ``row·x = rhs`` (equalities),
    ``row·x >= rhs`` (inequalities) and ``x >= 0`` for every variable not in
    ``free_vars`` (all variables are free when ``nonneg`` is false).

    Rows may be dense sequences of length ``num_vars`` or sparse
    ``{column: coefficient}`` mappings.
    """

    num_vars: int = 0
    equalities: List[Tuple[Row, Fraction]] = field(default_factory=list)
    inequalities: List[Tuple[Row, Fraction]] = field(default_factory=list)
    objective: Optional[Row] = None
    nonneg: bool = True
    free_vars: Set[int] = field(default_factory=set)
    names: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.num_vars < 0:
            raise ShapeMismatchError("num_vars must be nonnegative")
        for k, (row, _) in enumerate(self.equalities):
            _as_sparse(row, self.num_vars, f"equality {k}")
        for k, (row, _) in enumerate(self.inequalities):
            _as_sparse(row, self.num_vars, f"inequality {k}")
        if self.objective is not None:
            _as_sparse(self.objective, self.num_vars, "objective")
        for j in self.free_vars:
            if not 0 <= j < self.num_vars:
                raise ShapeMismatchError(f"free variable {j} outside 0..{self.num_vars - 1}")

    def add_variable(self, name: Optional[str] = None, free: bool = False) -> int:
        """Append a variable and return its column index."""
        index = self.num_vars
        self.num_vars += 1
        if free:
            self.free_vars.add(index)
        if name is not None or self.names:
            while len(self.names) < index:
                self.names.append(f"x{len(self.names)}")
            self.names.append(name if name is not None else f"x{index}")
        return index

    def add_equality(self, row: Row, rhs: Fraction) -> None:
        _as_sparse(row, self.num_vars, f"equality {len(self.equalities)}")
        self.equalities.append((row, Fraction(rhs)))

    def add_inequality(self, row: Row, rhs: Fraction) -> None:
        """Add ``row·x >= rhs``."""
        _as_sparse(row, self.num_vars, f"inequality {len(self.inequalities)}")
        self.inequalities.append((row, Fraction(rhs)))

    def is_free(self, j: int) -> bool:
        return not self.nonneg or j in self.free_vars

    def name(self, j: int) -> str:
        return self.names[j] if j < len(self.names) else f"x{j}"

    def sparse_objective(self) -> SparseRow:
        if self.objective is None:
            return {}
        return _as_sparse(self.objective, self.num_vars, "objective")

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        """Objective value at ``x``."""
        return sum((c * x[j] for j, c in self.sparse_objective().items()), ZERO)

    def violations(self, x: Sequence[Fraction]) -> List[str]:
        """Exact list of constraints ``x`` violates (empty when feasible)."""
        if len(x) != self.num_vars:
            raise ShapeMismatchError(f"point has {len(x)} entries, expected {self.num_vars}")
        found: List[str] = []
        for k, (row, rhs) in enumerate(self.equalities):
            lhs = sum((c * x[j] for j, c in _as_sparse(row, self.num_vars, "").items()), ZERO)
            if lhs != rhs:
                found.append(f"equality {k}: {lhs} != {rhs}")
        for k, (row, rhs) in enumerate(self.inequalities):
            lhs = sum((c * x[j] for j, c in _as_sparse(row, self.num_vars, "").items()), ZERO)
            if lhs < rhs:
                found.append(f"inequality {k}: {lhs} < {rhs}")
        for j, v in enumerate(x):
            if v < 0 and not self.is_free(j):
                found.append(f"bound: {self.name(j)} = {v} < 0")
        return found

    @property
    def num_constraints(self) -> int:
        return len(self.equalities) + len(self.inequalities)


class LPResult(BaseModel):
    """Outcome of a solve."""

    status: Literal["optimal", "infeasible", "unbounded"] = Field(..., description="Solve status")
    solution: Optional[List[Rational]] = Field(
        default=None, description="Basic feasible solution when optimal"
    )
    value: Optional[Rational] = Field(default=None, description="Optimal objective value")
    iterations: int = Field(default=0, ge=0, description="Number of pivots")

    model_config = ConfigDict(extra="forbid")

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


# ============================================================================
# Tableau
# ============================================================================

# Consecutive degenerate pivots tolerated before Bland's rule takes over.
DEGENERATE_LIMIT = 50


class SimplexTableau:
    """
    Sparse tableau in canonical form for ``maximize c·x, A x = b, x >= 0``.

    Rows are ``{column: coefficient}`` dictionaries holding only nonzero
    entries. ``reduced[j]`` holds ``c_j - c_B B^-1 A_j``; a column may enter
    while its reduced cost is positive.

    Entering columns follow Dantzig's rule (largest reduced cost). After
    ``DEGENERATE_LIMIT`` degenerate pivots in a row the tableau switches to
    Bland's rule until the objective strictly improves again, so it cannot
    cycle.
    """

    def __init__(self, rows: List[SparseRow], rhs: List[Fraction], basis: List[int]) -> None:
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.reduced: SparseRow = {}
        self.value = ZERO
        self.iterations = 0
        self.degenerate_run = 0

    @property
    def bland(self) -> bool:
        return self.degenerate_run >= DEGENERATE_LIMIT

    def set_objective(self, costs: Mapping[int, Fraction]) -> None:
        reduced: SparseRow = {j: Fraction(c) for j, c in costs.items() if c}
        value = ZERO
        for r, b in enumerate(self.basis):
            cb = costs.get(b)
            if cb:
                for j, v in self.rows[r].items():
                    z = reduced.get(j, ZERO) - cb * v
                    if z:
                        reduced[j] = z
                    else:
                        reduced.pop(j, None)
                value += cb * self.rhs[r]
        self.reduced = reduced
        self.value = value
        self.degenerate_run = 0

    @staticmethod
    def _eliminate(target: SparseRow, f: Fraction, row: SparseRow) -> None:
        for c, v in row.items():
            z = target.get(c, ZERO) - f * v
            if z:
                target[c] = z
            else:
                target.pop(c, None)

    def pivot(self, r: int, j: int) -> None:
        row = self.rows[r]
        piv = row[j]
        if piv != ONE:
            row = {c: v / piv for c, v in row.items()}
            self.rows[r] = row
            self.rhs[r] /= piv
        b = self.rhs[r]
        for k, other in enumerate(self.rows):
            if k == r:
                continue
            f = other.get(j)
            if f:
                self._eliminate(other, f, row)
                self.rhs[k] -= f * b
        f = self.reduced.get(j)
        if f:
            self._eliminate(self.reduced, f, row)
            self.value += f * b
        self.basis[r] = j
        self.iterations += 1

    def entering(self) -> Optional[int]:
        """Dantzig's largest reduced cost, or Bland's smallest index during a degenerate run."""
        improving = [j for j, z in self.reduced.items() if z > 0]
        if not improving:
            return None
        if self.bland:
            return min(improving)
        return max(improving, key=lambda j: (self.reduced[j], -j))

    def leaving(self, j: int) -> Optional[int]:
        """Minimum ratio, ties broken by the smallest basic column."""
        best: Optional[Tuple[Tuple[Fraction, int], int]] = None
        for r, row in enumerate(self.rows):
            a = row.get(j)
            if a is not None and a > 0:
                key = (self.rhs[r] / a, self.basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        return None if best is None else best[1]

    def run(self) -> Literal["optimal", "unbounded"]:
        while True:
            j = self.entering()
            if j is None:
                return "optimal"
            r = self.leaving(j)
            if r is None:
                return "unbounded"
            if self.rhs[r]:
                self.degenerate_run = 0
            else:
                self.degenerate_run += 1
            self.pivot(r, j)

    def drop_row(self, r: int) -> None:
        del self.rows[r]
        del self.rhs[r]
        del self.basis[r]

    def truncate_columns(self, width: int) -> None:
        for row in self.rows:
            for c in [c for c in row if c >= width]:
                del row[c]
        self.reduced = {c: z for c, z in self.reduced.items() if c < width}

    def basic_values(self, width: int) -> List[Fraction]:
        values = [ZERO] * width
        for r, b in enumerate(self.basis):
            if b < width:
                values[b] = self.rhs[r]
        return values


# ============================================================================
# Standard Form
# ============================================================================


@dataclass
class _StandardForm:
    tableau: SimplexTableau
    columns: List[Tuple[int, Fraction]]  # column -> (original variable, sign)
    width: int  # structural + slack columns
    costs: SparseRow
    artificials: int


def _standard_form(lp: LinearProgram) -> _StandardForm:
    """
    Equality form with a starting basis.

    An inequality ``row·x >= rhs`` with ``rhs <= 0`` becomes
    ``-row·x + s = -rhs`` with its slack basic; every other row gets an
    artificial column.
    """
    columns: List[Tuple[int, Fraction]] = []
    column_of: Dict[int, List[Tuple[int, Fraction]]] = {}
    for i in range(lp.num_vars):
        column_of[i] = [(len(columns), ONE)]
        columns.append((i, ONE))
        if lp.is_free(i):
            column_of[i].append((len(columns), -ONE))
            columns.append((i, -ONE))

    constraint_rows: List[Tuple[SparseRow, Fraction, bool]] = []
    for k, (row, rhs) in enumerate(lp.equalities):
        constraint_rows.append((_as_sparse(row, lp.num_vars, f"equality {k}"), rhs, False))
    for k, (row, rhs) in enumerate(lp.inequalities):
        constraint_rows.append((_as_sparse(row, lp.num_vars, f"inequality {k}"), rhs, True))

    structural = len(columns)
    width = structural + sum(1 for _, _, slack in constraint_rows if slack)

    rows: List[SparseRow] = []
    rhs_values: List[Fraction] = []
    basis: List[int] = []
    slack_col = structural
    artificial = width
    for sparse, rhs, slack in constraint_rows:
        row: SparseRow = {}
        for i, c in sparse.items():
            for col, sign in column_of[i]:
                row[col] = sign * c
        if slack:
            row[slack_col] = -ONE
        if rhs < 0 or (slack and rhs == 0):
            row = {c: -v for c, v in row.items()}
            rhs = -rhs
        if slack and row[slack_col] == ONE:
            basis.append(slack_col)
        else:
            row[artificial] = ONE
            basis.append(artificial)
            artificial += 1
        if slack:
            slack_col += 1
        rows.append(row)
        rhs_values.append(Fraction(rhs))

    costs: SparseRow = {}
    for i, c in lp.sparse_objective().items():
        for col, sign in column_of[i]:
            costs[col] = sign * c
    return _StandardForm(
        SimplexTableau(rows, rhs_values, basis), columns, width, costs, artificial - width
    )


def _phase_one(form: _StandardForm) -> bool:
    """Drive the artificial columns to zero; return False when infeasible."""
    tableau = form.tableau
    width = form.width
    if form.artificials:
        tableau.set_objective({width + a: -ONE for a in range(form.artificials)})
        tableau.run()
        if tableau.value < 0:
            return False

    r = 0
    while r < len(tableau.rows):
        if tableau.basis[r] >= width:
            row = tableau.rows[r]
            j = min((c for c in row if c < width), default=None)
            if j is None:
                tableau.drop_row(r)
                continue
            tableau.pivot(r, j)
        r += 1
    tableau.truncate_columns(width)
    return True


def _recover(form: _StandardForm, lp: LinearProgram) -> List[Fraction]:
    values = form.tableau.basic_values(form.width)
    x = [ZERO] * lp.num_vars
    for col, (i, sign) in enumerate(form.columns):
        if values[col]:
            x[i] += sign * values[col]
    return x


def _certify(lp: LinearProgram, x: List[Fraction], value: Optional[Fraction]) -> None:
    problems = lp.violations(x)
    if problems:
        raise SolverError("Simplex returned an infeasible point: " + "; ".join(problems[:5]))
    if value is not None and lp.evaluate(x) != value:
        raise SolverError(f"Objective certificate failed: {lp.evaluate(x)} != {value}")


def _maybe_dump(lp: LinearProgram) -> None:
    from ..core.config import config

    directory = config.solver.lp_dump_dir
    if directory:
        from .dump import dump_lp

        path = dump_lp(lp, directory)
        logger.debug("LP written to %s", path)


# ============================================================================
# Public Operations
# ============================================================================


def solve(lp: LinearProgram) -> LPResult:
    """
    Solve ``lp`` exactly.

    Returns:
        ``optimal`` with a basic feasible solution and its value,
        ``infeasible`` or ``unbounded``

    Raises:
        ShapeMismatchError: If a row does not match ``num_vars``
        SolverError: If the optimal point fails its exact certificate
    """
    _maybe_dump(lp)
    logger.debug(
        "solve: %d variables, %d equalities, %d inequalities",
        lp.num_vars,
        len(lp.equalities),
        len(lp.inequalities),
    )
    form = _standard_form(lp)
    if not _phase_one(form):
        logger.info("LP infeasible after %d pivots", form.tableau.iterations)
        return LPResult(status="infeasible", iterations=form.tableau.iterations)

    tableau = form.tableau
    tableau.set_objective(form.costs)
    status = tableau.run()
    if status == "unbounded":
        logger.info("LP unbounded after %d pivots", tableau.iterations)
        return LPResult(status="unbounded", iterations=tableau.iterations)

    x = _recover(form, lp)
    _certify(lp, x, tableau.value)
    logger.info("LP optimal: value %s after %d pivots", tableau.value, tableau.iterations)
    return LPResult(
        status="optimal", solution=x, value=tableau.value, iterations=tableau.iterations
    )


def feasible_point(constraints: LinearProgram) -> LPResult:
    """
    Phase one only: a feasible vertex of the constraint set, or infeasibility.

    The objective of ``constraints`` is ignored; a feasible answer has value 0.
    """
    _maybe_dump(constraints)
    form = _standard_form(constraints)
    if not _phase_one(form):
        return LPResult(status="infeasible", iterations=form.tableau.iterations)
    x = _recover(form, constraints)
    _certify(constraints, x, None)
    return LPResult(
        status="optimal", solution=x, value=ZERO, iterations=form.tableau.iterations
    )


__all__ = [
    "LinearProgram",
    "LPResult",
    "SimplexTableau",
    "solve",
    "feasible_point",
]
