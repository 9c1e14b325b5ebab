"""
Sure and true dominance by deviation plans.

A deviation plan ``D(b | â)`` is the distribution of the chosen profile ``b``
given the recommended profile ``â``, induced by a behavioral strategy
``τ_t(b_t | â_1..â_t, b_1..b_{t-1})``. Both LPs carry ``D`` as a realization
plan ``y(â^k, b^k)`` with ``y(∅, ∅) = 1`` and
``Σ_{b_k} y(â^k, b^k) = y(â^{k-1}, b^{k-1})``.

Sure dominance lets the continuation recommendations after a first
departure be chosen adversarially and adaptively: value variables
``z_ω(â^k, b^k)`` are bounded by the plan's value after every next
recommendation. The strict row for the target becomes ``>= ε`` and ``ε`` is
maximized; the target is dominated iff the exact optimum is positive.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import SolverError
from ..core.logger import get_logger
from ..core.types import Label, Rational, format_rational
from ..lp.simplex import LinearProgram, solve
from .problem import ActionPath, DecisionProblem

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

Node = Tuple[ActionPath, ActionPath]
Strategy = Callable[[int, ActionPath, ActionPath], Mapping[Label, Fraction]]


def _fmt(path: Sequence[Label]) -> str:
    return ",".join(map(str, path)) or "-"


@dataclass
class DeviationPlan:
    """``table[â][b] = D(b | â)`` over complete profiles."""

    problem: DecisionProblem
    table: Dict[ActionPath, Dict[ActionPath, Fraction]] = field(default_factory=dict)

    def row(self, recommended: Sequence[Label]) -> Dict[ActionPath, Fraction]:
        return self.table.get(tuple(recommended), {})

    def rows_sum_to_one(self) -> bool:
        return all(
            sum(self.row(a).values(), ZERO) == 1 and all(p >= 0 for p in self.row(a).values())
            for a in self.problem.profiles()
        )

    def _prefix_marginal(self, recommended: ActionPath, k: int) -> Dict[ActionPath, Fraction]:
        out: Dict[ActionPath, Fraction] = {}
        for b, p in self.row(recommended).items():
            out[b[:k]] = out.get(b[:k], ZERO) + p
        return out

    def measurability_issues(self) -> List[str]:
        """
        Profiles where the stage-``t`` choice depends on recommendations
        after ``t``: the marginal of ``b_1..b_t`` must be a function of
        ``â_1..â_t``.
        """
        issues = []
        profiles = self.problem.profiles()
        for k in range(1, self.problem.periods):
            seen: Dict[ActionPath, Tuple[ActionPath, Dict[ActionPath, Fraction]]] = {}
            for a in profiles:
                marginal = {b: p for b, p in self._prefix_marginal(a, k).items() if p}
                if a[:k] in seen and seen[a[:k]][1] != marginal:
                    issues.append(
                        f"choices through period {k} differ between recommendations "
                        f"{_fmt(seen[a[:k]][0])} and {_fmt(a)}"
                    )
                seen.setdefault(a[:k], (a, marginal))
        return issues

    @property
    def measurable(self) -> bool:
        return not self.measurability_issues()

    def strategy(self) -> Dict[Tuple[int, ActionPath, ActionPath], Dict[Label, Fraction]]:
        """``τ_t(· | â^t, b^{t-1})`` wherever the conditioning prefix has positive mass."""
        tau: Dict[Tuple[int, ActionPath, ActionPath], Dict[Label, Fraction]] = {}
        for a in self.problem.profiles():
            for k in range(1, self.problem.periods + 1):
                before = self._prefix_marginal(a, k - 1)
                now = self._prefix_marginal(a, k)
                for b, p in now.items():
                    mass = before.get(b[:-1], ZERO)
                    if mass and p:
                        tau.setdefault((k, a[:k], b[:-1]), {})[b[-1]] = p / mass
        return tau

    def is_identity(self) -> bool:
        return all(
            {b: p for b, p in self.row(a).items() if p} == {a: ONE} for a in self.problem.profiles()
        )

    def lines(self) -> List[str]:
        out = []
        for a in self.problem.profiles():
            for b, p in self.row(a).items():
                if p:
                    out.append(f"D({_fmt(b)} | {_fmt(a)}) = {format_rational(p)}")
        return out


def plan_from_strategy(
    problem: DecisionProblem,
    tau: Union[Strategy, Mapping[Tuple[int, ActionPath, ActionPath], Mapping[Label, Fraction]]],
) -> DeviationPlan:
    """
    ``D(b | â) = Π_t τ_t(b_t | â^t, b^{t-1})``. A mapping ``tau`` is read as
    ``{(t, â^t, b^{t-1}): {b_t: p}}`` with missing entries obedient.
    """
    if isinstance(tau, Mapping):
        table = tau

        def strategy(t: int, recs: ActionPath, past: ActionPath) -> Mapping[Label, Fraction]:
            return table.get((t, recs, past), {recs[-1]: ONE})

    else:
        strategy = tau

    plan = DeviationPlan(problem)
    for a in problem.profiles():
        row: Dict[ActionPath, Fraction] = {(): ONE}
        for t in range(1, problem.periods + 1):
            extended: Dict[ActionPath, Fraction] = {}
            for b, p in row.items():
                for choice, q in strategy(t, a[:t], b).items():
                    if q:
                        key = b + (choice,)
                        extended[key] = extended.get(key, ZERO) + p * Fraction(q)
            row = extended
        plan.table[a] = row
    return plan


# ============================================================================
# LPs
# ============================================================================


def _realization_plan(lp: LinearProgram, problem: DecisionProblem) -> Dict[Node, int]:
    y: Dict[Node, int] = {((), ()): lp.add_variable("y[-|-]")}
    lp.add_equality({y[((), ())]: ONE}, ONE)
    layer: List[Node] = [((), ())]
    for labels in problem.actions:
        following: List[Node] = []
        for recs, acts in layer:
            for r in labels:
                row = {y[(recs, acts)]: -ONE}
                for b in labels:
                    node = (recs + (r,), acts + (b,))
                    y[node] = lp.add_variable(f"y[{_fmt(node[0])}|{_fmt(node[1])}]")
                    row[y[node]] = ONE
                    following.append(node)
                lp.add_equality(row, ZERO)
        layer = following
    return y


def _plan_from_solution(
    problem: DecisionProblem, y: Dict[Node, int], x: Sequence[Fraction]
) -> DeviationPlan:
    plan = DeviationPlan(problem)
    T = problem.periods
    for (recs, acts), col in y.items():
        if len(recs) == T and x[col]:
            plan.table.setdefault(recs, {})[acts] = x[col]
    return plan


class DominanceResult(BaseModel):
    """Exact answer of a dominance LP."""

    kind: Literal["sure", "true"] = Field(..., description="Which dominance notion")
    dominated: bool = Field(..., description="Whether some plan dominates the target")
    slack: Rational = Field(..., description="Optimal ε; dominated iff positive")
    plan: Optional[DeviationPlan] = Field(default=None, description="Dominating plan")

    model_config = ConfigDict(arbitrary_types_allowed=True)


def _add(form: Dict[int, Fraction], col: int, c: Fraction) -> None:
    if c:
        form[col] = form.get(col, ZERO) + c


def _sure_lp(
    problem: DecisionProblem, target: ActionPath
) -> Tuple[LinearProgram, Dict[Node, int], int]:
    lp = LinearProgram()
    y = _realization_plan(lp, problem)
    eps = lp.add_variable("eps")
    T = problem.periods

    for w in problem.states:
        z: Dict[Node, int] = {}

        def value(node: Node) -> Dict[int, Fraction]:
            if len(node[0]) == T:
                u = problem.u(node[1], w)
                return {y[node]: u} if u else {}
            return {z[node]: ONE}

        for k in range(T - 1, 0, -1):
            for node in [n for n in y if len(n[0]) == k]:
                z[node] = lp.add_variable(f"z[{w}][{_fmt(node[0])}|{_fmt(node[1])}]", free=True)
            for node in [n for n in y if len(n[0]) == k]:
                recs, acts = node
                for r in problem.actions[k]:
                    row: Dict[int, Fraction] = {z[node]: -ONE}
                    for b in problem.actions[k]:
                        for col, c in value((recs + (r,), acts + (b,))).items():
                            _add(row, col, c)
                    lp.add_inequality(row, ZERO)

        for a in problem.profiles():
            row = {}
            for t in range(1, T + 1):
                for b in problem.actions[t - 1]:
                    if b == a[t - 1]:
                        continue
                    for col, c in value((a[:t], a[: t - 1] + (b,))).items():
                        _add(row, col, c)
            _add(row, y[(a, a)], problem.u(a, w))
            if a == target:
                _add(row, eps, -ONE)
            lp.add_inequality(row, problem.u(a, w))
    lp.objective = {eps: ONE}
    return lp, y, eps


def _true_lp(
    problem: DecisionProblem, target: ActionPath
) -> Tuple[LinearProgram, Dict[Node, int], int]:
    lp = LinearProgram()
    y = _realization_plan(lp, problem)
    eps = lp.add_variable("eps")
    for w in problem.states:
        for a in problem.profiles():
            row: Dict[int, Fraction] = {}
            for b in problem.profiles():
                _add(row, y[(a, b)], problem.u(b, w))
            if a == target:
                _add(row, eps, -ONE)
            lp.add_inequality(row, problem.u(a, w))
    lp.objective = {eps: ONE}
    return lp, y, eps


def _dominance(problem: DecisionProblem, target: Sequence[Label], kind: str) -> DominanceResult:
    goal = problem.check_target(target)
    build = _sure_lp if kind == "sure" else _true_lp
    lp, y, eps = build(problem, goal)
    logger.debug(
        "%s dominance LP for %s: %d variables, %d rows",
        kind,
        problem.name,
        lp.num_vars,
        lp.num_constraints,
    )
    result = solve(lp)
    if not result.optimal or result.solution is None or result.value is None:
        raise SolverError(f"{kind} dominance LP is {result.status}")
    plan = _plan_from_solution(problem, y, result.solution)
    dominated = result.value > 0
    logger.info(
        "%s dominance of %s: %s (ε = %s)",
        kind,
        _fmt(goal),
        "dominated" if dominated else "not dominated",
        format_rational(result.value),
    )
    return DominanceResult(
        dominated=dominated, slack=result.value, kind=kind, plan=plan if dominated else None
    )


def is_surely_dominated(problem: DecisionProblem, target: Sequence[Label]) -> DominanceResult:
    """Whether some deviation plan beats ``target`` whatever the state and continuation."""
    return _dominance(problem, target, "sure")


def is_truly_dominated(problem: DecisionProblem, target: Sequence[Label]) -> DominanceResult:
    """Dominance with recommendations fixed in advance (action-independent information)."""
    return _dominance(problem, target, "true")


def dominance_slack(
    problem: DecisionProblem, plan: DeviationPlan, target: Sequence[Label]
) -> Fraction:
    """Smallest slack of the true-dominance rows under ``plan``; positive iff it dominates."""
    goal = problem.check_target(target)
    slack: Optional[Fraction] = None
    for w in problem.states:
        for a in problem.profiles():
            moved = sum((problem.u(b, w) * p for b, p in plan.row(a).items()), ZERO)
            gain = moved - problem.u(a, w)
            if a != goal and gain < 0:
                return gain
            if a == goal:
                slack = gain if slack is None else min(slack, gain)
    assert slack is not None
    return slack


__all__ = [
    "Node",
    "Strategy",
    "DeviationPlan",
    "DominanceResult",
    "plan_from_strategy",
    "is_surely_dominated",
    "is_truly_dominated",
    "dominance_slack",
]
