"""
Two-player payoff polytopes.

The BCE payoff set is the projection of the obedience polytope onto payoff
space. Its vertices are found from exact support-function solves: start from
integer directions on the boundary of a square, then keep solving along the outward
normal of every hull edge until no solve finds a point beyond its edge.
"""

import math
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import ShapeMismatchError
from ..core.logger import get_logger
from ..core.types import Rational, format_rational
from ..games.base import BaseGame, enumerate_terminal_histories, payoff_vector
from .obedience import SolverOptions, assemble_obedience_lp
from .solver import DirectionResult, optimize_over

logger = get_logger(__name__)

Point = Tuple[Fraction, Fraction]
Direction = Tuple[int, int]


class PayoffPolytope(BaseModel):
    """Vertices of a 2-player payoff set, counter-clockwise."""

    vertices: List[Tuple[Rational, Rational]] = Field(default_factory=list)
    directions: int = Field(default=0, description="Support-function solves performed")

    model_config = ConfigDict(arbitrary_types_allowed=True)

    def csv_lines(self) -> List[str]:
        return [f"{format_rational(x)},{format_rational(y)}" for x, y in self.vertices]


# ============================================================================
# Exact Hull
# ============================================================================


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence[Fraction]]) -> List[Point]:
    """
    Exact monotone-chain hull without collinear points.

    Vertices are counter-clockwise from the lexicographically smallest one.
    """
    pts = sorted({(Fraction(p[0]), Fraction(p[1])) for p in points})
    if len(pts) <= 2:
        return pts
    lower: List[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _primitive(dx: Fraction, dy: Fraction) -> Direction:
    scale = math.lcm(dx.denominator, dy.denominator)
    x, y = int(dx * scale), int(dy * scale)
    g = math.gcd(x, y) or 1
    return x // g, y // g


def initial_directions(count: int) -> List[Direction]:
    """Integer points on the boundary of ``[-n, n]^2`` with ``n = ceil(count / 8)``."""
    n = max(1, math.ceil(count / 8))
    ring: List[Direction] = []
    ring += [(n, y) for y in range(-n, n)]
    ring += [(x, n) for x in range(n, -n, -1)]
    ring += [(-n, y) for y in range(n, -n, -1)]
    ring += [(x, -n) for x in range(-n, n)]
    seen: Dict[Direction, None] = {}
    for d in ring:
        seen.setdefault(_primitive(Fraction(d[0]), Fraction(d[1])), None)
    return list(seen)


# ============================================================================
# Polytopes
# ============================================================================


def payoff_polytope_2p(
    game: BaseGame,
    num_directions: Optional[int] = None,
    options: Optional[SolverOptions] = None,
) -> PayoffPolytope:
    """
    Exact vertices of the BCE payoff set of a two-player game.

    Raises:
        ShapeMismatchError: If the game does not have exactly two players
        CapExceededError: If enumeration exceeds a cap
    """
    if game.num_players != 2:
        raise ShapeMismatchError(f"Payoff polytopes need 2 players, got {game.num_players}")
    if num_directions is None:
        from ..core.config import config

        num_directions = config.solver.directions
    problem = assemble_obedience_lp(game, options)
    tried: Dict[Direction, DirectionResult] = {}

    def support(d: Direction) -> DirectionResult:
        if d not in tried:
            tried[d] = optimize_over(problem, d)
        return tried[d]

    points = [support(d).payoffs for d in initial_directions(num_directions)]
    hull = convex_hull(points)
    while len(hull) >= 2:
        found = False
        for k, p in enumerate(hull):
            q = hull[(k + 1) % len(hull)]
            d = _primitive(q[1] - p[1], p[0] - q[0])
            if d in tried:
                continue
            result = support(d)
            if result.value > d[0] * p[0] + d[1] * p[1]:
                points.append(result.payoffs)
                found = True
        if not found:
            break
        hull = convex_hull(points)

    logger.info("BCE payoff polytope: %d vertices after %d directions", len(hull), len(tried))
    return PayoffPolytope(vertices=hull, directions=len(tried))


def feasible_payoff_hull(game: BaseGame) -> PayoffPolytope:
    """Convex hull of the payoff vectors of every terminal history."""
    if game.num_players != 2:
        raise ShapeMismatchError(f"Payoff polytopes need 2 players, got {game.num_players}")
    points = [payoff_vector(game, z) for z in enumerate_terminal_histories(game)]
    return PayoffPolytope(vertices=convex_hull(points), directions=0)


# ============================================================================
# Output
# ============================================================================


def write_vertices_csv(polytope: PayoffPolytope, path: Path) -> None:
    """One ``x,y`` rational pair per line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(line + "\n" for line in polytope.csv_lines()), encoding="utf-8")


def render_svg(
    bce: PayoffPolytope,
    path: Path,
    feasible: Optional[PayoffPolytope] = None,
    title: Optional[str] = None,
) -> None:
    """Light-grey feasible hull under the dark-grey BCE hull."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from ..core.config import config

    settings = config.output
    fig, ax = plt.subplots(figsize=(settings.svg_width, settings.svg_height))
    for polytope, color in ((feasible, settings.feasible_color), (bce, settings.bce_color)):
        if polytope is None or not polytope.vertices:
            continue
        xs = [float(x) for x, _ in polytope.vertices]
        ys = [float(y) for _, y in polytope.vertices]
        if len(xs) >= 3:
            ax.fill(xs, ys, facecolor=color, edgecolor="black", linewidth=0.8)
        else:
            ax.plot(xs, ys, "o-", color=color)
    if settings.show_labels:
        for x, y in bce.vertices:
            ax.annotate(
                f"({format_rational(x)}, {format_rational(y)})",
                (float(x), float(y)),
                textcoords="offset points",
                xytext=(4, 4),
                fontsize=8,
            )
    ax.set_xlabel("u1")
    ax.set_ylabel("u2")
    if title:
        ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
    logger.debug("Wrote %s", path)


__all__ = [
    "PayoffPolytope",
    "convex_hull",
    "initial_directions",
    "payoff_polytope_2p",
    "feasible_payoff_hull",
    "write_vertices_csv",
    "render_svg",
]
