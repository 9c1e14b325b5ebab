"""
Exact rational linear programming.
"""

from .dump import dump_lp, format_lp
from .simplex import LinearProgram, LPResult, SimplexTableau, feasible_point, solve

__all__ = [
    "LinearProgram",
    "LPResult",
    "SimplexTableau",
    "solve",
    "feasible_point",
    "format_lp",
    "dump_lp",
]
