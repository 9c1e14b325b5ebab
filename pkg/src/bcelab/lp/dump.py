"""
Plain-text dump of linear programs.

One constraint per line, rationals written as ``num/den``::

    max: 1/1 x0 + -1/2 x1
    eq0: 1/1 x0 + 1/1 x1 = 1/1
    ge0: 1/1 x0 >= 0/1
    free: x1
"""

import itertools
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Sequence, Union

from ..core.types import format_rational

if TYPE_CHECKING:
    from .simplex import LinearProgram

_counter = itertools.count(1)


def _terms(lp: "LinearProgram", row: Union[Sequence, Mapping]) -> str:
    items = row.items() if isinstance(row, Mapping) else enumerate(row)
    parts = [f"{format_rational(c)} {lp.name(j)}" for j, c in sorted(items) if c]
    return " + ".join(parts) if parts else "0/1"


def format_lp(lp: "LinearProgram") -> str:
    """Render ``lp`` as text."""
    lines = [f"vars: {lp.num_vars}"]
    if lp.objective is not None:
        lines.append(f"max: {_terms(lp, lp.objective)}")
    for k, (row, rhs) in enumerate(lp.equalities):
        lines.append(f"eq{k}: {_terms(lp, row)} = {format_rational(rhs)}")
    for k, (row, rhs) in enumerate(lp.inequalities):
        lines.append(f"ge{k}: {_terms(lp, row)} >= {format_rational(rhs)}")
    free = [lp.name(j) for j in range(lp.num_vars) if lp.is_free(j)]
    if free:
        lines.append("free: " + " ".join(free))
    return "\n".join(lines) + "\n"


def dump_lp(lp: "LinearProgram", directory: Union[str, Path]) -> Path:
    """Write ``lp`` to ``directory/lp-NNNN.txt`` and return the path."""
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    path = target / f"lp-{next(_counter):04d}.txt"
    path.write_text(format_lp(lp), encoding="utf-8")
    return path


__all__ = ["format_lp", "dump_lp"]
