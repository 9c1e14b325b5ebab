"""
Behavioral recommendation kernels from mixtures over feedback rules.

Conditional on ``(h^t, w^t, â^{t-1})`` the mediator's posterior over rules is
proportional to ``μ(f)`` times the indicator that ``f`` made the
recommendations ``â^{t-1}`` along ``h^t`` (kernel and player probabilities are
common to every such rule). The stage-``t`` kernel is the posterior frequency
of each rule's stage-``t`` recommendation.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from ..core.errors import RangeViolationError
from ..core.logger import get_logger
from ..core.types import History, Profile, StatePath, format_profile, format_rational
from ..games.base import BaseGame, describe_history
from ..bce.feedback import BCEMixture
from .ranges import MediationRange

logger = get_logger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)

KernelKey = Tuple[int, History, StatePath, Tuple[Profile, ...]]


@dataclass
class RecommendationKernels:
    """
    ``μ_t(h^t, w^t, â^{t-1})`` as explicit rows.

    Rows not stored are uniform over the allowed profiles (all profiles when
    no ranges are attached).
    """

    game: BaseGame
    rows: Dict[KernelKey, Dict[Profile, Fraction]] = field(default_factory=dict)
    ranges: Optional[MediationRange] = None

    def row(
        self, t: int, history: History, states: StatePath, recommendations: Tuple[Profile, ...]
    ) -> Dict[Profile, Fraction]:
        key = (t, history, states, tuple(recommendations))
        if key in self.rows:
            return self.rows[key]
        if self.ranges is not None:
            profiles = self.ranges.allowed_profiles(t, history, recommendations)
        else:
            profiles = list(self.game.action_profiles(t))
        weight = Fraction(1, len(profiles))
        return {p: weight for p in profiles}

    def recommend(
        self, t: int, history: History, states: StatePath, recommendations: Tuple[Profile, ...]
    ) -> Mapping[Profile, Fraction]:
        return self.row(t, history, states, recommendations)

    def describe(self) -> str:
        return f"kernels({len(self.rows)} rows)"

    def lines(self) -> List[str]:
        out = []
        for (t, h, w, recs), row in self.rows.items():
            past = "".join(format_profile(r) for r in recs)
            dist = ", ".join(f"{format_profile(a)}: {format_rational(p)}" for a, p in row.items())
            out.append(f"t{t} {describe_history(h, w)} rec={past or '-'} -> {dist}")
        return out


def kernels_from_mixture(
    game: BaseGame, mixture: BCEMixture, ranges: Optional[MediationRange] = None
) -> RecommendationKernels:
    """
    Conditional-frequency kernels of ``mixture`` at every tree prefix.

    Raises:
        RangeViolationError: If a supported rule recommends outside ``ranges``
    """
    if ranges is not None:
        ranges.check_mixture(mixture)
    entries = mixture.support()
    tree = game.tree()
    acc: Dict[KernelKey, Dict[Profile, Fraction]] = {}
    for t, layer in enumerate(tree.prefixes, start=1):
        for h, w in layer:
            for entry in entries:
                if entry.initial is not None:
                    signals, state = entry.initial
                    if (tuple(signals), state) != (h[0][1], w[0]):
                        continue
                recs = entry.rule.on_path(game, h, w)  # type: ignore[attr-defined]
                key = (t, h, w, tuple(recs[:-1]))
                row = acc.setdefault(key, {})
                rec = tuple(recs[-1])
                row[rec] = row.get(rec, ZERO) + entry.weight
    rows: Dict[KernelKey, Dict[Profile, Fraction]] = {}
    for key, row in acc.items():
        total = sum(row.values(), ZERO)
        rows[key] = {a: p / total for a, p in row.items()}
    if ranges is not None:
        for (t, h, w, recs), row in rows.items():
            allowed = ranges.allowed_profiles(t, h, recs)
            outside = [a for a in row if a not in allowed]
            if outside:
                raise RangeViolationError(
                    f"kernel at stage {t} recommends {outside[0]} outside range"
                )
    logger.debug("kernels_from_mixture: %d rows from %d rules", len(rows), len(entries))
    return RecommendationKernels(game, rows, ranges)


__all__ = ["KernelKey", "RecommendationKernels", "kernels_from_mixture"]
