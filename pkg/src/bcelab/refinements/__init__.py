"""
Refinements: mediation ranges, behavioral kernels, conditional probability
systems and verification of weak perfect and sequential candidates.
"""

from .cps import (
    CPS,
    N,
    CPSViolation,
    LexicographicCPS,
    PerturbedCPS,
    TableCPS,
    cps_check,
    cps_from_distribution,
    pessimistic_cps,
)
from .io import RefinementBundle, bundle_from_dict, load_bundle, verify_bundle
from .kernels import RecommendationKernels, kernels_from_mixture
from .ranges import MediationRange
from .verify import BeliefSystem, RefinementIssue, RefinementReport, verify_sbce, verify_wpbce

__all__ = [
    "CPS",
    "N",
    "CPSViolation",
    "LexicographicCPS",
    "PerturbedCPS",
    "TableCPS",
    "cps_check",
    "cps_from_distribution",
    "pessimistic_cps",
    "RefinementBundle",
    "bundle_from_dict",
    "load_bundle",
    "verify_bundle",
    "RecommendationKernels",
    "kernels_from_mixture",
    "MediationRange",
    "BeliefSystem",
    "RefinementIssue",
    "RefinementReport",
    "verify_sbce",
    "verify_wpbce",
]
