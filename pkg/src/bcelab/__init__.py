"""
bce-lab: exact Bayes correlated equilibria of finite multi-stage games.

Sub-packages:
    core               configuration, logging, errors, shared types
    games              base games, histories, outcome evaluation
    lp                 exact rational simplex
    expansion          information expansions, consistency and factorization
    bce                feedback rules, obedience LPs, membership, payoff polytopes
    rationalizability  single-agent rationalizability and dominance tests
    refinements        mediation ranges, kernels, CPS and refinement verifiers
    scenarios          built-in worked instances
"""

__version__ = "0.1.0"
__author__ = "bce-lab developers"
