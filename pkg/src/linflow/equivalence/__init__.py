"""Equivalence deciders, cross ratios and canonical representatives."""

from .canon import (
    CanonicalForm,
    canon2,
    canon_complex,
    classify_complex,
    complex_eigenvalues_2,
    decide,
    decide_lipschitz,
)
from .deciders import (
    alpha_candidates,
    central_frequencies,
    cross_ratio,
    decide_beta,
    decide_holder,
    decide_smooth,
    decide_topological,
)
from .verdict import CrossRatio, EquivalenceVerdict, Level, implied_levels

__all__ = [
    "CanonicalForm",
    "canon2",
    "canon_complex",
    "classify_complex",
    "complex_eigenvalues_2",
    "decide",
    "decide_lipschitz",
    "CrossRatio",
    "EquivalenceVerdict",
    "Level",
    "alpha_candidates",
    "central_frequencies",
    "cross_ratio",
    "decide_beta",
    "decide_holder",
    "decide_smooth",
    "decide_topological",
    "implied_levels",
]
