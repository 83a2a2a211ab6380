"""Exact Fourier-Motzkin elimination over rational rows with symbolic atoms."""

from .derive import (MatchReport, atom_values, chain_rewrite, compare, derive_thm1, expected_system,
                     lemma_system, numeric_projection, rewrite_system)
from .eliminate import (Assumptions, eliminate, eliminate_all, feasible, is_implied, polygon,
                        project, prune)
from .system import Inequality, LinearInequalitySystem, instantiate, parse_constant, row

__all__ = [
    "Assumptions", "Inequality", "LinearInequalitySystem", "MatchReport", "atom_values", "chain_rewrite", "compare",
    "derive_thm1", "eliminate", "eliminate_all", "expected_system", "feasible", "instantiate",
    "is_implied", "lemma_system", "numeric_projection", "parse_constant", "polygon", "project", "prune", "rewrite_system",
    "row",
]
