"""Truncated simplicial sets, lifting searches and the finite universe of coverings."""

from .homotopy import ScopeError, is_weak_equivalence_1type, pi0, pi1
from .lifting import FibrationReport, has_lifting, is_kan_complex, is_kan_fibration
from .simplex import TruncatedSSet, boundary, horn, point, sset_map, standard_simplex
from .universe import classify, nerve, nerve_universe, univalence_check

__all__ = [
    "FibrationReport",
    "ScopeError",
    "TruncatedSSet",
    "boundary",
    "classify",
    "has_lifting",
    "horn",
    "is_kan_complex",
    "is_kan_fibration",
    "is_weak_equivalence_1type",
    "nerve",
    "nerve_universe",
    "pi0",
    "pi1",
    "point",
    "sset_map",
    "standard_simplex",
    "univalence_check",
]
