"""Finite restriction semigroups, their germ categories and convolution algebras."""

from .core import UnarySemigroup, check_axioms, classify
from .errors import GermworkError

__all__ = ["GermworkError", "UnarySemigroup", "check_axioms", "classify"]
__version__ = "0.1.0"
