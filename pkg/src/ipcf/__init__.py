"""A modal λ-calculus with intensional operations, and a combinatory-algebra toolkit."""

from .parser import parse, parse_type, print_term, print_type
from .syntax import alpha_eq, bfv, fv, subst, ufv

__all__ = [
    "alpha_eq",
    "bfv",
    "fv",
    "parse",
    "parse_type",
    "print_term",
    "print_type",
    "subst",
    "ufv",
]
