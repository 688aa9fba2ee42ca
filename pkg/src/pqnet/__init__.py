"""Symbolic analysis of parametric probability networks.

Models with polynomial-valued probability tables over algebraically
constrained parameters; exact symbolic inference producing fractional
polynomials; secondary analysis by algebra, exact optimization, and
exhaustive search; a C-flavored definition language and a command
shell.
"""

from .inference import full_joint, marginalize, query
from .network import Model
from .polynomial import (
    F2Polynomial,
    FractionalPolynomial,
    Polynomial,
    simplify_quotient,
)

__all__ = [
    "F2Polynomial",
    "FractionalPolynomial",
    "Model",
    "Polynomial",
    "full_joint",
    "marginalize",
    "query",
    "simplify_quotient",
]
