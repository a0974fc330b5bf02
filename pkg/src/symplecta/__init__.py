"""Computational symplectic linear algebra: orbit types, Darboux bases, reductions and retractions."""

from .errors import BackendMismatch, ConvergenceError, InvariantError, ParseError, SymplectaError
from .numeric import Gaussian, Matrix, TolerancePolicy

__all__ = [
    "BackendMismatch",
    "ConvergenceError",
    "Gaussian",
    "InvariantError",
    "Matrix",
    "ParseError",
    "SymplectaError",
    "TolerancePolicy",
]
