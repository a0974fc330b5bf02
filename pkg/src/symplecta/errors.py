"""Exception hierarchy. The CLI maps each class to an exit code."""

from __future__ import annotations


class SymplectaError(Exception):
    """Base class for library errors."""


class ParseError(SymplectaError, ValueError):
    """Malformed input document (CLI exit code 2)."""


class InvariantError(SymplectaError, ValueError):
    """A precondition or structural invariant failed (CLI exit code 3)."""


class BackendMismatch(InvariantError, TypeError):
    """Arithmetic between matrices of different scalar backends."""


class ConvergenceError(SymplectaError, ArithmeticError):
    """A numerical factorization missed its residual target (CLI exit code 4)."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
