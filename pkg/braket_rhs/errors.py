"""Custom exceptions for braket-rhs."""
from __future__ import annotations


class BraketError(Exception):
    """Base exception for all braket-rhs errors."""


class ModelError(BraketError):
    """Dimension, arity or model mismatch, or an invalid model configuration."""


class ContractError(BraketError):
    """An operation was handed a value that violates its contract."""

    def __init__(self, message: str, asymmetry: float | None = None):
        super().__init__(message)
        self.asymmetry = asymmetry


class PreconditionError(BraketError):
    """A checked mathematical precondition does not hold."""

    def __init__(self, message: str, norm: float):
        super().__init__(message)
        self.norm = norm


class NumericError(BraketError):
    """The eigensolver failed to converge."""


class ConfigError(BraketError):
    """Model file or config could not be loaded."""


class DslError(BraketError):
    """Error in a Dirac-notation expression, located by a source span."""

    def __init__(self, message: str, span: tuple[int, int]):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        return f"{self.message} at {self.span[0]}:{self.span[1]}"


class LexError(DslError):
    """Malformed token in an expression."""


class ParseError(DslError):
    """Token sequence does not form a valid expression."""


class EvalError(DslError):
    """Expression is well formed but cannot be evaluated against the bindings."""
