"""
Exception hierarchy for the graph-kernel toolkit.

Library code raises these; only the CLI turns them into exit codes.
"""

from typing import Optional


class QgkError(Exception):
    """Base class for all toolkit errors."""
    exit_code = 2


class ConfigurationError(QgkError):
    """Invalid run or kernel configuration (bad flag combination, folds > n, ...)."""
    exit_code = 1


class IngestionError(QgkError):
    """A dataset file is missing or unreadable."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class ParseError(IngestionError):
    """A dataset file has malformed or inconsistent content."""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, path)


class GraphValidationError(QgkError):
    """A Graph violates its invariants (self-loop, endpoint out of range)."""


class ContractViolation(ValueError):
    """A caller broke a function precondition (e.g. non-symmetric matrix)."""


class NumericalError(QgkError):
    """A numerical post-condition failed."""
    exit_code = 3

    def __init__(self, message: str, residual: Optional[float] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual={residual:.3e})"
        super().__init__(message)


class KernelError(NumericalError):
    """Gram assembly failed, e.g. a zero self-kernel under normalisation."""
