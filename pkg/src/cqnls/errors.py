"""Exception hierarchy and process exit codes.

Exit code convention: 0 success, 1 failed runtime assertion/certification,
2 usage or configuration problem, 3 solver failure.
"""

from __future__ import annotations


class CQNLSError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigurationError(CQNLSError):
    """Invalid parameters, units, or requested combination."""

    exit_code = 2


class DomainError(ConfigurationError):
    """Parameter outside the mathematical domain (e.g. coupling a <= -1/4)."""


class NoSolutionError(ConfigurationError):
    """The requested object provably does not exist (e.g. omega >= 3/16)."""


class ExistenceError(ConfigurationError):
    """No optimizer exists for the requested coupling sign."""


class StructuralError(ConfigurationError):
    """Mismatched grids, couplings, or incompatible objects."""


class DataError(ConfigurationError):
    """Non-finite or malformed input data."""


class UndefinedQuotientError(ConfigurationError):
    """Quotient functional evaluated at the zero field."""


class SolverError(CQNLSError):
    """Iteration failed to bracket or converge; carries diagnostics."""

    exit_code = 3

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InstabilityError(SolverError):
    """Time integration produced a non-finite state; carries a partial trace."""

    def __init__(self, message: str, partial_trace=None, diagnostics: dict | None = None):
        super().__init__(message, diagnostics)
        self.partial_trace = partial_trace


class CertificationError(CQNLSError):
    """A computed object violates one of its certified invariants."""

    exit_code = 1

    def __init__(self, message: str, residuals: dict | None = None):
        super().__init__(message)
        self.residuals = residuals or {}


class CoverageError(SolverError):
    """Branch data does not span the required mass interval."""
