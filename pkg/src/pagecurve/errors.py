"""Exception and warning types shared across the package."""

from __future__ import annotations


class ParameterError(ValueError):
    """Invalid physical or numerical parameter."""


class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


class UnsupportedDefectError(ValueError):
    """Operation only exists for a particular defect kind."""


class NumericError(ArithmeticError):
    """A numerical kernel failed (eigensolver, non-finite output, ...)."""


class AlignmentError(ValueError):
    """Two tables do not share the grid an operation requires."""


class QuadratureWarning(RuntimeWarning):
    """Adaptive quadrature hit its refinement cap before converging."""


class ValidityWindowWarning(UserWarning):
    """Finite-reservoir exact numerics queried past the far-wall return time."""


class RangeError(OverflowError):
    """Argument would overflow double precision."""


class ConfigError(ParameterError):
    """Malformed scenario configuration; carries the offending line and key."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


class ResourceError(ParameterError):
    """Requested matrix exceeds the configured size cap."""
