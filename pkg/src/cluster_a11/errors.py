"""Exception hierarchy for the cluster-a11 package."""

from __future__ import annotations


class ClusterA11Error(Exception):
    """Base class for all package-specific errors."""


class ExactDivisionError(ClusterA11Error):
    """No exact quotient exists in the Laurent polynomial ring."""


class DivisionByZeroError(ClusterA11Error, ZeroDivisionError):
    """Division by the zero polynomial."""


class EvalAtZeroError(ClusterA11Error):
    """Evaluation point lies on a coordinate axis, where Laurent polynomials may have poles."""


class ExponentOverflowError(ClusterA11Error):
    """An exponent left the signed 64-bit range."""


class ZeroPolynomialError(ClusterA11Error):
    """A degree query was made on the zero polynomial."""


class ParseError(ClusterA11Error):
    """Malformed serialized polynomial.

    ``position`` is the character offset of the problem in the input text
    when known, else ``None``.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DomainError(ClusterA11Error):
    """Index outside the domain on which an element family is defined."""


class ScaleError(ClusterA11Error):
    """Input rejected as a resource hazard before any computation starts."""


class InternalError(ClusterA11Error):
    """An invariant that the theory guarantees was violated; indicates a defect."""
