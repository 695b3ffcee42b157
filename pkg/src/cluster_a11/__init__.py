"""Exact symbolic engine for the rank-2 affine cluster algebra.

The algebra is the subring of Q(x1, x2) generated by the cluster variables
x_m, m in Z, subject to x_{m-1} x_{m+1} = x_m^2 + 1.  Everything here is
computed exactly over arbitrary-precision integers: the Laurent expansions of
the x_m, the semicanonical generators s_n, the Fibonacci polynomial family and
its Laurent specialization, the binomial closed forms, and an executable suite
of the identities relating them all.
"""

from .engine import (
    ClusterEngine,
    CheckResult,
    ElementId,
    FaultSpec,
    VerifyReport,
    binomial,
)
from .errors import (
    ClusterA11Error,
    DivisionByZeroError,
    DomainError,
    EvalAtZeroError,
    ExactDivisionError,
    ExponentOverflowError,
    InternalError,
    ParseError,
    ScaleError,
    ZeroPolynomialError,
)
from .fibpoly import (
    FibPoly,
    fib_enumerate,
    fib_number,
    fib_recurrence,
    laurent_family,
    parity_rep,
    substitute_direct,
)
from .laurent import ONE, X1, X2, ZERO, LaurentPoly, make, monomial

__version__ = "0.1.0"

__all__ = [
    "ClusterEngine",
    "CheckResult",
    "ElementId",
    "FaultSpec",
    "VerifyReport",
    "binomial",
    "ClusterA11Error",
    "DivisionByZeroError",
    "DomainError",
    "EvalAtZeroError",
    "ExactDivisionError",
    "ExponentOverflowError",
    "InternalError",
    "ParseError",
    "ScaleError",
    "ZeroPolynomialError",
    "FibPoly",
    "fib_enumerate",
    "fib_number",
    "fib_recurrence",
    "laurent_family",
    "parity_rep",
    "substitute_direct",
    "LaurentPoly",
    "make",
    "monomial",
    "ONE",
    "X1",
    "X2",
    "ZERO",
    "__version__",
]
