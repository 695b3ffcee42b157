"""Fibonacci polynomials over totally disconnected index sets.

The generic polynomial F(w_1, ..., w_N) is the sum, over all subsets D of
{1, ..., N} containing no two consecutive integers, of the squarefree
monomials prod_{k in D} w_k.  It is computed two independent ways (brute-force
enumeration and the two-term recurrence), and specializes, after substituting
squares of the generators and clearing a monomial denominator, to the Laurent
family f_N that interleaves the two element families of the algebra.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from .errors import DomainError, ExactDivisionError, InternalError, ScaleError
from .laurent import LaurentPoly, X1, X2

SubsetMonomial = tuple[int, ...]

# The enumeration oracle walks all 2^N subsets; it exists to be dumb and
# independent, so it is capped rather than optimized.
ENUMERATE_CAP = 25


def parity_rep(k: int) -> int:
    """The element of {1, 2} congruent to k modulo 2."""
    return 2 - (k % 2)


def fib_number(k: int) -> int:
    """Fibonacci number with Fib(1) = Fib(2) = 1."""
    a, b = 1, 0
    for _ in range(k):
        a, b = b, a + b
    return b


def is_totally_disconnected(indices: SubsetMonomial) -> bool:
    return all(b - a >= 2 for a, b in zip(indices, indices[1:]))


@dataclass(frozen=True)
class FibPoly:
    """The generic Fibonacci polynomial on N variables.

    ``monomials`` holds each totally disconnected subset once, as a strictly
    increasing index tuple, sorted by size then lexicographically (the
    serialization order).  All coefficients are implicitly 1.
    """

    n_vars: int
    monomials: tuple[SubsetMonomial, ...]

    def __post_init__(self):
        for m in self.monomials:
            if m and (m[0] < 1 or m[-1] > self.n_vars):
                raise DomainError(f"index set {m} not inside [1, {self.n_vars}]")
            if not is_totally_disconnected(m):
                raise DomainError(f"index set {m} contains consecutive integers")
        if len(set(self.monomials)) != len(self.monomials):
            raise DomainError("duplicate monomials")
        ordered = tuple(sorted(self.monomials, key=lambda m: (len(m), m)))
        object.__setattr__(self, "monomials", ordered)

    def term_count(self) -> int:
        return len(self.monomials)

    def to_json(self) -> str:
        return json.dumps([list(m) for m in self.monomials], separators=(",", ":"))


def _canonical(monomials: list[SubsetMonomial], n_vars: int) -> FibPoly:
    return FibPoly(n_vars, tuple(monomials))


def fib_enumerate(n_vars: int) -> FibPoly:
    """Brute force straight from the definition: filter all 2^N subsets."""
    if n_vars < 0:
        raise DomainError("variable count must be nonnegative")
    if n_vars > ENUMERATE_CAP:
        raise ScaleError(f"enumeration oracle is capped at N <= {ENUMERATE_CAP}")
    found: list[SubsetMonomial] = []
    for mask in range(1 << n_vars):
        if mask & (mask >> 1):
            continue  # two consecutive indices present
        found.append(tuple(k + 1 for k in range(n_vars) if mask >> k & 1))
    return _canonical(found, n_vars)


def fib_recurrence(n_vars: int) -> FibPoly:
    """Same value through F_N = F_{N-1} + w_N F_{N-2}."""
    if n_vars < 0:
        raise DomainError("variable count must be nonnegative")
    prev2: list[SubsetMonomial] = [()]
    prev: list[SubsetMonomial] = [(), (1,)]
    if n_vars == 0:
        return _canonical(prev2, 0)
    if n_vars == 1:
        return _canonical(prev, 1)
    for k in range(2, n_vars + 1):
        cur = prev + [m + (k,) for m in prev2]
        prev2, prev = prev, cur
    return _canonical(prev, n_vars)


def substitute_direct(fp: FibPoly) -> LaurentPoly:
    """Monomial-shifted substitution w_k -> x_{<k+1>}^2 applied termwise.

    This is the slow reference route; distinct subsets can collide after
    substitution, which is where coefficients larger than 1 come from.
    """
    n = fp.n_vars
    shift1 = -((n + 1) // 2)
    shift2 = -(n // 2)
    triples = []
    for m in fp.monomials:
        odd = sum(1 for k in m if k % 2)  # w_k with odd k substitutes x2^2
        even = len(m) - odd
        triples.append((shift1 + 2 * even, shift2 + 2 * odd, 1))
    return LaurentPoly(triples)


def _gen(index: int) -> LaurentPoly:
    return X1 if index == 1 else X2


def laurent_family(n: int) -> LaurentPoly:
    """The Laurent polynomial f_n.

    Computed through the cleared-denominator recurrence
    ``x_<n> f_n = f_{n-1} + x_<n-1> f_{n-2}`` (one exact single-variable
    division per step) rather than by substituting into the generic
    polynomial, whose monomial count grows exponentially before collection.
    """
    if n < 0:
        raise DomainError("the Laurent family is defined for n >= 0")
    for _, value in _family_steps(n):
        pass
    return value


def family_pairs(n_max: int) -> Iterator[tuple[int, LaurentPoly, LaurentPoly]]:
    """Yield (n, f_{2n}, f_{2n+1}) for n = 0 .. n_max with rolling state."""
    even = None
    for k, value in _family_steps(2 * n_max + 1):
        if k % 2 == 0:
            even = value
        else:
            yield k // 2, even, value


def _family_steps(n_max: int) -> Iterator[tuple[int, LaurentPoly]]:
    f_prev2 = substitute_direct(fib_enumerate(0))  # 1
    yield 0, f_prev2
    if n_max == 0:
        return
    f_prev = substitute_direct(fib_enumerate(1))  # (x2^2 + 1) / x1
    yield 1, f_prev
    for k in range(2, n_max + 1):
        numerator = f_prev + _gen(parity_rep(k - 1)) * f_prev2
        try:
            value = numerator.div_exact(_gen(parity_rep(k)))
        except ExactDivisionError as exc:  # pragma: no cover - contradicts the recurrence
            raise InternalError(f"family recurrence division failed at n={k}: {exc}") from exc
        yield k, value
        f_prev2, f_prev = f_prev, value
