"""Exact sparse Laurent polynomials in two variables over arbitrary-precision integers.

A polynomial is a finite map from exponent pairs ``(e1, e2)`` to nonzero
integer coefficients; both exponents may be negative.  Values are immutable
and always canonical: duplicate monomials are merged at construction time and
zero coefficients are never stored, so two equal values always compare equal.
The canonical term order (used by iteration, serialization and printing) is
lexicographic ascending on ``(e1, e2)``.

Coefficients are Python ints, hence exact at any size.  Exponents are kept
inside the signed 64-bit range; leaving it raises :class:`ExponentOverflowError`
instead of wrapping.
"""

from __future__ import annotations

import json
import os
import re
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import (
    DivisionByZeroError,
    EvalAtZeroError,
    ExactDivisionError,
    ExponentOverflowError,
    ParseError,
    ZeroPolynomialError,
)

ExponentPair = tuple[int, int]
Term = tuple[int, int, int]

# Exponents are contractually signed 64-bit; coefficients are unbounded.
EXP_MIN = -(2**63)
EXP_MAX = 2**63 - 1

# Above this size product (number of coefficient multiplications) dense
# multiplication switches to the packed-integer fast path.
_FAST_MUL_CUTOFF = 30_000

_COEFF_RE = re.compile(r"-?(0|[1-9][0-9]*)\Z")

_JSON_VARS = ["x1", "x2"]


def _packed_mul_enabled() -> bool:
    return os.environ.get("CLUSTER_A11_KERNEL", "packed").strip().lower() != "pure"


def _check_exponent(e: int) -> int:
    if not EXP_MIN <= e <= EXP_MAX:
        raise ExponentOverflowError(f"exponent {e} outside signed 64-bit range")
    return e


class LaurentPoly:
    """An immutable element of the integer Laurent polynomial ring in x1, x2."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[Term] = ()):
        """Build from ``(e1, e2, coeff)`` triples.

        Duplicate exponent pairs are merged; terms whose merged coefficient is
        zero are dropped.
        """
        acc: dict[ExponentPair, int] = {}
        for e1, e2, c in terms:
            _check_exponent(e1)
            _check_exponent(e2)
            key = (e1, e2)
            v = acc.get(key, 0) + c
            if v:
                acc[key] = v
            elif key in acc:
                del acc[key]
        object.__setattr__(self, "_terms", acc)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _wrap(cls, terms: dict[ExponentPair, int]) -> "LaurentPoly":
        # Trusted constructor: `terms` must already be canonical (no zeros)
        # and is adopted without copying.
        p = cls.__new__(cls)
        object.__setattr__(p, "_terms", terms)
        object.__setattr__(p, "_hash", None)
        return p

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    def __reduce__(self):
        return (LaurentPoly._wrap, (self._terms,))

    # -- inspection ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def term_count(self) -> int:
        return len(self._terms)

    def terms(self) -> list[Term]:
        """All terms as ``(e1, e2, coeff)`` in canonical (lex ascending) order."""
        return [(e1, e2, self._terms[(e1, e2)]) for e1, e2 in sorted(self._terms)]

    def coefficient(self, e1: int, e2: int) -> int:
        return self._terms.get((e1, e2), 0)

    def coefficients(self) -> Iterator[int]:
        return iter(self._terms.values())

    def degree_range(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """((min e1, max e1), (min e2, max e2)); error on the zero polynomial."""
        if not self._terms:
            raise ZeroPolynomialError("degree of the zero polynomial is undefined")
        e1s = [k[0] for k in self._terms]
        e2s = [k[1] for k in self._terms]
        return (min(e1s), max(e1s)), (min(e2s), max(e2s))

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        get = out.get
        for k, v in other._terms.items():
            w = get(k, 0) + v
            if w:
                out[k] = w
            elif k in out:
                del out[k]
        return LaurentPoly._wrap(out)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        get = out.get
        for k, v in other._terms.items():
            w = get(k, 0) - v
            if w:
                out[k] = w
            elif k in out:
                del out[k]
        return LaurentPoly._wrap(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._wrap({k: -v for k, v in self._terms.items()})

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        p, q = self._terms, other._terms
        if not p or not q:
            return ZERO
        if len(p) > len(q):
            p, q = q, p
        self._check_mul_exponents(other)
        if len(p) == 1:
            ((d1, d2), c) = next(iter(p.items()))
            if c == 1:
                return LaurentPoly._wrap({(e1 + d1, e2 + d2): v for (e1, e2), v in q.items()})
            return LaurentPoly._wrap({(e1 + d1, e2 + d2): c * v for (e1, e2), v in q.items()})
        if len(p) * len(q) > _FAST_MUL_CUTOFF and _packed_mul_enabled():
            from .kronecker import packed_mul

            return LaurentPoly._wrap(packed_mul(p, q))
        out: dict[ExponentPair, int] = {}
        get = out.get
        for (a1, a2), c in p.items():
            for (b1, b2), d in q.items():
                k = (a1 + b1, a2 + b2)
                out[k] = get(k, 0) + c * d
        return LaurentPoly._wrap({k: v for k, v in out.items() if v})

    def _check_mul_exponents(self, other: "LaurentPoly") -> None:
        # Extremes of exponent sums are sums of extremes, so four corner
        # checks per axis bound every term of the product.
        (a1, b1), (a2, b2) = self.degree_range()
        (c1, d1), (c2, d2) = other.degree_range()
        for e in (a1 + c1, b1 + d1, a2 + c2, b2 + d2):
            _check_exponent(e)

    def __pow__(self, n: int) -> "LaurentPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def div_exact(self, divisor: "LaurentPoly") -> "LaurentPoly":
        """Exact quotient in the Laurent ring.

        Both operands are shifted by monomials into ordinary polynomials,
        divided by cancelling graded-lex leading terms, and the quotient is
        shifted back.  Raises :class:`ExactDivisionError` on the first leading
        term that does not divide exactly (no remainder is ever computed).
        """
        q = divisor._terms
        if not q:
            raise DivisionByZeroError("division by the zero polynomial")
        p = self._terms
        if not p:
            return ZERO
        p1min = min(k[0] for k in p)
        p2min = min(k[1] for k in p)
        q1min = min(k[0] for k in q)
        q2min = min(k[1] for k in q)
        if len(q) == 1:
            # Monomial divisor: exponent shift plus per-coefficient division.
            ((d1, d2), c) = next(iter(q.items()))
            out = {}
            for (e1, e2), v in p.items():
                w, rem = divmod(v, c)
                if rem:
                    raise ExactDivisionError(f"coefficient {v} not divisible by {c}")
                out[(e1 - d1, e2 - d2)] = w
            return LaurentPoly._wrap(out)
        # Shift to nonnegative exponents.
        rem = {(e1 - p1min, e2 - p2min): v for (e1, e2), v in p.items()}
        qsh = {(e1 - q1min, e2 - q2min): v for (e1, e2), v in q.items()}
        grlex = lambda k: (k[0] + k[1], k[0])  # noqa: E731 - local ordering key
        qlead = max(qsh, key=grlex)
        qlc = qsh[qlead]
        quot: dict[ExponentPair, int] = {}
        while rem:
            lead = max(rem, key=grlex)
            t1 = lead[0] - qlead[0]
            t2 = lead[1] - qlead[1]
            if t1 < 0 or t2 < 0:
                raise ExactDivisionError("leading monomial not divisible")
            c, r = divmod(rem[lead], qlc)
            if r:
                raise ExactDivisionError("leading coefficient not divisible")
            quot[(t1, t2)] = c
            for (e1, e2), v in qsh.items():
                k = (e1 + t1, e2 + t2)
                w = rem.get(k, 0) - c * v
                if w:
                    rem[k] = w
                elif k in rem:
                    del rem[k]
        s1 = p1min - q1min
        s2 = p2min - q2min
        return LaurentPoly._wrap({(e1 + s1, e2 + s2): v for (e1, e2), v in quot.items()})

    def swap_vars(self) -> "LaurentPoly":
        """The image under the ring automorphism exchanging x1 and x2."""
        return LaurentPoly._wrap({(e2, e1): c for (e1, e2), c in self._terms.items()})

    def eval_int(self, a: int, b: int) -> Fraction:
        """Exact value at ``x1 = a, x2 = b`` with nonzero integers a, b."""
        if a == 0 or b == 0:
            raise EvalAtZeroError("cannot evaluate at a point with a zero coordinate")
        if not self._terms:
            return Fraction(0)
        # Clear denominators with a single monomial shift, evaluate the
        # resulting ordinary polynomial, then divide back.
        e1min = min(0, min(k[0] for k in self._terms))
        e2min = min(0, min(k[1] for k in self._terms))
        total = 0
        for (e1, e2), c in self._terms.items():
            total += c * a ** (e1 - e1min) * b ** (e2 - e2min)
        return Fraction(total, a ** (-e1min) * b ** (-e2min))

    # -- comparison / hashing -------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(frozenset(self._terms.items()))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- formatting / serialization -------------------------------------------

    def format_human(self) -> str:
        """Canonical plain-text form: ``c * x1^a * x2^b`` terms joined by `` + ``."""
        if not self._terms:
            return "0"
        parts = []
        for e1, e2, c in self.terms():
            factors = [str(c)]
            if e1:
                factors.append(f"x1^{e1}")
            if e2:
                factors.append(f"x2^{e2}")
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        text = self.format_human()
        if len(text) > 120:
            text = f"{text[:117]}..."
        return f"LaurentPoly({text!r})"

    def to_json(self) -> str:
        """Serialize to the package's bit-exact JSON schema."""
        obj = {
            "vars": _JSON_VARS,
            "terms": [
                {"e1": e1, "e2": e2, "c": str(c)} for e1, e2, c in self.terms()
            ],
        }
        return json.dumps(obj, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "LaurentPoly":
        """Parse the JSON schema back into a polynomial.

        The schema is checked strictly: fixed ``vars``, terms sorted strictly
        ascending by ``(e1, e2)``, decimal coefficient strings with no leading
        zeros and no zero coefficients.
        """
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
        if not isinstance(obj, dict) or set(obj) != {"vars", "terms"}:
            raise ParseError("expected an object with exactly 'vars' and 'terms'")
        if obj["vars"] != _JSON_VARS:
            raise ParseError(f"'vars' must be {_JSON_VARS!r}")
        raw = obj["terms"]
        if not isinstance(raw, list):
            raise ParseError("'terms' must be an array")
        out: dict[ExponentPair, int] = {}
        prev: ExponentPair | None = None
        for i, item in enumerate(raw):
            if not isinstance(item, dict) or set(item) != {"e1", "e2", "c"}:
                raise ParseError(f"term {i}: expected keys e1, e2, c")
            e1, e2, c = item["e1"], item["e2"], item["c"]
            if not isinstance(e1, int) or isinstance(e1, bool):
                raise ParseError(f"term {i}: e1 must be an integer")
            if not isinstance(e2, int) or isinstance(e2, bool):
                raise ParseError(f"term {i}: e2 must be an integer")
            _check_exponent(e1)
            _check_exponent(e2)
            if not isinstance(c, str) or not _COEFF_RE.match(c):
                raise ParseError(f"term {i}: coefficient must be a decimal string")
            value = int(c)
            if value == 0:
                raise ParseError(f"term {i}: zero coefficients are not stored")
            key = (e1, e2)
            if prev is not None and key <= prev:
                raise ParseError(f"term {i}: terms must be strictly ascending in (e1, e2)")
            prev = key
            out[key] = value
        return cls._wrap(out)


def make(terms: Iterable[Term]) -> LaurentPoly:
    """Canonicalizing constructor (merge duplicates, drop zeros)."""
    return LaurentPoly(terms)


def monomial(e1: int, e2: int, c: int = 1) -> LaurentPoly:
    return LaurentPoly([(e1, e2, c)])


ZERO = LaurentPoly()
ONE = LaurentPoly([(0, 0, 1)])
X1 = LaurentPoly([(1, 0, 1)])
X2 = LaurentPoly([(0, 1, 1)])
