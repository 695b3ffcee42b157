"""Fast recurrence kernels for the two element families of the algebra.

Every cluster variable x_{n+3} and semicanonical generator s_n lives on a
shifted even lattice:

    s_n     = x1^-n     x2^-n (sum over q+r <= n of  b(q,r) x1^2q x2^2r)
    x_{n+3} = x1^-(n+1) x2^-n (x2^(2n+2) + sum over q+r <= n of a(q,r) x1^2q x2^2r)

so a value is determined by a triangular array of positive integers plus, for
the x family, one extra top term.  The defining recurrences become pure
shifted additions of those arrays:

    b_n(q,r) = b_{n-1}(q,r) + b_{n-1}(q-1,r) + b_{n-1}(q,r-1) - b_{n-2}(q-1,r-1)
    a_n(q,r) = b_n(q,r) + a_{n-1}(q,r-1)

(the first is the s recurrence s_n = s_1 s_{n-1} - s_{n-2}; the second is the
exchange of s_n and x_{n+2} into x_{n+3}, whose division by x1 is absorbed by
the monomial prefactor).

The packed kernel stores each array row as ONE big integer with a fixed field
width, so a whole row advances per big-int addition; CPython/GMP then does the
inner loop at C speed.  Field width is chosen from the value of the target
element at x1 = x2 = 1: coefficients are positive, so that value bounds every
coefficient in the chain, making field overflow impossible, and the single
subtraction is borrow-free because each resulting field is again nonnegative.

The pure kernel runs the same recurrences literally on `LaurentPoly` values
(including the per-step exact division by x1) and is selected with
``CLUSTER_A11_KERNEL=pure``.  Both kernels produce identical values.
"""

from __future__ import annotations

import os
from typing import Iterator

from .errors import ExactDivisionError, InternalError
from .kronecker import big_mul
from .laurent import LaurentPoly, ONE, X1, X2

try:
    from gmpy2 import mpz as _mpz

    _wrap_row = _mpz
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _wrap_row = int

ChainStep = tuple[int, LaurentPoly, LaurentPoly]  # (n, s_n, x_{n+3})


def kernel_name() -> str:
    """Active kernel: 'packed' unless CLUSTER_A11_KERNEL=pure."""
    return "pure" if os.environ.get("CLUSTER_A11_KERNEL", "").strip().lower() == "pure" else "packed"


def value_at_one(kind: str, index: int) -> int:
    """Value of an element at x1 = x2 = 1, by the linearized integer recurrence.

    Both families specialize to u_{k+1} = 3 u_k - u_{k-1} at (1, 1): the x
    family starts 1, 1 (x_1, x_2) and the s family starts 1, 3 (s_0, s_1).
    """
    if kind == "x":
        if index <= 0:
            index = 3 - index  # swap symmetry leaves the (1,1) value unchanged
        u, v = 1, 1
        for _ in range(index - 2):
            u, v = v, 3 * v - u
        return v
    if kind == "s":
        if index == -1:
            return 0
        u, v = 1, 3
        for _ in range(index):
            u, v = v, 3 * v - u
        return u
    raise ValueError(f"unknown element family {kind!r}")


def _field_width(n_max: int) -> int:
    # Largest coefficient anywhere in the chain to n_max; +3 bits so the
    # three-way sums inside a step cannot reach a field boundary.
    bound = value_at_one("x", n_max + 3)
    return (bound.bit_length() + 3 + 7) // 8 * 8


def _rows_to_terms(rows: list, width: int, e1_of_q, e2_of_r) -> dict:
    wb = width // 8
    out: dict[tuple[int, int], int] = {}
    for r, row in enumerate(rows):
        row = int(row)
        if not row:
            continue
        nf = ((row.bit_length() + 7) // 8 + wb - 1) // wb
        data = row.to_bytes(nf * wb, "little")
        for q in range(nf):
            c = int.from_bytes(data[q * wb:(q + 1) * wb], "little")
            if c:
                out[(e1_of_q(q), e2_of_r(r))] = c
    return out


def _materialize_s(rows: list, n: int, width: int) -> LaurentPoly:
    terms = _rows_to_terms(rows, width, lambda q: 2 * q - n, lambda r: 2 * r - n)
    return LaurentPoly._wrap(terms)


def _materialize_x(rows: list, n: int, width: int) -> LaurentPoly:
    terms = _rows_to_terms(rows, width, lambda q: 2 * q - n - 1, lambda r: 2 * r - n)
    terms[(-n - 1, n + 2)] = 1  # the lone x2^(2n+2) term above the triangle
    return LaurentPoly._wrap(terms)


def _packed_rows(n_max: int, width: int) -> Iterator[tuple[int, list, list]]:
    """Yield (n, s-rows, x-rows) for n = 0 .. n_max."""
    one = _wrap_row(1)
    b0 = [one]
    a0 = [one]
    yield 0, b0, a0
    if n_max == 0:
        return
    b1 = [one + (one << width), one]
    a1 = [one + (one << width), one + one]
    yield 1, b1, a1
    bprev2, bprev, aprev = b0, b1, a1
    for n in range(2, n_max + 1):
        b = [0] * (n + 1)
        b[0] = bprev[0] + (bprev[0] << width)
        for r in range(1, n):
            b[r] = bprev[r] + (bprev[r] << width) + bprev[r - 1] - (bprev2[r - 1] << width)
        b[n] = bprev[n - 1]
        a = [0] * (n + 1)
        a[0] = b[0]
        for r in range(1, n + 1):
            a[r] = b[r] + aprev[r - 1]
        yield n, b, a
        bprev2, bprev, aprev = bprev, b, a


def _packed_stream(n_max: int) -> Iterator[ChainStep]:
    width = _field_width(n_max)
    for n, b, a in _packed_rows(n_max, width):
        yield n, _materialize_s(b, n, width), _materialize_x(a, n, width)


def _pure_stream(n_max: int) -> Iterator[ChainStep]:
    """The same chain on LaurentPoly values: s by its defining three-term
    recurrence, x by the forward exchange step with an exact division by x1."""

    def exchange_step(s_n: LaurentPoly, x_prev: LaurentPoly) -> LaurentPoly:
        try:
            return (s_n + X2 * x_prev).div_exact(X1)
        except ExactDivisionError as exc:  # pragma: no cover - would contradict Laurentness
            raise InternalError(f"exact division failed in the x chain: {exc}") from exc

    x3 = exchange_step(ONE, X2)
    yield 0, ONE, x3
    if n_max == 0:
        return
    s1 = x3.swap_vars() * x3 - X1 * X2  # definition: s_1 = x_0 x_3 - x_1 x_2
    x4 = exchange_step(s1, x3)
    yield 1, s1, x4
    sprev2, sprev, xprev = ONE, s1, x4
    for n in range(2, n_max + 1):
        s_n = s1 * sprev - sprev2
        x_n3 = exchange_step(s_n, xprev)
        yield n, s_n, x_n3
        sprev2, sprev = sprev, s_n
        xprev = x_n3


def stream(n_max: int, kernel: str | None = None) -> Iterator[ChainStep]:
    """Yield (n, s_n, x_{n+3}) for n = 0 .. n_max with the selected kernel."""
    mode = kernel or kernel_name()
    if mode == "pure":
        return _pure_stream(n_max)
    return _packed_stream(n_max)


def element(kind: str, index: int, kernel: str | None = None) -> LaurentPoly:
    """Single element by running the chain to its target.

    ``kind='s'`` needs index >= 0, ``kind='x'`` needs index >= 3; everything
    below that is a seed value the engine handles directly.
    """
    target = index if kind == "s" else index - 3
    mode = kernel or kernel_name()
    if mode == "pure":
        for n, s_n, x_n3 in _pure_stream(target):
            pass
        return s_n if kind == "s" else x_n3
    width = _field_width(target)
    for n, b, a in _packed_rows(target, width):
        pass
    if kind == "s":
        return _materialize_s(b, target, width)
    return _materialize_x(a, target, width)


# -- packed verification of the exchange relation ---------------------------


def _lattice_triples(poly: LaurentPoly, k: int) -> list[tuple[int, int, int]]:
    # x_{k+3} sits at (e1, e2) = (2q - k - 1, 2r - k); both parities are fixed,
    # so the inverse map below is exact for genuine family members.  Order is
    # irrelevant: packing writes into disjoint byte ranges.
    out = []
    for (e1, e2), c in poly._terms.items():
        q, rem1 = divmod(e1 + k + 1, 2)
        r, rem2 = divmod(e2 + k, 2)
        if rem1 or rem2 or q < 0 or r < 0:
            raise InternalError(f"value does not lie on the x_{k + 3} lattice")
        out.append((q, r, c))
    return out


def _pack_triples(triples: list[tuple[int, int, int]], ncols: int, wb: int) -> int:
    hi = max(r * ncols + q for q, r, _ in triples)
    buf = bytearray((hi + 1) * wb)
    for q, r, c in triples:
        pos = (r * ncols + q) * wb
        buf[pos:pos + wb] = c.to_bytes(wb, "little")
    return int.from_bytes(buf, "little")


ExchangePayload = tuple[int, list, list, list]


def exchange_payload(n: int, x_lo: LaurentPoly, x_mid: LaurentPoly, x_hi: LaurentPoly) -> ExchangePayload:
    """Picklable work item for one exchange-relation check (n >= 2)."""
    if n < 2:
        raise ValueError("packed exchange check needs n >= 2")
    return (
        n,
        _lattice_triples(x_lo, n - 2),
        _lattice_triples(x_mid, n - 1),
        _lattice_triples(x_hi, n),
    )


def exchange_check(payload: ExchangePayload) -> tuple[int, bool]:
    """Exact check of x_{n+1} x_{n+3} == x_{n+2}^2 + 1.

    Both sides are packed on the shared lattice of the products and compared
    as integers; with the field width below no carries can occur, so integer
    equality is polynomial equality.  Shaped as payload -> result so that a
    verify run can fan these out to worker processes.
    """
    n, lo, mid, hi = payload
    bound = value_at_one("x", n + 1) * value_at_one("x", n + 3)
    width = (bound.bit_length() + 2 + 7) // 8 * 8
    wb = width // 8
    ncols = 2 * n + 2
    ka = _pack_triples(lo, ncols, wb)
    kb = _pack_triples(mid, ncols, wb)
    kc = _pack_triples(hi, ncols, wb)
    # The constant 1 lands at lattice point (q, r) = (n, n-1) of the products.
    const_pos = ((n - 1) * ncols + n) * width
    return n, big_mul(ka, kc) == big_mul(kb, kb) + (1 << const_pos)


def exchange_relation_holds(n: int, x_lo: LaurentPoly, x_mid: LaurentPoly, x_hi: LaurentPoly) -> bool:
    return exchange_check(exchange_payload(n, x_lo, x_mid, x_hi))[1]
