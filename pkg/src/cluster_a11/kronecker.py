"""Kronecker-substitution fast path for large sparse multiplications.

Both operands are packed into single huge integers (one fixed-width field per
lattice point of the product's exponent grid), multiplied once, and the
product integer is sliced back into coefficients.  This moves the O(T_p * T_q)
coefficient work into a single big-integer multiplication, which GMP (via
gmpy2, when available) performs in softly-linear time; plain Python ints are
used as a slower fallback.

Correctness requirements enforced here:

* the field width W is wide enough that no product coefficient, plus one sign
  bit and one slack bit, can touch its neighbour;
* exponents are mapped through the coarsest common lattice (per-axis gcd of
  exponent offsets), so sparse supports with regular spacing pack densely;
* signed coefficients round-trip through a balanced-digit correction: adding
  ``2**(W-1)`` to every field of the product makes all digits nonnegative
  without inter-field carries, after which plain unsigned slicing applies.
"""

from __future__ import annotations

from math import gcd

try:
    from gmpy2 import mpz as _mpz

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _mpz = int
    HAVE_GMPY2 = False

ExponentPair = tuple[int, int]


def big_mul(a: int, b: int) -> int:
    """Product of two Python ints through GMP when available."""
    if HAVE_GMPY2:
        return int(_mpz(a) * _mpz(b))
    return a * b


def _axis_layout(p: dict, q: dict, axis: int) -> tuple[int, int, int]:
    """(base, stride, count) of the product's exponent lattice along one axis."""
    pmin = min(k[axis] for k in p)
    pmax = max(k[axis] for k in p)
    qmin = min(k[axis] for k in q)
    qmax = max(k[axis] for k in q)
    g = 0
    for k in p:
        g = gcd(g, k[axis] - pmin)
    for k in q:
        g = gcd(g, k[axis] - qmin)
    g = g or 1
    count = (pmax - pmin + qmax - qmin) // g + 1
    return pmin + qmin, g, count


def _pack(poly: dict, e1base: int, g1: int, e2base: int, g2: int, ncols: int, wb: int) -> int:
    hi = 0
    for e1, e2 in poly:
        pos = (e1 - e1base) // g1 + (e2 - e2base) // g2 * ncols
        if pos > hi:
            hi = pos
    buf = bytearray((hi + 1) * wb)
    for (e1, e2), c in poly.items():
        pos = ((e1 - e1base) // g1 + (e2 - e2base) // g2 * ncols) * wb
        buf[pos:pos + wb] = c.to_bytes(wb, "little")
    return int.from_bytes(buf, "little")


def packed_mul(p: dict, q: dict) -> dict:
    """Multiply two canonical term dicts exactly; returns a canonical dict."""
    if not p or not q:
        return {}
    e1base1, g1, ncols = _axis_layout(p, q, 0)
    e2base1, g2, nrows = _axis_layout(p, q, 1)
    p1min = min(k[0] for k in p)
    q1min = min(k[0] for k in q)
    p2min = min(k[1] for k in p)
    q2min = min(k[1] for k in q)

    signed = any(c < 0 for c in p.values()) or any(c < 0 for c in q.values())
    # Every product coefficient is a sum of pairwise coefficient products,
    # so |coeff| <= sum|p| * sum|q|; +1 sign bit, +1 slack.
    bound = sum(abs(c) for c in p.values()) * sum(abs(c) for c in q.values())
    width = (bound.bit_length() + 2 + 7) // 8 * 8
    wb = width // 8

    if signed:
        kp = _pack({k: c for k, c in p.items() if c > 0}, p1min, g1, p2min, g2, ncols, wb) - _pack(
            {k: -c for k, c in p.items() if c < 0}, p1min, g1, p2min, g2, ncols, wb
        )
        kq = _pack({k: c for k, c in q.items() if c > 0}, q1min, g1, q2min, g2, ncols, wb) - _pack(
            {k: -c for k, c in q.items() if c < 0}, q1min, g1, q2min, g2, ncols, wb
        )
    else:
        kp = _pack(p, p1min, g1, p2min, g2, ncols, wb)
        kq = _pack(q, q1min, g1, q2min, g2, ncols, wb)

    kr = big_mul(kp, kq)

    nfields = ncols * nrows
    half = 0
    if signed:
        # Balanced-digit offset: each signed field d with |d| < 2**(width-1)
        # becomes the unsigned field d + 2**(width-1) with no carries.
        half = 1 << (width - 1)
        offset = (((1 << (nfields * width)) - 1) // ((1 << width) - 1)) << (width - 1)
        kr += offset

    data = kr.to_bytes(nfields * wb, "little")
    out: dict[ExponentPair, int] = {}
    for i in range(nfields):
        c = int.from_bytes(data[i * wb:(i + 1) * wb], "little")
        if signed:
            c -= half
        if c:
            out[(e1base1 + (i % ncols) * g1, e2base1 + (i // ncols) * g2)] = c
    return out
