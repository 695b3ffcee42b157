"""Property-based tests of the ring axioms and serialization contracts."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cluster_a11 import LaurentPoly, ONE, ZERO
from cluster_a11.kronecker import packed_mul

coeffs = st.integers(min_value=-(2**128), max_value=2**128)
exponents = st.integers(min_value=-20, max_value=20)
terms = st.tuples(exponents, exponents, coeffs)
polys = st.lists(terms, max_size=8).map(LaurentPoly)
nonzero_polys = polys.filter(lambda p: not p.is_zero)


@given(polys, polys)
def test_add_commutative(p, q):
    assert p + q == q + p


@given(polys, polys, polys)
def test_add_associative(p, q, r):
    assert (p + q) + r == p + (q + r)


@given(polys, polys)
def test_mul_commutative(p, q):
    assert p * q == q * p


@given(polys, polys, polys)
def test_mul_associative(p, q, r):
    assert (p * q) * r == p * (q * r)


@given(polys, polys, polys)
def test_distributive(p, q, r):
    assert p * (q + r) == p * q + p * r


@given(polys)
def test_identities(p):
    assert p + ZERO == p
    assert p * ONE == p
    assert p * ZERO == ZERO
    assert p - p == ZERO


@given(polys, nonzero_polys)
def test_division_roundtrip(p, q):
    assert (p * q).div_exact(q) == p


@given(polys, polys)
def test_swap_is_a_ring_automorphism(p, q):
    assert (p + q).swap_vars() == p.swap_vars() + q.swap_vars()
    assert (p * q).swap_vars() == p.swap_vars() * q.swap_vars()
    assert p.swap_vars().swap_vars() == p


@given(polys)
def test_serialization_roundtrip(p):
    assert LaurentPoly.from_json(p.to_json()) == p


@given(polys, polys, st.sampled_from([-3, -2, -1, 1, 2, 3]), st.sampled_from([-3, -2, -1, 1, 2, 3]))
@settings(max_examples=50)
def test_evaluation_is_a_ring_homomorphism(p, q, a, b):
    assert (p * q).eval_int(a, b) == p.eval_int(a, b) * q.eval_int(a, b)
    assert (p + q).eval_int(a, b) == p.eval_int(a, b) + q.eval_int(a, b)


def _schoolbook(p: dict, q: dict) -> dict:
    out = {}
    for (a1, a2), c in p.items():
        for (b1, b2), d in q.items():
            k = (a1 + b1, a2 + b2)
            out[k] = out.get(k, 0) + c * d
    return {k: v for k, v in out.items() if v}


@given(nonzero_polys, nonzero_polys)
def test_packed_mul_matches_schoolbook(p, q):
    assert packed_mul(p._terms, q._terms) == _schoolbook(p._terms, q._terms)


@given(polys, polys)
def test_hash_consistent_with_eq(p, q):
    if p == q:
        assert hash(p) == hash(q)


@given(polys)
def test_eval_at_one_is_coefficient_sum(p):
    assert p.eval_int(1, 1) == Fraction(sum(c for _, _, c in p.terms()))


@pytest.mark.parametrize("seed", range(3))
def test_mul_cutoff_paths_agree(seed):
    # Build operand pairs big enough to cross the packed-multiplication
    # cutoff and compare against the schoolbook result directly.
    import random

    rng = random.Random(seed)
    p = {(rng.randrange(-30, 30), rng.randrange(-30, 30)): rng.randrange(-5, 6) or 1 for _ in range(250)}
    q = {(rng.randrange(-30, 30), rng.randrange(-30, 30)): rng.randrange(-5, 6) or 1 for _ in range(250)}
    lhs = LaurentPoly._wrap(dict(p)) * LaurentPoly._wrap(dict(q))
    assert lhs._terms == _schoolbook(p, q)
