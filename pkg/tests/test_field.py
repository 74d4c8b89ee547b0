from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absums.errors import FieldMismatch, NotPrime
from absums.field import (
    build_field,
    chunk_bounds,
    enumerate_chunks,
    enumerate_field,
    extend_field,
    field_tables,
    is_irreducible,
    relative_trace,
    trace_to_prime,
)


def _brute_irreducible(poly, p):
    """No root-free factorization test: try every monic divisor of degree <= deg/2."""
    s = len(poly) - 1
    for k in range(1, s // 2 + 1):
        for tail in itertools.product(range(p), repeat=k):
            div = list(tail) + [1]
            rem = list(poly)
            for i in range(len(rem) - 1, k - 1, -1):
                c = rem[i]
                if c:
                    for j in range(k + 1):
                        rem[i - k + j] = (rem[i - k + j] - c * div[j]) % p
            if not any(rem[:k]):
                return False
    return True


def test_moduli_examples():
    assert build_field(3, 1).modulus == (0, 1)
    assert build_field(3, 2).modulus == (1, 0, 1)
    assert build_field(2, 3).modulus == (1, 1, 0, 1)


def test_not_prime():
    with pytest.raises(NotPrime):
        build_field(4, 1)


@pytest.mark.parametrize("p,s", [(2, 2), (2, 4), (3, 3), (5, 2), (2, 7), (3, 7)])
def test_irreducibility_matches_brute_force(p, s):
    for tail in itertools.islice(itertools.product(range(p), repeat=s), 200):
        poly = list(tail) + [1]
        assert is_irreducible(poly, p) == _brute_irreducible(poly, p)


def test_trace_examples():
    F9 = build_field(3, 2)
    u = F9([0, 1])
    assert trace_to_prime(u) == 0
    assert trace_to_prime(F9(1)) == 2
    assert trace_to_prime(build_field(3, 1)(2)) == 2


def test_trace_agrees_with_frobenius_sum():
    F = build_field(2, 5)
    for x in F.elements():
        assert trace_to_prime(x) == relative_trace(x, 1).coeffs[0]


def test_enumeration_and_chunks():
    F3 = build_field(3, 1)
    assert [x.coeffs[0] for x in enumerate_field(F3)] == [0, 1, 2]
    assert [x.coeffs[0] for x in enumerate_field(F3, units_only=True)] == [1, 2]
    chunks = enumerate_chunks(build_field(3, 2), 2)
    assert [len(c) for c in chunks] == [5, 4]
    codes = [x.code for c in chunks for x in c]
    assert sorted(codes) == list(range(9))
    assert chunk_bounds(10, 3) == [(0, 4), (4, 7), (7, 10)]


def test_extension_embeddings():
    F3 = build_field(3, 1)
    E, emb = extend_field(F3, 1)
    assert E == F3 and emb(F3(2)) == F3(2)
    F9, emb = extend_field(F3, 2)
    assert emb(F3(2)) == F9(2)
    F4 = build_field(2, 2)
    F16, emb = extend_field(F4, 2)
    r = emb(F4.gen)
    assert r * r + r + 1 == F16.zero  # modulus of F_4 is x^2 + x + 1
    for a, b in itertools.product(F4.elements(), repeat=2):
        assert emb(a * b) == emb(a) * emb(b)
        assert emb(a + b) == emb(a) + emb(b)


def test_cross_field_arithmetic_rejected():
    with pytest.raises(FieldMismatch):
        build_field(3, 1)(1) + build_field(3, 2)(1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 80), st.integers(0, 80), st.integers(-5, 10))
def test_field_axioms(a, b, e):
    F = build_field(3, 4)
    x, y = F.from_code(a), F.from_code(b)
    assert (x + y) * x == x * x + y * x
    if not x.is_zero():
        assert x * x.inverse() == F.one
        assert x**e * x ** (-e) == F.one
    assert x.frobenius(4) == x


def test_tables_consistent():
    F = build_field(5, 3)
    T = field_tables(F)
    g = T.generator
    assert g ** (F.q - 1) == F.one
    assert len(set(int(c) for c in T.exp_code)) == F.q - 1
    for k in (0, 1, 7, 55, F.q - 2):
        x = g**k
        assert int(T.exp_code[k]) == x.code
        assert int(T.log[x.code]) == k
        assert int(T.trace[k]) == trace_to_prime(x)
