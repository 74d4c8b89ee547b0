from __future__ import annotations

import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absums.cyclotomic import (
    CycInt,
    CycRat,
    complex_embed,
    cyc_from_character,
    log_power_sums,
    newton_polygon,
    pade_reconstruct,
    pi_valuation,
    polygon_from_slopes,
    series_exp,
    zeta,
)
from absums.errors import EmptyInput, ReconstructionUnstable

cyc = lambda p: st.lists(st.integers(-20, 20), min_size=p - 1, max_size=p - 1).map(lambda c: CycInt(p, tuple(c)))  # noqa: E731


def _ints(p, *vals):
    return [CycInt.from_int(p, v) for v in vals]


def test_character_examples():
    assert cyc_from_character(3, 0) == CycInt.from_int(3, 1)
    assert cyc_from_character(3, 2) == CycInt(3, (-1, -1))
    assert cyc_from_character(5, 7) == cyc_from_character(5, 2)


def test_zeta_power_p_is_one():
    for p in (2, 3, 5, 7):
        assert zeta(p) ** p == CycInt.from_int(p, 1)
        assert sum((zeta(p) ** k for k in range(1, p)), CycInt.zero(p)) == CycInt.from_int(p, -1)


def test_pi_valuation_examples():
    assert pi_valuation(CycInt.from_int(3, 3)).pi == 2
    assert pi_valuation(zeta(3) - 1).pi == 1
    assert pi_valuation(CycInt.from_int(3, -1)).pi == 0
    assert pi_valuation(CycInt.zero(3)).is_infinite


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([3, 5, 7]).flatmap(lambda p: cyc(p)))
def test_pi_valuation_equals_norm_valuation(x):
    """v_pi(x) = v_p(N(x)) since pi is totally ramified of degree p - 1."""
    if x.is_zero():
        return
    n = abs(x.norm())
    v = 0
    while n % x.p == 0:
        n //= x.p
        v += 1
    assert pi_valuation(x).pi == v


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5]).flatmap(lambda p: st.tuples(cyc(p), cyc(p))))
def test_ring_and_embedding(pair):
    x, y = pair
    zx, zy = complex_embed(x), complex_embed(y)
    assert abs(complex_embed(x * y) - zx * zy) < 1e-9 * (1 + abs(zx) * abs(zy))
    assert abs(complex_embed(x + y) - (zx + zy)) < 1e-9
    assert abs(complex_embed(x.conjugate()) - zx.conjugate()) < 1e-9
    if not x.is_zero():
        inv = CycRat(x).inverse()
        assert CycRat(x) * inv == CycRat.from_value(x.p, 1)


def test_embedding_examples():
    assert abs(complex_embed(CycInt.from_int(3, 1) + zeta(3) + zeta(3) ** 2)) < 1e-12
    z = complex_embed(zeta(3))
    assert abs(z - cmath.exp(2j * math.pi / 3)) < 1e-12
    assert complex_embed(CycInt.from_int(3, -3)) == complex(-3, 0)


def test_series_exp_examples():
    p = 3
    assert series_exp(_ints(p, 1, 1, 1, 1), 1) == [CycRat.from_value(p, 1)] * 5
    assert series_exp(_ints(p, 2, 4, 8, 16), 1) == [CycRat.from_value(p, 2**k) for k in range(5)]
    # (1-2T)(1-3T) from its reciprocal roots
    c = series_exp(_ints(p, *[2**m + 3**m for m in range(1, 6)]), -1)
    assert c == [CycRat.from_value(p, v) for v in (1, -5, 6, 0, 0, 0)]
    c = series_exp(_ints(p, *[-(2**m + 3**m) for m in range(1, 6)]), 1)
    assert c == [CycRat.from_value(p, v) for v in (1, -5, 6, 0, 0, 0)]


def test_series_exp_inverts_newton_identities():
    p = 5
    poly = [CycInt.from_int(p, 1), zeta(p) * 3, zeta(p) ** 2 - 7, CycInt.from_int(p, 11)]
    sums = log_power_sums(poly, 8, p)
    c = series_exp(sums, -1)
    assert c[:4] == [CycRat(x) for x in poly]
    assert all(x.is_zero() for x in c[4:])


def test_pade_examples():
    p = 3
    P, Q = pade_reconstruct([2**k for k in range(6)], 0, 1, p)
    assert P == [CycRat.from_value(p, 1)] and Q == [CycRat.from_value(p, v) for v in (1, -2)]
    P, Q = pade_reconstruct([1, -5, 6, 0, 0], 2, 0, p)
    assert P == [CycRat.from_value(p, v) for v in (1, -5, 6)] and Q == [CycRat.from_value(p, 1)]
    # (1-T)/(1-3T) = 1 + 2T + 6T^2 + 18T^3 + 54T^4
    P, Q = pade_reconstruct([1, 2, 6, 18, 54], 1, 1, p)
    assert P == [CycRat.from_value(p, v) for v in (1, -1)]
    assert Q == [CycRat.from_value(p, v) for v in (1, -3)]


def test_pade_failure():
    with pytest.raises(ReconstructionUnstable):
        pade_reconstruct([1, 1, 2, 5, 14, 42, 132], 1, 1, 3)


def test_newton_polygon_examples():
    npoly = newton_polygon(_ints(3, 1, 3, 9), 3)
    assert npoly.slopes == (1, 1)
    npoly = newton_polygon(_ints(3, 1, 3, 3), 3)
    assert npoly.vertices == ((0, 0), (2, 1))
    assert npoly.slopes == (Fraction(1, 2), Fraction(1, 2))
    assert newton_polygon([CycInt.from_int(3, 1), zeta(3)], 3).slopes == (0,)
    with pytest.raises(EmptyInput):
        newton_polygon([], 3)


def test_newton_polygon_over_extension_field():
    # q = 9: ord_q(3) = 1/2
    assert newton_polygon(_ints(3, 1, 3), 3, s=2).slopes == (Fraction(1, 2),)


def test_polygon_from_slopes_heights():
    P = polygon_from_slopes([1, 0, 1, 1])
    assert P.heights() == [0, 0, 1, 2, 3]


def test_json_roundtrip():
    x = zeta(7) * 12345678901234567890 - 3
    assert CycInt.from_json(x.to_json()) == x
