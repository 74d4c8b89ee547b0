from __future__ import annotations

import itertools

import pytest

from absums.cyclotomic import CycInt
from absums.field import build_field, enumerate_field, extend_field, relative_trace
from absums.polynomial import LaurentPoly, assemble


def brute_sum(L: LaurentPoly, m: int, zero_allowed) -> CycInt:
    """Character sum by scalar field arithmetic, one point at a time.

    The trace is the Frobenius orbit sum, independent of the precomputed tables.
    """
    E, emb = extend_field(L.field, m)
    units = list(enumerate_field(E, units_only=True))
    full = list(enumerate_field(E))
    counts = [0] * E.p
    ranges = [full if z else units for z in zero_allowed]
    for pt in itertools.product(*ranges):
        counts[relative_trace(L.evaluate(pt, emb), 1).coeffs[0]] += 1
    return CycInt.from_power_counts(E.p, counts)


@pytest.fixture
def F3():
    return build_field(3, 1)


@pytest.fixture
def F5():
    return build_field(5, 1)


@pytest.fixture
def ex1(F3):
    """G = t0 t1^2 + 1/t0 over F_3."""
    return assemble(LaurentPoly(F3, 1, {(2,): 1}), None, [0, 1], 1, 1)


@pytest.fixture
def thm3(F5):
    """f = 1 + t1^3, g = t1^2, P_B = s over F_5."""
    f = LaurentPoly(F5, 1, {(0,): 1, (3,): 1})
    g = LaurentPoly(F5, 1, {(2,): 1})
    return assemble(f, g, [0, 1], 1, 1)
