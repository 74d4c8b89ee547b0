from __future__ import annotations

import pytest
from conftest import brute_sum
from hypothesis import given, settings
from hypothesis import strategies as st

from absums.cyclotomic import CycInt
from absums.errors import BudgetExceeded
from absums.field import build_field
from absums.kernels import character_sum, counts_by_t0
from absums.polynomial import LaurentPoly, assemble


def _sum(L, m, zero_allowed, **kw):
    return character_sum(list(L.terms.items()), L.n_vars, L.field, m, zero_allowed, **kw)


def test_example_value(ex1):
    v, _ = _sum(ex1.G, 1, [False, True])
    assert v == CycInt.from_int(3, -3)
    assert v == brute_sum(ex1.G, 1, [False, True])


@pytest.mark.parametrize("m", [1, 2])
def test_direct_fiber_brute_agree(thm3, m):
    za = [False, True]
    direct, used_d = _sum(thm3.G, m, za, method="direct")
    fiber, used_f = _sum(thm3.G, m, za, method="fiber")
    assert (used_d, used_f) == ("direct", "fiber")
    assert direct == fiber == brute_sum(thm3.G, m, za)


@settings(max_examples=20, deadline=None)
@given(
    st.sampled_from([3, 5]),
    st.lists(st.integers(0, 4), min_size=3, max_size=3),
    st.lists(st.integers(0, 4), min_size=2, max_size=2),
    st.integers(1, 4),
    st.booleans(),
)
def test_random_instances_agree(p, fc, gc, pb, torus):
    F = build_field(p, 1)
    f = LaurentPoly(F, 1, {(k,): c for k, c in enumerate(fc)} | {(3,): 1})
    g = LaurentPoly(F, 1, {(k,): c for k, c in enumerate(gc)})
    G = assemble(f, g, [0, pb], 1, 1)
    za = [False, not torus]
    ref = brute_sum(G.G, 1, za)
    assert _sum(G.G, 1, za, method="direct")[0] == ref
    assert _sum(G.G, 1, za, method="fiber")[0] == ref


def test_two_variables_and_extension(F3):
    f = LaurentPoly(F3, 2, {(2, 0): 1, (0, 2): 2, (1, 1): 1})
    g = LaurentPoly(F3, 2, {(1, 0): 1})
    G = assemble(f, g, [0, 1], 1, 1).G
    for za in ([False, True, True], [False, False, True], [False, False, False]):
        ref = brute_sum(G, 1, za)
        assert _sum(G, 1, za, method="direct")[0] == ref
        assert _sum(G, 1, za, method="fiber")[0] == ref
    ref2 = brute_sum(G, 2, [False, True, True])
    assert _sum(G, 2, [False, True, True], method="fiber")[0] == ref2


def test_nonprime_base_field():
    F = build_field(2, 2)
    w = F([0, 1])
    L = LaurentPoly(F, 2, {(1, 3): w, (-1, 0): 1, (0, 1): 1})
    za = [False, True]
    ref = brute_sum(L, 1, za)
    assert _sum(L, 1, za, method="direct")[0] == ref
    assert _sum(L, 1, za, method="fiber")[0] == ref


def test_thread_invariance(thm3):
    za = [False, True]
    base = _sum(thm3.G, 3, za, method="direct", threads=1)[0]
    for t in (2, 4, 7):
        assert _sum(thm3.G, 3, za, method="direct", threads=t)[0] == base
        assert _sum(thm3.G, 3, za, method="fiber", threads=t)[0] == base


def test_conjugation_symmetry(thm3):
    """The Galois automorphism zeta -> zeta^{-1} sends S(G) to S(-G)."""
    neg = thm3.G.scale(thm3.field(-1))
    for m in (1, 2):
        a = _sum(thm3.G, m, [False, True])[0]
        b = _sum(neg, m, [False, True])[0]
        assert a.galois(-1) == b


def test_linear_form_sums_to_zero(F5):
    # psi(t1) summed over the affine line vanishes; t0 contributes a factor q-1.
    L = LaurentPoly(F5, 2, {(0, 1): 1})
    for m in (1, 2):
        assert _sum(L, m, [False, True])[0].is_zero()


def test_counts_by_t0_total(thm3):
    za = [False, True]
    c = counts_by_t0(list(thm3.G.terms.items()), 2, thm3.field, 1, za)
    assert c.shape == (4, 5) and int(c.sum()) == 4 * 5
    assert CycInt.from_power_counts(5, [int(x) for x in c.sum(axis=0)]) == _sum(thm3.G, 1, za)[0]


def test_budget_and_argument_errors(thm3):
    with pytest.raises(BudgetExceeded):
        _sum(thm3.G, 4, [False, True], method="direct", budget=100)
    with pytest.raises(ValueError):
        _sum(thm3.G, 1, [True, True])
    with pytest.raises(ValueError):
        _sum(thm3.G, 1, [False, True], method="nope")
