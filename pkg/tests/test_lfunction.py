from __future__ import annotations

import pytest
from conftest import brute_sum

from absums.cyclotomic import CycInt, complex_embed
from absums.errors import HypothesisUnmet, NotPolynomial
from absums.geometry import ab_polytope, betti_bound_theorem1, hodge_numbers_AS
from absums.io import SumCache
from absums.lfunction import (
    bound_check,
    detect_l_polynomial,
    exp_sum,
    exp_sums,
    gnp_search,
    l_polynomial_detect,
    l_polynomial_extract,
    lstar_rational,
    np_vs_hp,
    purity_check,
    reciprocal_roots,
    toric_decomposition_check,
    twisted_sum,
)
from absums.polynomial import sample_family


def _power_sums(alphas: list[int], n_eff: int, M: int) -> list[CycInt]:
    """S_m consistent with L^{(-1)^n_eff} = prod (1 - alpha T)."""
    sign = 1 if n_eff % 2 else -1
    return [CycInt.from_int(3, sign * sum(a**m for a in alphas)) for m in range(1, M + 1)]


def test_synthetic_roundtrip():
    # prod (1 - a T) for a in (2, -3) is 1 + T - 6 T^2
    for n_eff in (1, 2):
        sums = _power_sums([2, -3], n_eff, 5)
        Lp = l_polynomial_extract(sums, n_eff, 2)
        assert [c for c in Lp.coeffs] == [CycInt.from_int(3, x) for x in (1, 1, -6)]
        assert Lp.sign == (-1) ** n_eff


def test_extract_rejects():
    sums = _power_sums([2, -3, 5], 1, 5)
    with pytest.raises(NotPolynomial):
        l_polynomial_extract(sums, 1, 2)
    with pytest.raises(ValueError):
        l_polynomial_extract(sums[:3], 1, 2)


def test_detect_trailing_zeros():
    Lp = l_polynomial_detect(_power_sums([2], 1, 4), 1, 3)
    assert Lp.degree == 1 and Lp.horizon == 4
    with pytest.raises(NotPolynomial):
        l_polynomial_detect(_power_sums([2, 3, 5], 1, 4), 1, 3)


def test_example_l_polynomial(ex1):
    sums = exp_sums(ex1, 4, "affine")
    assert sums[0].value == CycInt.from_int(3, -3)
    assert sums[0].value == brute_sum(ex1.G, 1, [False, True])
    Lp = l_polynomial_extract(sums, 1, 2)
    assert Lp.coeffs == (CycInt.from_int(3, 1), CycInt.from_int(3, 3))
    v = purity_check(Lp, 3, 2)
    assert v.passed
    assert reciprocal_roots(Lp)[0] == pytest.approx(-3)


def test_subset_sums(ex1):
    assert exp_sum(ex1, 1, "subset", []).value == CycInt.from_int(3, -1)
    with pytest.raises(ValueError):
        exp_sum(ex1, 1, "subset", [2])
    with pytest.raises(ValueError):
        exp_sum(ex1, 0)


@pytest.mark.parametrize("m", [1, 2])
def test_toric_decomposition(ex1, thm3, m):
    assert toric_decomposition_check(ex1, m).passed
    assert toric_decomposition_check(thm3, m).passed


def test_theorem3_instance(thm3):
    Lp, sums = detect_l_polynomial(thm3, "affine", 9)
    assert Lp.degree == 5 and len(sums) == 7
    slopes = [str(x) for x in Lp.newton_polygon().slopes]
    assert slopes == ["1/2", "1", "1", "1", "3/2"]
    v = bound_check(thm3, "T3")
    assert v.passed and v.details["constant"] == "9"


def test_theorem1_bound(ex1, thm3):
    v = bound_check(ex1, "T1")
    assert v.passed and v.lhs == pytest.approx(3.0) and v.rhs == pytest.approx(betti_bound_theorem1(1, 1, 2, 1) * 3)
    with pytest.raises(HypothesisUnmet) as exc:
        bound_check(thm3, "T1")
    assert "deg(g)<Bd/(A+B)" in str(exc.value)


def test_twisted_sum_trivial_character(ex1):
    assert twisted_sum(ex1, 0) == pytest.approx(complex_embed(exp_sum(ex1, 1).value))
    assert bound_check(ex1, "T1", chi=1).passed


def test_lstar_rational(ex1):
    sums = exp_sums(ex1, 5, "torus")
    R = lstar_rational(sums, 2, 2, bound=6)
    assert R.to_json()["within_bound"]


def test_cache_roundtrip(tmp_path, thm3):
    cache = SumCache(tmp_path)
    a = exp_sum(thm3, 2, cache=cache)
    b = exp_sum(thm3, 2, cache=cache)
    assert a.value == b.value and b.method == "cache"
    assert (cache.hits, cache.misses) == (1, 1)


def test_np_vs_hp_generic_sample():
    G = sample_family(5, 1, 2, 1, 1, 1, 0, seed=3).instance
    hp = hodge_numbers_AS(ab_polytope(1, 1, 2, 1))
    Lp = l_polynomial_extract(exp_sums(G, hp.degree + 2, "torus"), 1, hp.degree)
    v = np_vs_hp(Lp, hp)
    assert v.passed and v.details["relation"] in ("equal", "above")


def test_gnp_small():
    rep = gnp_search(5, 1, 2, 1, 1, 1, 0, K=4, seed=7)
    assert rep.all_above and len(rep.samples) == 4
    again = gnp_search(5, 1, 2, 1, 1, 1, 0, K=4, seed=7)
    assert again.to_json() == rep.to_json()
