"""Exact exponential sums, L-polynomials and Newton/Hodge polygons for the
family G = t0^A f(t) + g(t) + P_B(1/t0) over finite fields."""

from __future__ import annotations

__version__ = "0.1.0"

from .cyclotomic import CycInt, CycRat, newton_polygon, pade_reconstruct, pi_valuation, series_exp
from .field import FieldElement, FieldSpec, build_field, extend_field
from .geometry import LatticePolytope, ab_polytope, hodge_closed_form, hodge_numbers_AS, normalized_volume
from .lfunction import (
    bound_check,
    exp_sum,
    exp_sums,
    gnp_search,
    l_polynomial_extract,
    lstar_rational,
    np_vs_hp,
    purity_check,
    toric_decomposition_check,
)
from .polynomial import ABPolynomial, LaurentPoly, assemble, sample_family

__all__ = [
    "ABPolynomial",
    "CycInt",
    "CycRat",
    "FieldElement",
    "FieldSpec",
    "LatticePolytope",
    "LaurentPoly",
    "ab_polytope",
    "assemble",
    "bound_check",
    "build_field",
    "exp_sum",
    "exp_sums",
    "extend_field",
    "gnp_search",
    "hodge_closed_form",
    "hodge_numbers_AS",
    "l_polynomial_extract",
    "lstar_rational",
    "newton_polygon",
    "normalized_volume",
    "np_vs_hp",
    "pade_reconstruct",
    "pi_valuation",
    "purity_check",
    "sample_family",
    "series_exp",
    "toric_decomposition_check",
]
