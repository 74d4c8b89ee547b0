"""Exponential sums, L-polynomials and the theorem checks built on them.

Sums are exact elements of Z[zeta_p].  The L-function of a family of sums is
exp(sum_m S_m T^m / m); with n_eff = (number of variables) - 1 the power
L^{(-1)^{n_eff}} is expected to be a polynomial, and its coefficients are
recovered with ``series_exp(S, (-1)^{n_eff})``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cyclotomic import (
    CycInt,
    CycRat,
    NewtonPolygon,
    complex_embed,
    embed_error_bound,
    newton_polygon,
    pade_reconstruct,
    series_exp,
)
from .errors import (
    DegreeMismatch,
    HypothesisUnmet,
    NonIntegral,
    NotPolynomial,
    RootFindingFailed,
)
from .geometry import (
    HodgePolygon,
    ab_polytope,
    betti_bound_theorem1,
    degree_bound_theorem3,
    hodge_numbers_AS,
)
from .io import SumCache, instance_hash
from .kernels import DEFAULT_BUDGET, character_sum, counts_by_t0
from .polynomial import (
    NEG_INF,
    ABPolynomial,
    LaurentPoly,
    is_affine_dwork_regular,
    is_deligne,
    restrict_subset,
    sample_family,
)

DOMAINS = ("affine", "torus", "subset")
PURITY_TOL = 1e-6


# ---------------------------------------------------------------------------
# sums


@dataclass(frozen=True)
class SumValue:
    m: int
    domain: str
    value: CycInt
    point_count: int
    method: str = ""

    def to_json(self) -> dict:
        z = complex_embed(self.value)
        return {
            "m": self.m,
            "domain": self.domain,
            "value": self.value.to_json(),
            "point_count": self.point_count,
            "complex": [z.real, z.imag],
            "abs": abs(z),
        }


def domain_label(domain: str, subset: Sequence[int] | None = None) -> str:
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}; expected one of {DOMAINS}")
    if domain == "subset":
        return "subset:" + ",".join(str(i) for i in sorted(set(subset or ())))
    return domain


def _laurent(G: ABPolynomial | LaurentPoly) -> LaurentPoly:
    return G.G if isinstance(G, ABPolynomial) else G


def exp_sum(
    G: ABPolynomial | LaurentPoly,
    m: int,
    domain: str = "affine",
    subset: Sequence[int] | None = None,
    *,
    method: str = "auto",
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
    cache: SumCache | None = None,
) -> SumValue:
    """Sum of psi(G(t)) over F_{q^m}: t0 always a unit, t_1..t_n as the domain says.

    ``affine``: t_i in F_{q^m}; ``torus``: t_i nonzero; ``subset``: t_i nonzero for
    i in ``subset`` and t_i = 0 otherwise.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    label = domain_label(domain, subset)
    L = _laurent(G)
    if domain == "subset":
        S = sorted(set(subset or ()))
        if any(i < 1 or i >= L.n_vars for i in S):
            raise ValueError(f"subset indices must lie in 1..{L.n_vars - 1}")
        L = restrict_subset(L, S)
        zero_allowed = [False] * L.n_vars
    else:
        zero_allowed = [False] + [domain == "affine"] * (L.n_vars - 1)
    Q = L.field.q**m
    count = (Q - 1) * math.prod(Q if z else Q - 1 for z in zero_allowed[1:])

    key = instance_hash(G) if cache is not None else None
    if cache is not None:
        hit = cache.get(key, m, label)
        if hit is not None:
            return SumValue(m, label, hit, count, "cache")
    value, used = character_sum(
        list(L.terms.items()), L.n_vars, L.field, m, zero_allowed, method=method, threads=threads, budget=budget
    )
    if cache is not None:
        cache.put(key, m, label, value)
    return SumValue(m, label, value, count, used)


def exp_sums(G, M: int, domain: str = "affine", subset=None, **kw) -> list[SumValue]:
    return [exp_sum(G, m, domain, subset, **kw) for m in range(1, M + 1)]


# ---------------------------------------------------------------------------
# verdicts


@dataclass
class CheckVerdict:
    theorem: str
    passed: bool
    lhs: object
    rhs: object
    tolerance: float | None = None
    notes: str = ""
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, CycInt):
                return x.to_json()
            if isinstance(x, Fraction):
                return str(x)
            return x

        out = {
            "theorem": self.theorem,
            "pass": self.passed,
            "lhs": enc(self.lhs),
            "rhs": enc(self.rhs),
            "tolerance": self.tolerance,
            "notes": self.notes,
        }
        if self.details:
            out["details"] = self.details
        return out


def toric_decomposition_check(G: ABPolynomial | LaurentPoly, m: int, **kw) -> CheckVerdict:
    """S_m(G) against the sum of S*_m(G_S) over all subsets S of {1..n}."""
    L = _laurent(G)
    lhs = exp_sum(G, m, "affine", **kw).value
    parts = {}
    rhs = CycInt.zero(L.field.p)
    for k in range(L.n_vars):
        for S in itertools.combinations(range(1, L.n_vars), k):
            v = exp_sum(G, m, "subset", S, **kw).value
            parts[",".join(map(str, S))] = v.to_json()
            rhs = rhs + v
    return CheckVerdict("Toric", lhs == rhs, lhs, rhs, details={"m": m, "strata": parts})


# ---------------------------------------------------------------------------
# L-polynomials


@dataclass(frozen=True)
class LPolynomial:
    coeffs: tuple[CycInt, ...]
    n_eff: int
    horizon: int
    p: int
    s: int = 1
    claimed_degree: int | None = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def sign(self) -> int:
        return (-1) ** self.n_eff

    @property
    def vanishing_checked_to(self) -> int:
        return self.horizon

    @property
    def q(self) -> int:
        return self.p**self.s

    def complex_coeffs(self) -> list[complex]:
        return [complex_embed(c) for c in self.coeffs]

    def newton_polygon(self) -> NewtonPolygon:
        return newton_polygon(list(self.coeffs), self.p, self.s)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "claimed_degree": self.claimed_degree,
            "n_eff": self.n_eff,
            "sign": self.sign,
            "horizon": self.horizon,
            "coeffs": [c.to_json() for c in self.coeffs],
            "complex": [[z.real, z.imag] for z in self.complex_coeffs()],
        }


def _series(sums: Sequence, n_eff: int, p: int | None) -> list[CycRat]:
    vals = [s.value if isinstance(s, SumValue) else s for s in sums]
    return series_exp(vals, (-1) ** n_eff, len(vals), p)


def _integral(coeffs: list[CycRat], upto: int) -> tuple[CycInt, ...]:
    out = []
    for k, c in enumerate(coeffs[: upto + 1]):
        if not c.is_integral():
            raise NonIntegral(f"coefficient of T^{k} has denominator {c.denominator}")
        out.append(c.numerator)
    return tuple(out)


def l_polynomial_extract(
    sums: Sequence[SumValue | CycInt | int], n_eff: int, D: int, p: int | None = None, s: int = 1
) -> LPolynomial:
    """L^{(-1)^{n_eff}} from S_1..S_M, asserting degree <= D; needs M >= D + 2 and a vanishing tail.

    Trailing zero coefficients are dropped, so ``degree`` may fall below the
    claimed D when the cohomology is smaller than the bound.
    """
    M = len(sums)
    if M < D + 2:
        raise ValueError(f"horizon M={M} must be at least D+2={D + 2}")
    c = _series(sums, n_eff, p)
    for k in range(D + 1, M + 1):
        if not c[k].is_zero():
            raise NotPolynomial(f"coefficient of T^{k} is nonzero (claimed degree {D})")
    top = max(k for k in range(D + 1) if not c[k].is_zero())
    coeffs = _integral(c, top)
    return LPolynomial(coeffs, n_eff, M, coeffs[0].p, s, claimed_degree=D)


def l_polynomial_detect(
    sums: Sequence[SumValue | CycInt | int], n_eff: int, max_degree: int, tail: int = 2, p: int | None = None, s: int = 1
) -> LPolynomial:
    """Polynomial whose last nonzero coefficient is followed by at least ``tail`` zeros up to the horizon.

    Certifies deg <= max_degree with the coefficients beyond the degree vanishing up to M.
    """
    M = len(sums)
    c = _series(sums, n_eff, p)
    last = max(k for k in range(M + 1) if not c[k].is_zero())
    if M - last < tail:
        raise NotPolynomial(f"only {M - last} vanishing coefficients after T^{last} up to M={M}; need {tail}")
    if last > max_degree:
        raise NotPolynomial(f"degree {last} exceeds the bound {max_degree}")
    coeffs = _integral(c, last)
    return LPolynomial(coeffs, n_eff, M, coeffs[0].p, s, claimed_degree=max_degree)


def detect_l_polynomial(
    G: ABPolynomial | LaurentPoly,
    domain: str,
    max_degree: int,
    tail: int = 2,
    min_horizon: int = 4,
    **kw,
) -> tuple[LPolynomial, list[SumValue]]:
    """Grow the horizon M until the series shows ``tail`` zeros after its last nonzero term.

    Stops at M = max_degree + tail at the latest and raises NotPolynomial there.
    """
    L = _laurent(G)
    n_eff = L.n_vars - 1
    p, s = L.field.p, L.field.s
    sums: list[SumValue] = []
    last_error: NotPolynomial | None = None
    for M in range(1, max_degree + tail + 1):
        sums.append(exp_sum(G, M, domain, **kw))
        if M < min(min_horizon, max_degree + tail):
            continue
        try:
            return l_polynomial_detect(sums, n_eff, max_degree, tail, p, s), sums
        except NotPolynomial as exc:
            last_error = exc
    raise last_error or NotPolynomial("no horizon reached")


@dataclass(frozen=True)
class RationalL:
    numerator: tuple[CycRat, ...]
    denominator: tuple[CycRat, ...]
    bound: int | None = None

    @property
    def degree(self) -> int:
        """deg P - deg Q."""
        return (len(self.numerator) - 1) - (len(self.denominator) - 1)

    def to_json(self) -> dict:
        enc = lambda c: {"numerator": c.numerator.to_json(), "denominator": str(c.denominator)}  # noqa: E731
        return {
            "P": [enc(c) for c in self.numerator],
            "Q": [enc(c) for c in self.denominator],
            "degree": self.degree,
            "bound": self.bound,
            "within_bound": None if self.bound is None else abs(self.degree) <= self.bound,
        }


def lstar_rational(
    sums: Sequence[SumValue | CycInt | int], dP: int, dQ: int, p: int | None = None, bound: int | None = None
) -> RationalL:
    """exp(sum S*_m T^m / m) as P/Q with deg P <= dP, deg Q <= dQ."""
    vals = [s.value if isinstance(s, SumValue) else s for s in sums]
    if dP + dQ > len(vals) - 1:
        raise ValueError(f"need dP + dQ <= M - 1 = {len(vals) - 1}")
    c = series_exp(vals, 1, len(vals), p)
    P, Q = pade_reconstruct(c, dP, dQ, p)
    return RationalL(tuple(P), tuple(Q), bound)


# ---------------------------------------------------------------------------
# purity


def _polish(coeffs: np.ndarray, z: complex, steps: int = 8) -> complex:
    """Newton steps on sum coeffs[k] z^k."""
    dcoeffs = np.array([k * c for k, c in enumerate(coeffs)][1:], dtype=complex)
    for _ in range(steps):
        f = np.polyval(coeffs[::-1], z)
        df = np.polyval(dcoeffs[::-1], z) if len(dcoeffs) else 0
        if df == 0:
            break
        step = f / df
        z -= step
        if abs(step) <= 1e-17 * max(1.0, abs(z)):
            break
    return z


def reciprocal_roots(Lp: LPolynomial) -> list[complex]:
    coeffs = np.array(Lp.complex_coeffs(), dtype=complex)
    if Lp.degree < 1:
        return []
    try:
        roots = np.roots(coeffs[::-1])
    except np.linalg.LinAlgError as exc:
        raise RootFindingFailed(str(exc)) from exc
    if len(roots) != Lp.degree or not np.all(np.isfinite(roots)) or np.any(roots == 0):
        raise RootFindingFailed("root finder returned degenerate roots")
    return [1 / _polish(coeffs, complex(r)) for r in roots]


def purity_check(Lp: LPolynomial, q: int, weight: int, tol: float = PURITY_TOL) -> CheckVerdict:
    """Every reciprocal root has |alpha| = q^{w/2} (relative tolerance), and the top coefficient matches exactly."""
    if Lp.degree < 1:
        raise ValueError("purity needs degree >= 1")
    target = q ** (weight / 2)
    alphas = reciprocal_roots(Lp)
    errs = [float(abs(abs(a) - target) / target) for a in alphas]
    numeric = bool(max(errs) <= tol)
    # exact: all Galois conjugates of the top coefficient have modulus q^{wD/2},
    # so its norm squared is q^{wD(p-1)}
    top = Lp.coeffs[-1]
    exact = top.norm() ** 2 == q ** (weight * Lp.degree * (Lp.p - 1))
    return CheckVerdict(
        "Purity",
        numeric and exact,
        [float(abs(a)) for a in alphas],
        target,
        tol,
        notes="" if exact else "norm of the top coefficient differs from q^(wD(p-1)/2)",
        details={"max_relative_error": max(errs), "top_coefficient_norm_exact": exact, "weight": weight},
    )


# ---------------------------------------------------------------------------
# bounds


def _deg(x) -> int:
    return 0 if x == NEG_INF else int(x)


def theorem_hypotheses(G: ABPolynomial, theorem: str, max_ext: int | None = None) -> list[tuple[str, bool, str]]:
    """(clause, holds, detail) for every hypothesis of the selected bound."""
    p, d, A, B = G.p, G.d, G.A, G.B
    e, h = G.e, G.h
    out: list[tuple[str, bool, str]] = [("gcd(d,p)=1", math.gcd(d, p) == 1, f"d={d}, p={p}")]
    if theorem == "T1":
        out.append(("gcd(AB,p)=1", math.gcd(A * B, p) == 1, f"A={A}, B={B}"))
        out.append(("deg(P_B)=B", h == B, f"deg P_B = {h}"))
        out.append(("deg(g)<Bd/(A+B)", e == NEG_INF or (A + B) * e < B * d, f"e={e}, Bd/(A+B)={Fraction(B * d, A + B)}"))
        v = is_deligne(G.f, max_ext)
        out.append(("f Deligne", v.regular and not v.truncated, str(v)))
    elif theorem == "T2":
        out.append(("gcd(AB,p)=1", math.gcd(A * B, p) == 1, f"A={A}, B={B}"))
        out.append(("deg(P_B)<=B", h <= B, f"deg P_B = {h}"))
        out.append(("deg(g)<Bd/(A+B)", e == NEG_INF or (A + B) * e < B * d, f"e={e}, Bd/(A+B)={Fraction(B * d, A + B)}"))
        v = is_affine_dwork_regular(G.f, max_ext)
        out.append(("f affine Dwork regular", v.regular and not v.truncated, str(v)))
    elif theorem == "T3":
        ee, hh = _deg(e), _deg(h)
        out.append(("gcd(A,p)=1", math.gcd(A, p) == 1, f"A={A}"))
        out.append(("d>e>=hd/(A+h)", d > ee and ee * (A + hh) >= hh * d, f"d={d}, e={ee}, h={hh}"))
        v = is_affine_dwork_regular(G.f, max_ext)
        out.append(("f affine Dwork regular", v.regular and not v.truncated, str(v)))
    else:
        raise ValueError(f"unknown theorem {theorem!r}")
    return out


def theorem_constant(G: ABPolynomial, theorem: str) -> Fraction | int:
    if theorem in ("T1", "T2"):
        return betti_bound_theorem1(G.A, G.B, G.d, G.n)
    return degree_bound_theorem3(G.A, G.d, _deg(G.e), _deg(G.h), G.n)


def twisted_sum(G: ABPolynomial, chi: int) -> complex:
    """sum chi(t0) psi(G(t)) over F_q^* x F_q^n with chi(g^k) = exp(2 pi i chi k / (q-1))."""
    L = G.G
    counts = counts_by_t0(list(L.terms.items()), L.n_vars, L.field, 1, [False] + [True] * G.n)
    N, p = counts.shape
    zeta = np.exp(2j * np.pi * np.arange(p) / p)
    chars = np.exp(2j * np.pi * chi * np.arange(N) / N)
    return complex(chars @ (counts @ zeta))


def bound_check(
    G: ABPolynomial, theorem: str, chi: int | None = None, max_ext: int | None = None, **kw
) -> CheckVerdict:
    """|S_1| against constant * q^{(n+1)/2}; refuses when a hypothesis fails."""
    hyps = theorem_hypotheses(G, theorem, max_ext)
    for clause, ok, detail in hyps:
        if not ok:
            raise HypothesisUnmet(clause)
    const = theorem_constant(G, theorem)
    rhs = float(const) * G.q ** ((G.n + 1) / 2)
    details = {"constant": str(const), "hypotheses": {c: d for c, _, d in hyps}}
    if chi is None:
        S = exp_sum(G, 1, "affine", **kw)
        lhs = abs(complex_embed(S.value))
        slack = embed_error_bound(S.value)
        details["S_1"] = S.value.to_json()
    else:
        lhs = abs(twisted_sum(G, chi))
        slack = 1e-9 * G.q ** (G.n + 1)
        details["chi"] = chi
    return CheckVerdict(theorem, lhs <= rhs + slack, lhs, rhs, slack, details=details)


# ---------------------------------------------------------------------------
# Newton vs Hodge


def np_vs_hp(Lp: LPolynomial | NewtonPolygon, hp: HodgePolygon) -> CheckVerdict:
    """Exact comparison of the Newton polygon with the Hodge polygon at every integer abscissa."""
    npoly = Lp.newton_polygon() if isinstance(Lp, LPolynomial) else Lp
    if npoly.degree != hp.degree:
        raise DegreeMismatch(f"Newton polygon has degree {npoly.degree}, Hodge polygon {hp.degree}")
    hpoly = hp.polygon()
    a, b = npoly.heights(), hpoly.heights()
    above = all(x >= y for x, y in zip(a, b))
    equal = a == b
    relation = "equal" if equal else ("above" if above else "violation")
    return CheckVerdict(
        "NPvsHP",
        above,
        [str(x) for x in npoly.slopes],
        [str(x) for x in hp.slopes],
        notes=relation,
        details={"relation": relation, "np_heights": [str(x) for x in a], "hp_heights": [str(x) for x in b]},
    )


@dataclass
class GNPReport:
    hp: HodgePolygon
    samples: list[dict]
    min_heights: list[Fraction]
    ordinary: bool
    all_above: bool

    def to_json(self) -> dict:
        return {
            "hp": self.hp.to_json(),
            "samples": self.samples,
            "min_np_heights": [str(x) for x in self.min_heights],
            "hp_heights": [str(x) for x in self.hp.polygon().heights()],
            "ordinary": self.ordinary,
            "all_above": self.all_above,
        }


def sample_seeds(seed: int, K: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.randrange(2**32) for _ in range(K)]


def gnp_search(
    p: int,
    s: int,
    d: int,
    A: int,
    B: int,
    n: int,
    e_max: int,
    K: int,
    seed: int,
    *,
    max_ext: int | None = None,
    **kw,
) -> GNPReport:
    """Torus Newton polygons of K sampled instances against the Hodge polygon of Delta."""
    hp = hodge_numbers_AS(ab_polytope(A, B, d, n))
    D = (A + B) * d**n
    if hp.degree != D:
        raise DegreeMismatch(f"Hodge polygon degree {hp.degree} != {D}")
    samples = []
    heights = []
    ordinary = False
    all_above = True
    for k, sd in enumerate(sample_seeds(seed, K)):
        G = sample_family(p, s, d, A, B, n, e_max, sd, max_ext=max_ext).instance
        sums = exp_sums(G, D + 2, "torus", **kw)
        Lp = l_polynomial_extract(sums, n, D, p, s)
        verdict = np_vs_hp(Lp, hp)
        npoly = Lp.newton_polygon()
        h = npoly.heights()
        heights.append(h)
        ordinary |= verdict.details["relation"] == "equal"
        all_above &= verdict.passed
        samples.append(
            {
                "index": k,
                "seed": sd,
                "np_slopes": [str(x) for x in npoly.slopes],
                "relation": verdict.details["relation"],
            }
        )
    mins = [min(col) for col in zip(*heights)] if heights else []
    return GNPReport(hp, samples, mins, ordinary, all_above)
