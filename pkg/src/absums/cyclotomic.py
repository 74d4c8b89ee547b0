"""Exact arithmetic in Z[zeta_p] and Q(zeta_p).

Elements are stored in the basis 1, z, ..., z^{p-2} (z = zeta_p) with the
relation z^{p-1} = -(1 + z + ... + z^{p-2}) applied eagerly, so equal numbers
have equal coefficient tuples.  Everything is arbitrary precision; the only
floating point is :func:`complex_embed`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

from .errors import EmptyInput, ReconstructionUnstable, ValuationOverflow

Scalar = Union[int, Fraction]


@dataclass(frozen=True)
class CycInt:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.p - 1:
            raise ValueError(f"expected {self.p - 1} coefficients, got {len(self.coeffs)}")

    # constructors ------------------------------------------------------
    @classmethod
    def zero(cls, p: int) -> CycInt:
        return cls(p, (0,) * (p - 1))

    @classmethod
    def from_int(cls, p: int, n: int) -> CycInt:
        return cls(p, (int(n),) + (0,) * (p - 2))

    @classmethod
    def from_power_counts(cls, p: int, counts: Sequence[int]) -> CycInt:
        """sum_r counts[r] * z^r for r in [0, p)."""
        if len(counts) != p:
            raise ValueError("need exactly p counts")
        top = int(counts[p - 1])
        return cls(p, tuple(int(c) - top for c in counts[: p - 1]))

    @classmethod
    def from_poly(cls, p: int, poly: Sequence[int]) -> CycInt:
        """Reduce an arbitrary integer polynomial in z."""
        full = [0] * p
        for i, c in enumerate(poly):
            full[i % p] += int(c)
        return cls.from_power_counts(p, full)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> CycInt:
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise ValueError("cyclotomic primes differ")
            return other
        if isinstance(other, int):
            return CycInt.from_int(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycInt(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> CycInt:
        return CycInt(self.p, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, tuple(a * other for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        full = [0] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        full[(i + j) % p] += a * b
        return CycInt.from_power_counts(p, full)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> CycInt:
        if e < 0:
            raise ValueError("negative power of a cyclotomic integer")
        result = CycInt.from_int(self.p, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = CycInt.from_int(self.p, other)
        if not isinstance(other, CycInt):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def galois(self, c: int) -> CycInt:
        """Image under the automorphism z -> z^c (c prime to p)."""
        if c % self.p == 0:
            raise ValueError("galois exponent must be prime to p")
        full = [0] * self.p
        for i, a in enumerate(self.coeffs):
            full[(i * c) % self.p] += a
        return CycInt.from_power_counts(self.p, full)

    def conjugate(self) -> CycInt:
        return self.galois(-1)

    def norm(self) -> int:
        """Field norm to Q: the product of all Galois conjugates."""
        result = self
        for c in range(2, self.p):
            result = result * self.galois(c)
        if not result.is_rational():
            raise ArithmeticError("norm is not rational")  # pragma: no cover
        return result.coeffs[0]

    def at_one(self) -> int:
        """Value of the basis representative at z = 1."""
        return sum(self.coeffs)

    def __repr__(self) -> str:
        return f"CycInt(p={self.p}, {list(self.coeffs)})"

    def to_json(self) -> dict:
        return {"p": self.p, "coeffs": [str(a) for a in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> CycInt:
        return cls(int(data["p"]), tuple(int(a) for a in data["coeffs"]))


@dataclass(frozen=True)
class CycRat:
    """numerator / denominator with denominator > 0 and coprime to the numerator's content."""

    numerator: CycInt
    denominator: int = 1

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        if math.gcd(self.numerator.content(), self.denominator) != 1:
            raise ValueError("CycRat not in lowest terms; use CycRat.make")

    @property
    def p(self) -> int:
        return self.numerator.p

    @classmethod
    def make(cls, numerator: CycInt, denominator: int = 1) -> CycRat:
        if denominator == 0:
            raise ZeroDivisionError("zero denominator")
        if denominator < 0:
            numerator, denominator = -numerator, -denominator
        g = math.gcd(numerator.content(), denominator)
        if g == 0:
            return cls(numerator, 1)
        if g > 1:
            numerator = CycInt(numerator.p, tuple(a // g for a in numerator.coeffs))
            denominator //= g
        return cls(numerator, denominator)

    @classmethod
    def from_value(cls, p: int, x: CycInt | CycRat | Scalar) -> CycRat:
        if isinstance(x, CycRat):
            return x
        if isinstance(x, CycInt):
            return cls(x, 1)
        x = Fraction(x)
        return cls.make(CycInt.from_int(p, x.numerator), x.denominator)

    def _coerce(self, other) -> CycRat:
        if isinstance(other, (CycRat, CycInt, int, Fraction)):
            return CycRat.from_value(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycRat.make(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> CycRat:
        return CycRat(-self.numerator, self.denominator)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycRat.make(self.numerator * other.numerator, self.denominator * other.denominator)

    __rmul__ = __mul__

    def inverse(self) -> CycRat:
        x = self.numerator
        if x.is_zero():
            raise ZeroDivisionError("inverse of zero")
        cofactor = CycInt.from_int(x.p, 1)
        for c in range(2, x.p):
            cofactor = cofactor * x.galois(c)
        norm = (x * cofactor).coeffs[0]
        return CycRat.make(cofactor * self.denominator, norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, (CycInt, int, Fraction)):
            other = CycRat.from_value(self.p, other)
        if not isinstance(other, CycRat):
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self) -> int:
        return hash((self.numerator, self.denominator))

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_integral(self) -> bool:
        return self.denominator == 1

    def __repr__(self) -> str:
        if self.denominator == 1:
            return repr(self.numerator)
        return f"({self.numerator!r})/{self.denominator}"


def cyc_from_character(p: int, t: int) -> CycInt:
    """zeta_p^t, i.e. the canonical additive character psi(t) = zeta_p^t."""
    counts = [0] * p
    counts[t % p] = 1
    return CycInt.from_power_counts(p, counts)


def zeta(p: int) -> CycInt:
    return cyc_from_character(p, 1)


# ---------------------------------------------------------------------------
# valuations


@dataclass(frozen=True)
class QAdicValuation:
    """A valuation measured in pi-units; ``ord_q`` rescales by q_log = s*(p-1)."""

    pi: float | int  # math.inf for zero
    q_log: int

    @property
    def is_infinite(self) -> bool:
        return self.pi == math.inf

    @property
    def ord_q(self) -> Fraction | float:
        if self.is_infinite:
            return math.inf
        return Fraction(self.pi, self.q_log)


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _divide_by_pi(x: CycInt) -> CycInt:
    p = x.p
    k, r = divmod(x.at_one(), p)
    assert r == 0
    # x - k*Phi_p vanishes at 1; synthetic division by (X - 1)
    poly = [a - k for a in x.coeffs] + [-k]
    quotient = [0] * (p - 1)
    carry = 0
    for i in range(p - 1, 0, -1):
        carry += poly[i]
        quotient[i - 1] = carry
    return CycInt(p, tuple(quotient))


def pi_valuation(x: CycInt, s: int = 1, cap: int | None = None) -> QAdicValuation:
    """Valuation of x at pi = zeta_p - 1.

    x is divisible by pi iff x(1) = 0 mod p; the quotient is the exact
    division of x - (x(1)/p)*Phi_p by (X - 1).  ``cap`` bounds the answer
    on nonzero input and raises :class:`ValuationOverflow` when exceeded.
    """
    p = x.p
    q_log = s * (p - 1)
    if x.is_zero():
        return QAdicValuation(math.inf, q_log)
    g = x.content()
    v = (p - 1) * _vp_int(g, p)
    x = CycInt(p, tuple(a // g for a in x.coeffs))
    while x.at_one() % p == 0:
        x = _divide_by_pi(x)
        v += 1
        if cap is not None and v > cap:
            raise ValuationOverflow(f"pi-valuation exceeds cap {cap}")
    if cap is not None and v > cap:
        raise ValuationOverflow(f"pi-valuation exceeds cap {cap}")
    return QAdicValuation(v, q_log)


def complex_embed(x: CycInt | CycRat | int) -> complex:
    """Image under zeta_p -> exp(2 pi i / p).

    Absolute error is at most about (p-1) * max|a_i| * 1e-16 * 4 for a CycInt
    with coefficients a_i.
    """
    if isinstance(x, int):
        return complex(x)
    den = 1
    if isinstance(x, CycRat):
        x, den = x.numerator, x.denominator
    p = x.p
    roots = [cmath.exp(2j * math.pi * i / p) for i in range(p - 1)]
    re = math.fsum(float(a) * r.real for a, r in zip(x.coeffs, roots))
    im = math.fsum(float(a) * r.imag for a, r in zip(x.coeffs, roots))
    return complex(re, im) / den


def embed_error_bound(x: CycInt) -> float:
    return 4.0 * (x.p - 1) * max((abs(a) for a in x.coeffs), default=0) * 2.0**-52


# ---------------------------------------------------------------------------
# power series


def series_exp(
    sums: Sequence[CycInt | CycRat | Scalar], sign: int, M: int | None = None, p: int | None = None
) -> list[CycRat]:
    """Coefficients c_0..c_M of exp(sign * sum_{m<=M} S_m T^m / m).

    Uses k*c_k = sign * sum_{m=1}^{k} S_m c_{k-m}, c_0 = 1.
    """
    if M is None:
        M = len(sums)
    if M < 1:
        raise ValueError("horizon must be >= 1")
    if len(sums) < M:
        raise ValueError(f"need {M} sums, got {len(sums)}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if p is None:
        p = next((s.p for s in sums if isinstance(s, (CycInt, CycRat))), None)
        if p is None:
            raise ValueError("cannot infer p from integer sums; pass p=")
    S = [CycRat.from_value(p, s) for s in sums[:M]]
    c = [CycRat.from_value(p, 1)]
    for k in range(1, M + 1):
        acc = CycRat.from_value(p, 0)
        for m in range(1, k + 1):
            acc = acc + S[m - 1] * c[k - m]
        c.append(acc * Fraction(sign, k))
    return c


def log_power_sums(poly: Sequence[CycInt | CycRat | Scalar], M: int, p: int) -> list[CycRat]:
    """Power sums s_1..s_M of the reciprocal roots of a polynomial with constant term 1.

    Newton's identities: s_m = -m c_m - sum_{k=1}^{m-1} c_k s_{m-k}, so that
    ``series_exp(s, -1)`` recovers the polynomial.
    """
    c = [CycRat.from_value(p, a) for a in poly]
    if c[0] != CycRat.from_value(p, 1):
        raise ValueError("constant term must be 1")
    zero = CycRat.from_value(p, 0)
    coef = lambda k: c[k] if k < len(c) else zero  # noqa: E731
    s: list[CycRat] = []
    for m in range(1, M + 1):
        acc = coef(m) * (-m)
        for k in range(1, m):
            acc = acc - coef(k) * s[m - k - 1]
        s.append(acc)
    return s


# ---------------------------------------------------------------------------
# polynomials over Q(zeta_p), little-endian lists of CycRat


def _ptrim(a: list[CycRat]) -> list[CycRat]:
    while a and a[-1].is_zero():
        a.pop()
    return a


def _pdivmod(a: list[CycRat], b: list[CycRat]) -> tuple[list[CycRat], list[CycRat]]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    p = b[0].p
    zero = CycRat.from_value(p, 0)
    inv_lead = b[-1].inverse()
    quot = [zero] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        factor = a[-1] * inv_lead
        quot[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - factor * c
        a.pop()
        _ptrim(a)
    return quot, a


def _pmul(a: list[CycRat], b: list[CycRat]) -> list[CycRat]:
    if not a or not b:
        return []
    p = a[0].p
    out = [CycRat.from_value(p, 0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _ptrim(out)


def _psub(a: list[CycRat], b: list[CycRat]) -> list[CycRat]:
    n = max(len(a), len(b))
    if n == 0:
        return []
    p = (a or b)[0].p
    zero = CycRat.from_value(p, 0)
    return _ptrim([(a[i] if i < len(a) else zero) - (b[i] if i < len(b) else zero) for i in range(n)])


def pade_reconstruct(
    coeffs: Sequence[CycInt | CycRat | Scalar], dP: int, dQ: int, p: int | None = None
) -> tuple[list[CycRat], list[CycRat]]:
    """Rational function P/Q with deg P <= dP, deg Q <= dQ, Q(0) = 1, matching the series mod T^{M+1}.

    Extended Euclid on (T^{M+1}, series), stopped at the first remainder of
    degree <= dP; the cofactor is the denominator.
    """
    M = len(coeffs) - 1
    if dP < 0 or dQ < 0 or dP + dQ > M:
        raise ValueError(f"need dP + dQ <= M = {M}")
    if p is None:
        p = next((c.p for c in coeffs if isinstance(c, (CycInt, CycRat))), None)
        if p is None:
            raise ValueError("cannot infer p; pass p=")
    one = CycRat.from_value(p, 1)
    zero = CycRat.from_value(p, 0)
    series = [CycRat.from_value(p, c) for c in coeffs]

    r0 = [zero] * (M + 1) + [one]
    r1 = _ptrim(list(series))
    t0: list[CycRat] = []
    t1 = [one]
    while len(r1) - 1 > dP:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, _psub(t0, _pmul(q, t1))
    P, Q = r1, t1
    if not Q or Q[0].is_zero():
        raise ReconstructionUnstable("denominator vanishes at T = 0")
    scale = Q[0].inverse()
    P = [c * scale for c in P]
    Q = [c * scale for c in Q]
    if len(Q) - 1 > dQ:
        raise ReconstructionUnstable(f"denominator degree {len(Q) - 1} exceeds {dQ}")
    residual = _psub(P, _pmul(Q, series)[: M + 1])
    if residual:
        raise ReconstructionUnstable("P - Q*series does not vanish mod T^(M+1)")
    return P, Q


# ---------------------------------------------------------------------------
# Newton polygons


@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple[tuple[int, Fraction], ...]
    slopes: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.slopes)

    def heights(self) -> list[Fraction]:
        """Cumulative heights at abscissas 0..degree, starting from the first vertex."""
        out = [self.vertices[0][1]]
        for s in self.slopes:
            out.append(out[-1] + s)
        return out


def lower_convex_hull(points: Iterable[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    pts = sorted(set(points))
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the segment hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def polygon_from_points(points: Iterable[tuple[int, Fraction]]) -> NewtonPolygon:
    hull = lower_convex_hull(points)
    if not hull:
        raise EmptyInput("no finite points")
    slopes: list[Fraction] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1) / (x2 - x1)
        slopes.extend([slope] * (x2 - x1))
    return NewtonPolygon(tuple(hull), tuple(slopes))


def newton_polygon(coeffs: Sequence[CycInt], p: int, s: int = 1) -> NewtonPolygon:
    """q-adic Newton polygon of sum c_j T^j, q = p^s."""
    if not coeffs:
        raise EmptyInput("no coefficients")
    points = []
    for j, c in enumerate(coeffs):
        if isinstance(c, CycRat):
            if not c.is_integral():
                raise ValueError("Newton polygon needs integral coefficients")
            c = c.numerator
        v = pi_valuation(c, s)
        if not v.is_infinite:
            points.append((j, v.ord_q))
    if not points:
        raise EmptyInput("all coefficients vanish")
    if points[0][0] != 0:
        raise ValueError("constant coefficient must be nonzero")
    return polygon_from_points(points)


def polygon_from_slopes(slopes: Iterable[Fraction]) -> NewtonPolygon:
    ordered = sorted(Fraction(s) for s in slopes)
    points = [(0, Fraction(0))]
    for s in ordered:
        points.append((points[-1][0] + 1, points[-1][1] + s))
    return polygon_from_points(points)
