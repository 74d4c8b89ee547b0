"""Finite fields F_{p^s} in a polynomial basis.

Elements are coefficient vectors over F_p (little-endian in the power basis of
the generator ``x``).  Each element also has an integer *code*
``sum(c_i * p**i)``, which is the canonical enumeration order and the index
used by the vectorized tables in :class:`FieldTables`.

The pure-Python arithmetic here is the slow, obviously-correct path.  The hot
loops (exponential sums, zero searches) run on :class:`FieldTables`, which
stores discrete log / antilog / trace tables as numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import FieldMismatch, NoIrreducibleFound, NoRootFound, NotPrime

MAX_DEGREE = 12
# beyond this degree irreducibility is decided by Rabin's test instead of trial division
TRIAL_DIVISION_MAX_DEGREE = 6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense polynomials over F_p, little-endian coefficient lists


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _trim(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        factor = a[-1] * inv_lead % p
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base: Sequence[int], e: int, mod: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, mod, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), mod, p)
        base = _pmod(_pmul(base, base, p), mod, p)
        e >>= 1
    return result


def _monic_from_code(code: int, degree: int, p: int) -> list[int]:
    coeffs = []
    for _ in range(degree):
        coeffs.append(code % p)
        code //= p
    return coeffs + [1]


def _irreducible_by_trial_division(modulus: Sequence[int], p: int) -> bool:
    s = len(modulus) - 1
    for k in range(1, s // 2 + 1):
        for code in range(p**k):
            if not _pmod(modulus, _monic_from_code(code, k, p), p):
                return False
    return True


def _irreducible_by_rabin(modulus: Sequence[int], p: int) -> bool:
    s = len(modulus) - 1
    x = [0, 1]
    if _psub(_ppowmod(x, p**s, modulus, p), x, p):
        return False
    for r in prime_factors(s):
        h = _psub(_ppowmod(x, p ** (s // r), modulus, p), x, p)
        if len(_pgcd(modulus, h, p)) != 1:
            return False
    return True


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial over F_p (little-endian coefficients)."""
    s = len(modulus) - 1
    if s <= 1:
        return s == 1
    if s <= TRIAL_DIVISION_MAX_DEGREE:
        return _irreducible_by_trial_division(modulus, p)
    return _irreducible_by_rabin(modulus, p)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """The field F_p[x]/(modulus) with q = p**s elements."""

    p: int
    s: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(self.p)
        if len(self.modulus) != self.s + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree s")
        if self.s > 1 and not is_irreducible(self.modulus, self.p):
            raise ValueError(f"modulus {self.modulus} is reducible over F_{self.p}")

    @property
    def q(self) -> int:
        return self.p**self.s

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, s={self.s}, modulus={list(self.modulus)})"

    # constructors -----------------------------------------------------
    def __call__(self, value: int | Sequence[int] | FieldElement) -> FieldElement:
        if isinstance(value, FieldElement):
            if value.owner != self:
                raise FieldMismatch(f"{value!r} does not belong to {self!r}")
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElement(self, (int(value) % self.p,) + (0,) * (self.s - 1))
        coeffs = [int(c) % self.p for c in value]
        if len(coeffs) > self.s:
            coeffs = _pmod(coeffs, self.modulus, self.p)
        coeffs = coeffs + [0] * (self.s - len(coeffs))
        return FieldElement(self, tuple(coeffs))

    def from_code(self, code: int) -> FieldElement:
        coeffs = []
        for _ in range(self.s):
            coeffs.append(code % self.p)
            code //= self.p
        return FieldElement(self, tuple(coeffs))

    @property
    def zero(self) -> FieldElement:
        return self(0)

    @property
    def one(self) -> FieldElement:
        return self(1)

    @property
    def gen(self) -> FieldElement:
        """The class of ``x`` (equal to -modulus[0] when s = 1)."""
        return self([0, 1])

    @cached_property
    def basis_traces(self) -> tuple[int, ...]:
        """Tr(x^i) for i < s, computed by summing Frobenius conjugates."""
        out = []
        for i in range(self.s):
            out.append(_frobenius_trace(self.gen**i))
        return tuple(out)

    def elements(self, units_only: bool = False) -> Iterator[FieldElement]:
        return enumerate_field(self, units_only)


def _frobenius_trace(x: FieldElement) -> int:
    total = x.owner.zero
    y = x
    for _ in range(x.owner.s):
        total = total + y
        y = y**x.owner.p
    if any(total.coeffs[1:]):
        raise RuntimeError("trace left F_p; modulus is not irreducible")
    return total.coeffs[0]


@dataclass(frozen=True, eq=False)
class FieldElement:
    owner: FieldSpec
    coeffs: tuple[int, ...]

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.owner != self.owner:
                raise FieldMismatch(f"cannot combine elements of {self.owner} and {other.owner}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.owner(int(other))
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer)):
            other = self.owner(int(other))
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.owner == other.owner and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.owner.p, self.owner.modulus, self.coeffs))

    def __repr__(self) -> str:
        return f"FieldElement({list(self.coeffs)} in F_{self.owner.p}^{self.owner.s})"

    @property
    def code(self) -> int:
        return sum(c * self.owner.p**i for i, c in enumerate(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.owner.p
        return FieldElement(self.owner, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> FieldElement:
        p = self.owner.p
        return FieldElement(self.owner, tuple(-a % p for a in self.coeffs))

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
        return self.owner(_pmod(_pmul(self.coeffs, other.coeffs, self.owner.p), self.owner.modulus, self.owner.p))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> FieldElement:
        if e < 0:
            return self.inverse() ** (-e)
        result = self.owner.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        return self ** (self.owner.q - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def frobenius(self, k: int = 1) -> FieldElement:
        return self ** (self.owner.p**k)


# ---------------------------------------------------------------------------
# operations


@lru_cache(maxsize=None)
def build_field(p: int, s: int) -> FieldSpec:
    """F_{p^s} with the lexicographically smallest monic irreducible modulus.

    Candidates ``x^s + c_{s-1} x^{s-1} + ... + c_0`` are ordered by the code
    ``sum(c_i p^i)``, i.e. lexicographically from the highest coefficient down.
    """
    if not is_prime(p):
        raise NotPrime(p)
    if not 1 <= s <= MAX_DEGREE:
        raise ValueError(f"extension degree must lie in [1, {MAX_DEGREE}], got {s}")
    for code in range(p**s):
        candidate = _monic_from_code(code, s, p)
        if s == 1 or is_irreducible(candidate, p):
            return FieldSpec(p, s, tuple(candidate))
    raise NoIrreducibleFound(f"no irreducible polynomial of degree {s} over F_{p}")


@dataclass(frozen=True)
class FieldEmbedding:
    """Injective ring map ``base -> target`` sending the base generator to ``root``."""

    base: FieldSpec
    target: FieldSpec
    root: FieldElement

    def __call__(self, x: FieldElement | int) -> FieldElement:
        if isinstance(x, (int, np.integer)):
            return self.target(int(x))
        if x.owner != self.base:
            raise FieldMismatch(f"{x!r} is not in {self.base!r}")
        out = self.target.zero
        power = self.target.one
        for c in x.coeffs:
            if c:
                out = out + power * c
            power = power * self.root
        return out


@lru_cache(maxsize=None)
def extend_field(base: FieldSpec, m: int) -> tuple[FieldSpec, FieldEmbedding]:
    """Degree-m extension of ``base`` and the embedding of ``base`` into it.

    The extension is ``build_field(p, s*m)``; the embedding sends the base
    generator to the smallest (by code) root of the base modulus.
    """
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    target = build_field(base.p, base.s * m)
    if base.s == 1:
        # prime field: constants map to constants
        return target, FieldEmbedding(base, target, target(base.gen.coeffs[0]))
    for code in range(target.q):
        r = target.from_code(code)
        value = target.zero
        for c in reversed(base.modulus):
            value = value * r + c
        if value.is_zero():
            return target, FieldEmbedding(base, target, r)
    raise NoRootFound(f"{base!r} has no root in {target!r}")


def trace_to_prime(x: FieldElement) -> int:
    """Absolute trace Tr_{F_{p^s}/F_p}(x) as an integer in [0, p)."""
    return sum(c * t for c, t in zip(x.coeffs, x.owner.basis_traces)) % x.owner.p


def relative_trace(x: FieldElement, base_degree: int) -> FieldElement:
    """Tr_{F_{p^S}/F_{p^b}}(x) = sum of x^{p^{b j}} for j < S/b, as an element of x's field."""
    S = x.owner.s
    if S % base_degree:
        raise ValueError("base degree must divide the field degree")
    total = x.owner.zero
    y = x
    for _ in range(S // base_degree):
        total = total + y
        y = y.frobenius(base_degree)
    return total


def enumerate_field(field: FieldSpec, units_only: bool = False) -> Iterator[FieldElement]:
    start = 1 if units_only else 0
    for code in range(start, field.q):
        yield field.from_code(code)


def chunk_bounds(total: int, chunks: int) -> list[tuple[int, int]]:
    """Split ``range(total)`` into ``chunks`` contiguous pieces, larger pieces first."""
    chunks = max(1, min(chunks, total)) if total else 1
    size, extra = divmod(total, chunks)
    out, start = [], 0
    for i in range(chunks):
        stop = start + size + (1 if i < extra else 0)
        out.append((start, stop))
        start = stop
    return out


def enumerate_chunks(field: FieldSpec, chunks: int, units_only: bool = False) -> list[list[FieldElement]]:
    items = list(enumerate_field(field, units_only))
    return [items[a:b] for a, b in chunk_bounds(len(items), chunks)]


# ---------------------------------------------------------------------------
# vectorized tables


def _mul_matrix(c: FieldElement) -> np.ndarray:
    """Matrix over F_p of y -> c*y acting on coefficient vectors (columns = images of x^j)."""
    F = c.owner
    cols = [(c * F.gen**j).coeffs for j in range(F.s)]
    return np.array(cols, dtype=np.int64).T


@dataclass(frozen=True)
class FieldTables:
    """Discrete log / antilog / trace tables for F_{p^S}.

    With N = q - 1 and ``g`` a fixed primitive element:

    * ``exp_code[k]``  - code of g^k,  0 <= k < N
    * ``exp_digits[k]`` - coefficient vector of g^k (shape N x S, int8)
    * ``log[c]``       - discrete log of the element with code c (log[0] = -1)
    * ``trace[k]``     - absolute trace of g^k in [0, p)
    """

    spec: FieldSpec
    generator: FieldElement
    exp_code: np.ndarray = field(repr=False)
    exp_digits: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)
    trace: np.ndarray = field(repr=False)

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def q(self) -> int:
        return self.spec.q

    @property
    def order(self) -> int:
        return self.spec.q - 1

    def log_of(self, x: FieldElement) -> int:
        if x.owner != self.spec:
            raise FieldMismatch(f"{x!r} is not in {self.spec!r}")
        if x.is_zero():
            raise ZeroDivisionError("log of zero")
        return int(self.log[x.code])


def find_primitive_element(F: FieldSpec) -> FieldElement:
    """Smallest element (by code) generating the multiplicative group."""
    N = F.q - 1
    if N == 1:
        return F.one
    primes = prime_factors(N)
    for code in range(1, F.q):
        g = F.from_code(code)
        if all(g ** (N // r) != F.one for r in primes):
            return g
    raise RuntimeError(f"no primitive element in {F!r}")  # pragma: no cover


@lru_cache(maxsize=16)
def field_tables(F: FieldSpec) -> FieldTables:
    p, S, N = F.p, F.s, F.q - 1
    g = find_primitive_element(F)
    weights = p ** np.arange(S, dtype=np.int64)

    # g^0 .. g^{N-1} by doubling: powers[k:2k] = g^k * powers[0:k], a linear map on digits
    digits = np.zeros((1, S), dtype=np.int64)
    digits[0, 0] = 1
    gk = g
    while len(digits) < N:
        block = (digits @ _mul_matrix(gk).T) % p
        digits = np.concatenate([digits, block])
        gk = gk * gk
    digits = digits[:N]

    exp_code = digits @ weights
    log = np.full(F.q, -1, dtype=np.int64)
    log[exp_code] = np.arange(N, dtype=np.int64)
    if (log[1:] < 0).any():
        raise RuntimeError("antilog table is not a bijection; generator is not primitive")
    trace = (digits @ np.array(F.basis_traces, dtype=np.int64)) % p
    return FieldTables(
        spec=F,
        generator=g,
        exp_code=exp_code,
        exp_digits=digits.astype(np.int8),
        log=log,
        trace=trace.astype(np.int8),
    )
