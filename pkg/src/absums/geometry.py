"""Exact convex geometry of small lattice polytopes.

Hulls are computed by brute-force facet enumeration over affinely independent
point subsets, which is fine for the handful of points and ambient
dimension <= 4 that Newton polytopes of desk-scale instances have.  All
arithmetic is in ``Fraction``; there is no floating point in this module.

Facet convention: a facet is ``a . x = b`` with ``a`` a primitive integer
vector and the polytope in ``a . x <= b``.  For a polytope containing the
origin, ``b >= 0``; facets with ``b > 0`` carry the functional ``a / b``
(equal to 1 on the facet), facets with ``b = 0`` pass through the origin.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from .cyclotomic import NewtonPolygon, polygon_from_slopes
from .errors import NegativeHodgeNumber, RegimeViolation, UnsupportedAB

Point = tuple[Fraction, ...]


def _as_point(v: Iterable) -> Point:
    return tuple(Fraction(c) for c in v)


def _rank(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [list(r) for r in rows]
    if not m:
        return 0
    rank, cols = 0, len(m[0])
    for c in range(cols):
        pivot = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def det(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            result = -result
        result *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result


def affine_dimension(points: Sequence[Sequence]) -> int:
    pts = [_as_point(p) for p in points]
    if not pts:
        return -1
    base = pts[0]
    return _rank([[a - b for a, b in zip(p, base)] for p in pts[1:]])


def _normal_through(points: Sequence[Point]) -> tuple[Fraction, ...]:
    """Normal of the hyperplane through k affinely independent points in R^k (cofactor expansion)."""
    k = len(points[0])
    diffs = [[a - b for a, b in zip(p, points[0])] for p in points[1:]]
    normal = []
    for j in range(k):
        minor = [[row[c] for c in range(k) if c != j] for row in diffs]
        normal.append((-1) ** j * det(minor) if minor else Fraction(1))
    return tuple(normal)


def _primitive(a: Sequence[Fraction], b: Fraction) -> tuple[tuple[int, ...], Fraction]:
    den = reduce(math.lcm, (x.denominator for x in a), 1)
    ints = [int(x * den) for x in a]
    g = reduce(math.gcd, ints, 0)
    return tuple(x // g for x in ints), b * den / g


@dataclass(frozen=True)
class Facet:
    normal: tuple[int, ...]
    offset: Fraction
    vertices: frozenset[int]

    @property
    def through_origin(self) -> bool:
        return self.offset == 0

    def functional(self) -> tuple[Fraction, ...]:
        """a / b, equal to 1 on the facet (only for facets not through the origin)."""
        if self.offset == 0:
            raise ValueError("facet passes through the origin")
        return tuple(Fraction(a) / self.offset for a in self.normal)

    def value(self, x: Sequence) -> Fraction:
        return sum((a * Fraction(c) for a, c in zip(self.normal, x)), Fraction(0))


@dataclass(frozen=True)
class Face:
    vertices: frozenset[int]
    dim: int


def _hull_full(points: list[Point]) -> list[tuple[tuple[int, ...], Fraction, frozenset[int]]]:
    """Facets (normal, offset, point indices) of a full-dimensional point set in R^k."""
    k = len(points[0])
    if k == 1:
        xs = [p[0] for p in points]
        lo, hi = min(xs), max(xs)
        return [
            ((1,), hi, frozenset(i for i, x in enumerate(xs) if x == hi)),
            ((-1,), -lo, frozenset(i for i, x in enumerate(xs) if x == lo)),
        ]
    seen: dict[tuple, tuple] = {}
    for combo in itertools.combinations(range(len(points)), k):
        sub = [points[i] for i in combo]
        if affine_dimension(sub) != k - 1:
            continue
        a = _normal_through(sub)
        b = sum((x * y for x, y in zip(a, sub[0])), Fraction(0))
        vals = [sum((x * y for x, y in zip(a, p)), Fraction(0)) - b for p in points]
        if all(v <= 0 for v in vals):
            pass
        elif all(v >= 0 for v in vals):
            a, b = tuple(-x for x in a), -b
        else:
            continue
        key = _primitive(a, b)
        if key not in seen:
            on = frozenset(i for i, v in enumerate(vals) if v == 0)
            seen[key] = on
    return [(a, b, on) for (a, b), on in seen.items()]


class LatticePolytope:
    """Convex hull of finitely many rational points.

    ``vertices`` are the extreme points in sorted order.  For full-dimensional
    polytopes ``facets`` lists the facet inequalities; lower-dimensional
    polytopes are handled through a coordinate projection that is injective on
    their affine hull, so face lattices and origin tests still work.
    """

    def __init__(self, points: Iterable[Sequence]):
        pts = sorted(set(_as_point(p) for p in points))
        if not pts:
            raise ValueError("empty point set")
        self.dim_ambient = len(pts[0])
        self.dim = affine_dimension(pts)
        proj_coords = self._projection(pts)
        proj = [tuple(p[c] for c in proj_coords) for p in pts]
        self._proj_coords = proj_coords

        if self.dim == 0:
            self.vertices: tuple[Point, ...] = (pts[0],)
            self._proj_facets: list = []
            self._proj_vertices = [proj[0]]
            self.facets: list[Facet] = []
            return

        raw = _hull_full(proj)
        # vertices are points that are the sole common point of the facets containing them
        vertex_idx = []
        for i in range(len(pts)):
            containing = [on for _, _, on in raw if i in on]
            common = reduce(frozenset.intersection, containing) if containing else frozenset()
            if common == {i}:
                vertex_idx.append(i)
        self.vertices = tuple(pts[i] for i in vertex_idx)
        self._proj_vertices = [proj[i] for i in vertex_idx]
        reindex = {old: new for new, old in enumerate(vertex_idx)}
        self._proj_facets = [
            (a, b, frozenset(reindex[i] for i in on if i in reindex)) for a, b, on in raw
        ]
        if self.dim == self.dim_ambient:
            self.facets = [Facet(a, b, on) for a, b, on in self._proj_facets]
        else:
            self.facets = []

    @staticmethod
    def _projection(pts: list[Point]) -> tuple[int, ...]:
        k = affine_dimension(pts)
        n = len(pts[0])
        diffs = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
        for cols in itertools.combinations(range(n), k):
            if _rank([[row[c] for c in cols] for row in diffs]) == k:
                return cols
        return tuple()  # pragma: no cover

    def __repr__(self) -> str:
        verts = [tuple(int(c) if c.denominator == 1 else c for c in v) for v in self.vertices]
        return f"LatticePolytope(dim={self.dim}, vertices={verts})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticePolytope) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.dim_ambient

    def contains(self, x: Sequence) -> bool:
        x = _as_point(x)
        if self.dim == 0:
            return x == self.vertices[0]
        if not self.is_full_dimensional:
            # must lie in the affine hull, then test in projected coordinates
            if affine_dimension(list(self.vertices) + [x]) != self.dim:
                return False
        px = tuple(x[c] for c in self._proj_coords)
        return all(sum((ai * xi for ai, xi in zip(a, px)), Fraction(0)) <= b for a, b, _ in self._proj_facets)

    # faces ------------------------------------------------------------------
    @cached_property
    def faces(self) -> list[Face]:
        """All nonempty faces (vertex index sets with dimension), including the polytope itself."""
        full = frozenset(range(len(self.vertices)))
        found = {full}
        frontier = {on for _, _, on in self._proj_facets}
        while frontier:
            found |= frontier
            nxt = set()
            for a, b in itertools.combinations(found, 2):
                inter = a & b
                if inter and inter not in found:
                    nxt.add(inter)
            frontier = nxt
        out = []
        for vs in found:
            out.append(Face(vs, affine_dimension([self.vertices[i] for i in vs])))
        out.sort(key=lambda f: (f.dim, sorted(f.vertices)))
        return out

    def face_contains_origin(self, face: Face) -> bool:
        zero = (Fraction(0),) * self.dim_ambient
        if not self.contains(zero):
            return False
        if face.vertices == frozenset(range(len(self.vertices))):
            return True
        pz = (Fraction(0),) * len(self._proj_coords)
        for a, b, on in self._proj_facets:
            if face.vertices <= on:
                if sum((ai * zi for ai, zi in zip(a, pz)), Fraction(0)) != b:
                    return False
        return True

    def face_equations(self, face: Face) -> list[tuple[tuple[int, ...], Fraction]]:
        """Projected facet equations cutting out ``face`` (empty for the whole polytope)."""
        return [(a, b) for a, b, on in self._proj_facets if face.vertices <= on]

    def point_on_face(self, face: Face, x: Sequence) -> bool:
        x = _as_point(x)
        if not self.contains(x):
            return False
        px = tuple(x[c] for c in self._proj_coords)
        return all(sum((ai * xi for ai, xi in zip(a, px)), Fraction(0)) == b for a, b in self.face_equations(face))

    # volume -----------------------------------------------------------------
    def _triangulate(self, face: Face) -> list[list[int]]:
        if len(face.vertices) == face.dim + 1:
            return [sorted(face.vertices)]
        apex = min(face.vertices)
        out = []
        for sub in self.faces:
            if sub.dim == face.dim - 1 and sub.vertices < face.vertices and apex not in sub.vertices:
                for simplex in self._triangulate(sub):
                    out.append(simplex + [apex])
        return out

    def triangulation(self) -> list[list[int]]:
        top = self.faces[-1]
        return self._triangulate(top)


def simplex_volume(vertices: Sequence[Sequence]) -> Fraction:
    """Normalized volume n! vol of a simplex in R^n: |det| of the edge vectors from the first vertex."""
    pts = [_as_point(v) for v in vertices]
    if len(pts) != len(pts[0]) + 1:
        raise ValueError("a simplex in R^n needs n + 1 vertices")
    return abs(det([[a - b for a, b in zip(v, pts[0])] for v in pts[1:]]))


def normalized_volume(P: LatticePolytope) -> Fraction | int:
    """(dim)! * vol(P) for full-dimensional P, 0 otherwise; an int when integral."""
    if not P.is_full_dimensional:
        return 0
    total = sum((simplex_volume([P.vertices[i] for i in s]) for s in P.triangulation()), Fraction(0))
    return int(total) if total.denominator == 1 else total


def newton_polytope_at_infinity(exponents: Iterable[Sequence[int]], dim: int | None = None) -> LatticePolytope:
    """conv({0} U exponents).  Accepts a LaurentPoly-like object with ``.terms`` too."""
    terms = getattr(exponents, "terms", None)
    if terms is not None:
        dim = exponents.n_vars
        exponents = list(terms.keys())
    exponents = [tuple(e) for e in exponents]
    if dim is None:
        if not exponents:
            raise ValueError("cannot infer dimension of an empty exponent set")
        dim = len(exponents[0])
    return LatticePolytope([(0,) * dim] + exponents)


# ---------------------------------------------------------------------------
# denominators, weights, Hodge numbers


def denominator(P: LatticePolytope) -> int:
    """Least D with D * (a/b) integral for every facet not through the origin."""
    D = 1
    for F in P.facets:
        if not F.through_origin:
            for c in F.functional():
                D = math.lcm(D, c.denominator)
    return D


def _weight_data(P: LatticePolytope) -> tuple[int, list[tuple[int, ...]], list[tuple[int, ...]]]:
    if not P.is_full_dimensional:
        raise ValueError("weight function needs a full-dimensional polytope")
    if not P.contains((0,) * P.dim_ambient):
        raise ValueError("weight function needs the origin in the polytope")
    D = denominator(P)
    outer = [tuple(int(D * c) for c in F.functional()) for F in P.facets if not F.through_origin]
    walls = [F.normal for F in P.facets if F.through_origin]
    return D, outer, walls


def weight(P: LatticePolytope, u: Sequence[int]) -> Fraction | float:
    """min{c >= 0 : u in c P}, or +inf outside the cone over P."""
    D, outer, walls = _weight_data(P)
    if any(sum(a * x for a, x in zip(w, u)) > 0 for w in walls):
        return math.inf
    k = max([0] + [sum(a * x for a, x in zip(c, u)) for c in outer])
    return Fraction(k, D)


@dataclass(frozen=True)
class HodgePolygon:
    slopes: tuple[Fraction, ...]
    hodge_numbers: dict = field(default_factory=dict, compare=False)

    @property
    def degree(self) -> int:
        return len(self.slopes)

    def polygon(self) -> NewtonPolygon:
        return polygon_from_slopes(self.slopes)

    def to_json(self) -> dict:
        poly = self.polygon()
        return {
            "slopes": [[str(s.numerator), str(s.denominator)] for s in self.slopes],
            "vertices": [[x, str(y)] for x, y in poly.vertices],
        }


def weight_counts(P: LatticePolytope, max_weight: int) -> tuple[int, list[int]]:
    """D and W(k) = #{u in Z^N : w(u) = k/D} for k = 0 .. max_weight*D."""
    D, outer, walls = _weight_data(P)
    N = P.dim_ambient
    ranges = []
    for i in range(N):
        coords = [v[i] for v in P.vertices]
        ranges.append(range(math.floor(min(coords) * max_weight), math.ceil(max(coords) * max_weight) + 1))
    grids = np.meshgrid(*[np.arange(r.start, r.stop, dtype=np.int64) for r in ranges], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    inside = np.ones(len(pts), dtype=bool)
    for w in walls:
        inside &= pts @ np.array(w, dtype=np.int64) <= 0
    pts = pts[inside]
    k = np.zeros(len(pts), dtype=np.int64)
    for c in outer:
        k = np.maximum(k, pts @ np.array(c, dtype=np.int64))
    top = max_weight * D
    counts = np.bincount(k[k <= top], minlength=top + 1)
    return D, [int(x) for x in counts]


def hodge_numbers_AS(P: LatticePolytope) -> HodgePolygon:
    """Torus Hodge polygon from lattice-point weights.

    H(k) = sum_{i=0}^{N} (-1)^i C(N, i) W(k - iD), slopes k/D with multiplicity
    H(k); the total must equal the normalized volume.
    """
    N = P.dim_ambient
    D, W = weight_counts(P, N)
    H = {}
    for k in range(N * D + 1):
        h = sum((-1) ** i * math.comb(N, i) * W[k - i * D] for i in range(N + 1) if k - i * D >= 0)
        if h < 0:
            raise NegativeHodgeNumber(f"H({k}) = {h}")
        if h:
            H[Fraction(k, D)] = h
    total = sum(H.values())
    vol = normalized_volume(P)
    if total != vol:
        raise NegativeHodgeNumber(f"Hodge numbers sum to {total}, normalized volume is {vol}")
    slopes = tuple(s for s in sorted(H) for _ in range(H[s]))
    return HodgePolygon(slopes, H)


def hodge_closed_form(d: int, n: int, variant: str = "torus", A: int = 1, B: int = 1) -> HodgePolygon:
    """Explicit A = B = 1 Hodge slopes: r + {r} and r + 1 - {r}, r = sum(j_i)/d.

    ``variant="torus"`` ranges over 0 <= j_i <= d-1, ``"affine"`` over 1 <= j_i <= d-1.
    """
    if (A, B) != (1, 1):
        raise UnsupportedAB(f"closed form only for A = B = 1, got ({A}, {B})")
    if variant not in ("torus", "affine"):
        raise ValueError(variant)
    lo = 0 if variant == "torus" else 1
    slopes = []
    for js in itertools.product(range(lo, d), repeat=n):
        r = Fraction(sum(js), d)
        frac = r - math.floor(r)
        slopes += [r + frac, r + 1 - frac]
    slopes.sort()
    H: dict = {}
    for s in slopes:
        H[s] = H.get(s, 0) + 1
    return HodgePolygon(tuple(slopes), H)


# ---------------------------------------------------------------------------
# the (A, B) polytopes


def _unit(n: int, i: int, scale) -> list:
    v = [0] * n
    v[i] = scale
    return v


def ab_polytope(A: int, B: int, d: int, n: int) -> LatticePolytope:
    """Simplex with vertices (-B,0..), (A,0..), (A, d e_i)."""
    verts = [[-B] + [0] * n, [A] + [0] * n] + [[A] + _unit(n, i, d) for i in range(n)]
    return LatticePolytope(verts)


def ab_facial_decomposition(A: int, B: int, d: int, n: int) -> dict[str, LatticePolytope]:
    """Delta = Delta_1 U Delta_2 with the cone pieces over the two outer facets."""
    top = [[A] + _unit(n, i, d) for i in range(n)]
    zero = [0] * (n + 1)
    return {
        "delta": ab_polytope(A, B, d, n),
        "delta1": LatticePolytope([zero, [A] + [0] * n] + top),
        "delta2": LatticePolytope([[-B] + [0] * n, zero] + top),
    }


def ab_delta_complex(A: int, B: int, d: int, e: int, h: int, n: int) -> dict:
    """Polytopes Delta_1..Delta_5 for G = t0^A f + g + P_h(1/t0) with deg g = e, deg P = h.

    Requires d > e >= h d / (A + h).  Delta_3 = Delta_4 minus Delta_5; the
    returned volumes are normalized ((n+1)! vol) and exact.
    """
    if not (d > e >= 0 and h >= 0 and e * (A + h) >= h * d):
        raise RegimeViolation(f"need d > e >= hd/(A+h); got d={d}, e={e}, h={h}, A={A}")
    N = n + 1
    zero = [0] * N
    c = Fraction(e * A, d - e)
    top_d = [[A] + _unit(n, i, d) for i in range(n)]
    top_e = [[0] + _unit(n, i, e) for i in range(n)]
    polys = {
        "delta1": LatticePolytope([zero, [A] + [0] * n] + top_d),
        "delta2": LatticePolytope([[-h] + [0] * n, zero] + top_e),
        "delta3": LatticePolytope([zero] + top_d + top_e),
        "delta4": LatticePolytope([zero, [-c] + [0] * n] + top_d),
        "delta5": LatticePolytope([zero, [-c] + [0] * n] + top_e),
    }
    polys["delta"] = LatticePolytope(
        [zero, [A] + [0] * n, [-h] + [0] * n] + top_d + top_e
    )
    vols = {k: Fraction(normalized_volume(P)) for k, P in polys.items()}
    nested = all(polys["delta4"].contains(v) for v in polys["delta5"].vertices)
    if not nested:
        raise RegimeViolation("Delta_5 is not contained in Delta_4")
    if vols["delta3"] != vols["delta4"] - vols["delta5"]:
        raise ArithmeticError("vol(Delta_3) != vol(Delta_4) - vol(Delta_5)")
    return {"polytopes": polys, "volumes": vols, "delta5_in_delta4": nested}


def betti_bound_theorem1(A: int, B: int, d: int, n: int) -> int:
    """(A+B)(d-1)^n, checked against the alternating sum of coordinate-slice volumes of Delta."""
    closed = (A + B) * (d - 1) ** n
    P = ab_polytope(A, B, d, n)
    alt = 0
    for k in range(n + 1):
        for S in itertools.combinations(range(1, n + 1), k):
            keep = [i for i in range(n + 1) if i not in S]
            # the slice {w_i = 0, i in S} is a face of Delta; measure it in the remaining coordinates
            face = [tuple(v[i] for i in keep) for v in P.vertices if all(v[i] == 0 for i in S)]
            alt += (-1) ** k * Fraction(normalized_volume(LatticePolytope(face)))
    if alt != closed:
        raise ArithmeticError(f"inclusion-exclusion gives {alt}, closed form {closed}")
    return closed


def degree_bound_theorem3(A: int, d: int, e: int, h: int, n: int) -> Fraction | int:
    """(A + eA/(d-e)) (d+1)^n - (eA/(d-e) - h) (e+1)^n, exact."""
    if not (d > e >= 0 and h >= 0 and e * (A + h) >= h * d):
        raise RegimeViolation(f"need d > e >= hd/(A+h); got d={d}, e={e}, h={h}, A={A}")
    c = Fraction(e * A, d - e)
    value = (A + c) * (d + 1) ** n - (c - h) * (e + 1) ** n
    return int(value) if value.denominator == 1 else value


def as_degree_bound(A: int, d: int, e: int, h: int, k: int) -> Fraction:
    """(A + eA/(d-e)) d^k - (eA/(d-e) - h) e^k: the torus degree bound for a k-variable slice."""
    c = Fraction(e * A, d - e)
    return (A + c) * d**k - (c - h) * e**k
