"""Vectorized searches for common zeros over F_{q^m}.

Points of the torus are enumerated by their discrete logs, so a monomial
``c * t^w`` evaluates to ``g^(log c + w . log t)`` and only a table lookup is
needed per term.  Sums of terms are formed on coefficient digits.  Each
polynomial filters the surviving candidates before the next one is evaluated,
so the cost is dominated by the first polynomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .field import FieldElement, FieldSpec, extend_field, field_tables

if TYPE_CHECKING:
    from .polynomial import LaurentPoly

BLOCK = 1 << 18


@dataclass(frozen=True)
class Verdict:
    """Bounded verdict of a zero search.

    ``regular`` means no witness over F_{q^m} for any m <= ``checked_up_to``.
    """

    regular: bool
    checked_up_to: int
    label: str = "Regular"
    witness: tuple[FieldElement, ...] | None = None
    witness_m: int | None = None
    truncated: bool = False
    notes: str = ""

    def __bool__(self) -> bool:
        return self.regular

    def __str__(self) -> str:
        if self.regular:
            return f"{self.label}UpTo({self.checked_up_to})"
        pt = ":".join(str(list(x.coeffs) if x.owner.s > 1 else x.coeffs[0]) for x in self.witness)
        return f"WitnessFound(({pt}), {self.witness_m})"

    def to_json(self) -> dict:
        out = {
            "verdict": str(self),
            "regular": self.regular,
            "checked_up_to": self.checked_up_to,
            "truncated": self.truncated,
        }
        if self.witness is not None:
            out["witness"] = [list(x.coeffs) for x in self.witness]
            out["witness_m"] = self.witness_m
        if self.notes:
            out["notes"] = self.notes
        return out


class SearchBudget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def fits(self, n: int) -> bool:
        return self.used + n <= self.limit

    def spend(self, n: int) -> None:
        self.used += n


def _compile(poly: LaurentPoly, emb, tables) -> tuple[np.ndarray, np.ndarray]:
    logs, exps = [], []
    for w, c in poly.terms.items():
        logs.append(tables.log_of(emb(c)))
        exps.append(w)
    return np.array(logs, dtype=np.int64), np.array(exps, dtype=np.int64).reshape(len(exps), poly.n_vars)


def _vanishes(log_pts: np.ndarray, compiled, tables) -> np.ndarray:
    """Boolean mask of points (rows of discrete logs) where the compiled polynomial is zero."""
    lc, ex = compiled
    if len(lc) == 0:
        return np.ones(len(log_pts), dtype=bool)
    order = tables.order
    acc = np.zeros((len(log_pts), tables.spec.s), dtype=np.int16)
    for c, w in zip(lc, ex):
        idx = (c + log_pts @ w) % order
        acc += tables.exp_digits[idx]
    return ~(acc % tables.p).any(axis=1)


def torus_common_zero(
    polys: Sequence[LaurentPoly],
    base: FieldSpec,
    m: int,
    fixed: Sequence[int] = (),
    budget: SearchBudget | None = None,
) -> tuple[FieldElement, ...] | None:
    """First point of (F_{q^m}^*)^N (coordinates in ``fixed`` set to 1) where all polys vanish.

    Points are ordered lexicographically by the discrete logs of the free
    coordinates, so the answer is deterministic.
    """
    nvars = polys[0].n_vars
    E, emb = extend_field(base, m)
    T = field_tables(E)
    free = [i for i in range(nvars) if i not in set(fixed)]
    compiled = [_compile(P, emb, T) for P in polys if P.terms]
    total = T.order ** len(free)
    if budget is not None:
        budget.spend(total)
    shape = (T.order,) * len(free)

    for start in range(0, total, BLOCK):
        flat = np.arange(start, min(start + BLOCK, total), dtype=np.int64)
        logs = np.zeros((len(flat), nvars), dtype=np.int64)
        if free:
            cols = np.unravel_index(flat, shape)
            for j, i in enumerate(free):
                logs[:, i] = cols[j]
        alive = np.arange(len(flat))
        for comp in compiled:
            if len(alive) == 0:
                break
            alive = alive[_vanishes(logs[alive], comp, T)]
        if len(alive):
            row = logs[alive[0]]
            return tuple(E.from_code(int(T.exp_code[k])) for k in row)
    return None


def projective_common_zero(
    polys: Sequence[LaurentPoly], base: FieldSpec, m: int, budget: SearchBudget | None = None
) -> tuple[FieldElement, ...] | None:
    """First point of P^{N-1}(F_{q^m}) where all (homogeneous) polys vanish.

    Decomposes projective space by the support of the point; on a support S
    the first coordinate of S is normalized to 1 and the rest range over the torus.
    """
    nvars = polys[0].n_vars
    E, _ = extend_field(base, m)
    for size in range(1, nvars + 1):
        for support in itertools.combinations(range(nvars), size):
            restricted = [P.restrict(support) for P in polys]
            pt = torus_common_zero(restricted, base, m, fixed=(0,), budget=budget)
            if pt is not None:
                full = [E.zero] * nvars
                for i, x in zip(support, pt):
                    full[i] = x
                return tuple(full)
    return None


def projective_point_count(q: int, m: int, nvars: int) -> int:
    Q = q**m
    return (Q**nvars - 1) // (Q - 1)
