"""Counting kernels for additive character sums over F_{q^m}.

Both kernels return the multiset of absolute traces Tr(G(t)) mod p over the
domain, i.e. counts c_r with S = sum_r c_r zeta_p^r, so results are exact.
Since the trace is additive, Tr G(t) is the sum over monomials of
Tr(c_w t^w), and each of those is one lookup in a trace table indexed by the
discrete log.

``direct``  enumerates every point of the domain.

``fiber``   applies to G = t0^a f(t) + g(t) + c(t0).  It histograms
            (log f(t), Tr g(t)) once over the t-space and obtains, for every
            value of t0^a simultaneously, the trace distribution of
            t0^a f(t) by a cyclic cross-correlation with the trace table
            (computed by FFT on 16-bit limbs and rounded under a guard).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cyclotomic import CycInt
from .errors import AbsumsError, BudgetExceeded
from .field import FieldSpec, FieldTables, chunk_bounds, extend_field, field_tables

DEFAULT_BUDGET = 1 << 38
INNER_BLOCK = 1 << 16
CELLS = 1 << 21
LIMB = 1 << 16
ROUND_GUARD = 0.25


def default_threads() -> int:
    return os.cpu_count() or 1


@dataclass
class CompiledTerms:
    logc: np.ndarray  # discrete logs of the coefficients
    exps: np.ndarray  # (terms, vars)

    @property
    def size(self) -> int:
        return len(self.logc)


def _compile(terms: Sequence[tuple[Sequence[int], object]], emb, tables: FieldTables, nvars: int) -> CompiledTerms:
    logs = [tables.log_of(emb(c)) for _, c in terms]
    exps = [tuple(w) for w, _ in terms]
    return CompiledTerms(np.array(logs, dtype=np.int64), np.array(exps, dtype=np.int64).reshape(len(exps), nvars))


class _Space:
    """Product of coordinate ranges; a coordinate value is a discrete log, or -1 for zero."""

    def __init__(self, N: int, zero_allowed: Sequence[bool]):
        self.N = N
        self.ranges = [N + 1 if z else N for z in zero_allowed]
        self.offsets = [1 if z else 0 for z in zero_allowed]
        self.size = int(np.prod(self.ranges, dtype=object)) if self.ranges else 1

    def block(self, start: int, stop: int) -> np.ndarray:
        flat = np.arange(start, stop, dtype=np.int64)
        if not self.ranges:
            return np.zeros((len(flat), 0), dtype=np.int64)
        cols = np.unravel_index(flat, self.ranges)
        return np.stack([c - o for c, o in zip(cols, self.offsets)], axis=1).astype(np.int64)


def _term_logs(logs: np.ndarray, exps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each term: w . log t (shape points x terms) and a mask of terms vanishing because some t_i = 0."""
    zero = logs < 0
    lt = logs @ exps.T
    dead = (zero.astype(np.int64) @ (exps > 0).T.astype(np.int64)) > 0
    return lt, dead


# ---------------------------------------------------------------------------
# direct enumeration


def _direct_block(ct: CompiledTerms, tables: FieldTables, outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    N, p = tables.order, tables.p
    lt_out, dead_out = _term_logs(outer, ct.exps[:, :1])
    lt_in, dead_in = _term_logs(inner, ct.exps[:, 1:])
    acc = np.zeros((len(outer), len(inner)), dtype=np.int32)
    for j in range(ct.size):
        idx = (ct.logc[j] + lt_out[:, j : j + 1] + lt_in[None, :, j]) % N
        tr = tables.trace[idx].astype(np.int32)
        dead = dead_out[:, j : j + 1] | dead_in[None, :, j]
        if dead.any():
            tr = np.where(dead, 0, tr)
        acc += tr
    return np.bincount((acc % p).ravel(), minlength=p).astype(np.int64)


def _direct_block_by_outer(ct: CompiledTerms, tables: FieldTables, outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    N, p = tables.order, tables.p
    acc = np.zeros((len(outer), len(inner)), dtype=np.int32)
    lt_out, dead_out = _term_logs(outer, ct.exps[:, :1])
    lt_in, dead_in = _term_logs(inner, ct.exps[:, 1:])
    for j in range(ct.size):
        tr = tables.trace[(ct.logc[j] + lt_out[:, j : j + 1] + lt_in[None, :, j]) % N].astype(np.int32)
        acc += np.where(dead_out[:, j : j + 1] | dead_in[None, :, j], 0, tr)
    rows = np.arange(len(outer), dtype=np.int64)[:, None] * p
    return np.bincount((rows + acc % p).ravel(), minlength=len(outer) * p).reshape(len(outer), p)


def counts_by_t0(terms, nvars: int, base: FieldSpec, m: int, zero_allowed: Sequence[bool]) -> np.ndarray:
    """Trace counts split by t0 = g^k (row k), for twisting by a multiplicative character of t0."""
    if zero_allowed[0]:
        raise ValueError("t0 must range over units")
    E, emb = extend_field(base, m)
    T = field_tables(E)
    ct = _compile(terms, emb, T, nvars)
    outer = np.arange(T.order, dtype=np.int64)[:, None]
    inner_space = _Space(T.order, zero_allowed[1:])
    out = np.zeros((T.order, T.p), dtype=np.int64)
    if ct.size == 0:
        out[:, 0] = inner_space.size
        return out
    for a in range(0, inner_space.size, INNER_BLOCK):
        inner = inner_space.block(a, min(a + INNER_BLOCK, inner_space.size))
        rows = max(1, CELLS // len(inner))
        for o in range(0, T.order, rows):
            out[o : o + rows] += _direct_block_by_outer(ct, T, outer[o : o + rows], inner)
    return out


def direct_counts(
    terms, nvars: int, base: FieldSpec, m: int, zero_allowed: Sequence[bool], threads: int = 1
) -> np.ndarray:
    E, emb = extend_field(base, m)
    T = field_tables(E)
    ct = _compile(terms, emb, T, nvars)
    p = T.p
    if ct.size == 0:
        counts = np.zeros(p, dtype=np.int64)
        counts[0] = _Space(T.order, zero_allowed).size
        return counts
    outer_space = _Space(T.order, zero_allowed[:1])
    inner_space = _Space(T.order, zero_allowed[1:])
    outer_all = outer_space.block(0, outer_space.size)

    tasks = []
    for a, b in [(s, min(s + INNER_BLOCK, inner_space.size)) for s in range(0, inner_space.size, INNER_BLOCK)]:
        rows = max(1, CELLS // (b - a))
        for o in range(0, len(outer_all), rows):
            tasks.append((o, min(o + rows, len(outer_all)), a, b))

    def run(task):
        o0, o1, a, b = task
        return _direct_block(ct, T, outer_all[o0:o1], inner_space.block(a, b))

    return _run_tasks(run, tasks, threads, p)


def _run_tasks(run, tasks, threads: int, p: int) -> np.ndarray:
    total = np.zeros(p, dtype=np.int64)
    if threads <= 1 or len(tasks) <= 1:
        for t in tasks:
            total += run(t)
        return total
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(run, tasks):
            total += part
    return total


# ---------------------------------------------------------------------------
# fiber kernel


@dataclass
class Separation:
    a: int
    f: list  # (t-exponent, coeff)
    g: list
    c: list  # (t0-exponent, coeff)


def separate(terms, nvars: int) -> Separation | None:
    """Split terms as t0^a f(t) + g(t) + c(t0); None when the t0-exponents of the t-dependent terms are mixed."""
    f, g, c = [], [], []
    a = None
    for w, coeff in terms:
        w0, wt = w[0], tuple(w[1:])
        if not any(wt):
            c.append(((w0,), coeff))
        elif w0 == 0:
            g.append((wt, coeff))
        else:
            if a is not None and a != w0:
                return None
            a = w0
            f.append((wt, coeff))
    return Separation(1 if a is None else a, f, g, c)


def _hist_block(fc: CompiledTerms, gc: CompiledTerms, T: FieldTables, logs: np.ndarray) -> np.ndarray:
    """Counts indexed by r*(N+1) + (log f(t) + 1), r = Tr g(t) mod p."""
    N, p = T.order, T.p
    if fc.size:
        lt, dead = _term_logs(logs, fc.exps)
        acc = np.zeros((len(logs), T.spec.s), dtype=np.int32)
        for j in range(fc.size):
            digits = T.exp_digits[(fc.logc[j] + lt[:, j]) % N].astype(np.int32)
            acc += np.where(dead[:, j : j + 1], 0, digits)
        acc %= p
        powers = p ** np.arange(T.spec.s, dtype=np.int64)
        y = T.log[acc.astype(np.int64) @ powers].astype(np.int64)
    else:
        y = np.full(len(logs), -1, dtype=np.int64)
    r = np.zeros(len(logs), dtype=np.int64)
    if gc.size:
        lt, dead = _term_logs(logs, gc.exps)
        for j in range(gc.size):
            tr = T.trace[(gc.logc[j] + lt[:, j]) % N].astype(np.int64)
            r += np.where(dead[:, j], 0, tr)
        r %= p
    return np.bincount(r * (N + 1) + (y + 1), minlength=p * (N + 1)).astype(np.int64)


def _correlate(h: np.ndarray, ind_fft: np.ndarray, N: int) -> np.ndarray:
    """Exact integer C[x] = sum_y h[y] * ind[(x + y) mod N]."""
    out = np.zeros(N, dtype=np.int64)
    rest = h.copy()
    shift = 0
    while rest.any():
        limb = (rest % LIMB).astype(np.float64)
        rest //= LIMB
        raw = np.fft.irfft(np.conj(np.fft.rfft(limb)) * ind_fft, n=N)
        rounded = np.rint(raw)
        if np.abs(raw - rounded).max(initial=0.0) >= ROUND_GUARD:
            raise AbsumsError("FFT rounding guard failed")
        out += rounded.astype(np.int64) << shift
        shift += 16
    return out


def fiber_counts(
    sep: Separation, nvars: int, base: FieldSpec, m: int, zero_allowed_t: Sequence[bool], threads: int = 1
) -> np.ndarray:
    E, emb = extend_field(base, m)
    T = field_tables(E)
    N, p = T.order, T.p
    fc = _compile(sep.f, emb, T, nvars - 1)
    gc = _compile(sep.g, emb, T, nvars - 1)
    cc = _compile(sep.c, emb, T, 1)

    space = _Space(N, zero_allowed_t)
    tasks = chunk_bounds(space.size, max(1, -(-space.size // INNER_BLOCK)))

    def run(task):
        a, b = task
        return _hist_block(fc, gc, T, space.block(a, b))

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hist = sum(pool.map(run, tasks))
    else:
        hist = sum(run(t) for t in tasks)
    hist = hist.reshape(p, N + 1)
    zeros, h = hist[:, 0], hist[:, 1:]

    x0 = np.arange(N, dtype=np.int64)
    rho = np.zeros(N, dtype=np.int64)
    for j in range(cc.size):
        rho += T.trace[(cc.logc[j] + cc.exps[j, 0] * x0) % N]
    rho %= p
    u = (sep.a * x0) % N

    counts = np.zeros(p, dtype=np.int64)
    ind_fft = [np.fft.rfft((T.trace == s).astype(np.float64)) for s in range(p)]
    for r in range(p):
        if not h[r].any():
            continue
        for s in range(p):
            vals = _correlate(h[r], ind_fft[s], N)[u]
            res = (rho + r + s) % p
            counts += _grouped_sum(vals, res, p)
    n_rho = np.bincount(rho, minlength=p).astype(np.int64)
    for r in range(p):
        if zeros[r]:
            counts += np.roll(n_rho, r) * zeros[r]
    return counts


def _grouped_sum(vals: np.ndarray, keys: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros(p, dtype=np.int64)
    np.add.at(out, keys, vals)
    return out


# ---------------------------------------------------------------------------


def work_estimate(method: str, q: int, m: int, zero_allowed: Sequence[bool], p: int) -> int:
    Q = q**m
    sizes = [Q if z else Q - 1 for z in zero_allowed]
    if method == "direct":
        return int(np.prod(sizes, dtype=object))
    inner = int(np.prod(sizes[1:], dtype=object))
    return inner + p * p * (Q - 1) * max(1, (Q - 1).bit_length())


def character_sum(
    terms,
    nvars: int,
    base: FieldSpec,
    m: int,
    zero_allowed: Sequence[bool],
    method: str = "auto",
    threads: int = 1,
    budget: int = DEFAULT_BUDGET,
) -> tuple[CycInt, str]:
    """sum over the domain of zeta_p^{Tr G(t)}; returns (value, method used).

    ``terms`` is a sequence of (exponent vector, coefficient in ``base``).
    Coordinates flagged in ``zero_allowed`` run over F_{q^m}, the others over F_{q^m}^*.
    """
    terms = list(terms)
    for w, _ in terms:
        for i, z in enumerate(zero_allowed):
            if z and w[i] < 0:
                raise ValueError(f"coordinate {i} may vanish but has negative exponent")
    p = base.p
    sep = separate(terms, nvars) if nvars > 1 and not zero_allowed[0] else None
    if method == "auto":
        method = "direct"
        if sep is not None and work_estimate("fiber", base.q, m, zero_allowed, p) < work_estimate(
            "direct", base.q, m, zero_allowed, p
        ):
            method = "fiber"
    if method == "fiber" and sep is None:
        raise ValueError("fiber kernel needs G = t0^a f(t) + g(t) + c(t0) with t0 a unit")
    if method not in ("direct", "fiber"):
        raise ValueError(f"unknown method {method!r}")
    work = work_estimate(method, base.q, m, zero_allowed, p)
    if work > budget:
        raise BudgetExceeded(f"{method} kernel needs about {work} evaluations, budget is {budget}")
    if method == "direct":
        counts = direct_counts(terms, nvars, base, m, zero_allowed, threads)
    else:
        counts = fiber_counts(sep, nvars, base, m, zero_allowed[1:], threads)
    return CycInt.from_power_counts(p, [int(c) for c in counts]), method
