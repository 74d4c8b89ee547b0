"""Command-line entry point: ``absums <subcommand> ...``.

Every subcommand prints a JSON report (schema 1).  Exit codes: 0 success,
2 when a theorem hypothesis fails or the work budget is exceeded (a report is
still written), 1 for any other error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .errors import AbsumsError, BudgetExceeded, HypothesisUnmet, UnsupportedAB
from .geometry import (
    ab_delta_complex,
    ab_facial_decomposition,
    ab_polytope,
    betti_bound_theorem1,
    degree_bound_theorem3,
    denominator,
    hodge_closed_form,
    hodge_numbers_AS,
    normalized_volume,
)
from .io import SumCache, atomic_write, instance_to_json, load_instance, resolve_cache_dir, save_instance
from .kernels import DEFAULT_BUDGET, default_threads
from .lfunction import (
    bound_check,
    detect_l_polynomial,
    exp_sum,
    exp_sums,
    gnp_search,
    l_polynomial_extract,
    np_vs_hp,
    purity_check,
    theorem_constant,
)
from .polynomial import (
    face_restrictions,
    is_affine_dwork_regular,
    is_commode,
    is_deligne,
    is_nondegenerate,
    sample_family,
)

SCHEMA = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _kernel_kw(args) -> dict:
    cache = None
    if not args.no_cache:
        root = resolve_cache_dir(args.cache_dir)
        if root is not None:
            cache = SumCache(root)
    return {"method": args.method, "threads": args.threads, "budget": args.budget, "cache": cache}


def _write_polygon_csv(path: str, polygons: dict[str, Sequence[Fraction]]) -> None:
    """Rows (polygon, index, cumulative height) for external plotting."""
    rows = [["polygon", "index", "height", "height_float"]]
    for name, heights in polygons.items():
        for i, h in enumerate(heights):
            rows.append([name, i, str(h), float(h)])
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        csv.writer(fh).writerows(rows)


# ---------------------------------------------------------------------------
# subcommands


def cmd_sum(args) -> dict:
    G = load_instance(args.instance)
    subset = None
    if args.domain == "subset":
        subset = [int(x) for x in args.subset.split(",") if x.strip()] if args.subset else []
    sv = exp_sum(G, args.m, args.domain, subset, **_kernel_kw(args))
    return {"instance": instance_to_json(G), "sum": sv.to_json()}


def cmd_lfun(args) -> dict:
    G = load_instance(args.instance)
    kw = _kernel_kw(args)
    if args.domain == "torus":
        D = args.degree if args.degree is not None else (G.A + G.B) * G.d**G.n
    else:
        D = args.degree if args.degree is not None else betti_bound_theorem1(G.A, G.B, G.d, G.n)
    M = args.M if args.M is not None else D + 2
    sums = exp_sums(G, M, args.domain, **kw)
    Lp = l_polynomial_extract(sums, G.n, D, G.p, G.field.s)
    npoly = Lp.newton_polygon()
    out: dict[str, Any] = {
        "instance": instance_to_json(G),
        "domain": args.domain,
        "sums": {str(s.m): s.to_json() for s in sums},
        "l_polynomial": Lp.to_json(),
        "newton_polygon": {"slopes": [str(x) for x in npoly.slopes], "heights": [str(x) for x in npoly.heights()]},
        "verdicts": [],
    }
    if Lp.degree >= 1:
        out["verdicts"].append(purity_check(Lp, G.q, G.n + 1, args.tol).to_json())
    polygons = {"newton": npoly.heights()}
    if args.domain == "torus":
        hp = hodge_numbers_AS(ab_polytope(G.A, G.B, G.d, G.n))
        out["hodge_polygon"] = hp.to_json()
        if hp.degree == npoly.degree:
            out["verdicts"].append(np_vs_hp(Lp, hp).to_json())
        polygons["hodge"] = hp.polygon().heights()
    if args.csv:
        _write_polygon_csv(args.csv, polygons)
    return out


def cmd_check(args) -> dict:
    G = load_instance(args.instance)
    kw = _kernel_kw(args)
    verdict = bound_check(G, args.theorem, chi=args.chi, max_ext=args.max_ext, **{k: v for k, v in kw.items()})
    out: dict[str, Any] = {"instance": instance_to_json(G), "theorem": args.theorem, "verdicts": [verdict.to_json()]}
    passed = verdict.passed
    if args.theorem in ("T1", "T2"):
        D = betti_bound_theorem1(G.A, G.B, G.d, G.n)
        M = args.M if args.M is not None else D + 2
        sums = exp_sums(G, M, "affine", **kw)
        Lp = l_polynomial_extract(sums, G.n, D, G.p, G.field.s)
    else:
        bound = math.floor(theorem_constant(G, "T3"))
        Lp, sums = detect_l_polynomial(G, "affine", bound, **kw)
        D = bound
    out["l_polynomial"] = Lp.to_json()
    out["degree_bound"] = D
    out["degree_within_bound"] = Lp.degree <= D
    passed &= Lp.degree <= D
    if Lp.degree >= 1:
        pv = purity_check(Lp, G.q, G.n + 1, args.tol)
        out["verdicts"].append(pv.to_json())
        out["pure_weight"] = G.n + 1 if pv.passed else None
    out["pass"] = passed
    return out


def cmd_gnp(args) -> dict:
    kw = _kernel_kw(args)
    kw.pop("cache")
    report = gnp_search(
        args.p, args.s, args.d, args.A, args.B, args.n, args.e_max, args.samples, args.seed, max_ext=args.max_ext, **kw
    )
    if args.csv:
        polys = {"hodge": report.hp.polygon().heights(), "min_newton": report.min_heights}
        _write_polygon_csv(args.csv, polys)
    return report.to_json()


def cmd_hp(args) -> dict:
    P = ab_polytope(args.A, args.B, args.d, args.n)
    hp = hodge_numbers_AS(P)
    out: dict[str, Any] = {
        "lattice": hp.to_json(),
        "degree": hp.degree,
        "expected_degree": (args.A + args.B) * args.d**args.n,
        "denominator": denominator(P),
    }
    try:
        closed = hodge_closed_form(args.d, args.n, "torus", args.A, args.B)
        out["closed_form"] = closed.to_json()
        out["agree"] = closed.slopes == hp.slopes
    except UnsupportedAB as exc:
        out["closed_form"] = {"error": "UnsupportedAB", "message": str(exc)}
        out["agree"] = None
    if args.csv:
        _write_polygon_csv(args.csv, {"hodge": hp.polygon().heights()})
    return out


def cmd_polytope(args) -> dict:
    A, B, d, n = args.A, args.B, args.d, args.n
    parts = ab_facial_decomposition(A, B, d, n)
    out: dict[str, Any] = {
        "delta": {
            "vertices": [[str(c) for c in v] for v in parts["delta"].vertices],
            "volume": str(normalized_volume(parts["delta"])),
            "denominators": {k: denominator(P) for k, P in parts.items()},
        },
        "theorem1_bound": betti_bound_theorem1(A, B, d, n),
    }
    if args.e is not None and args.h is not None:
        cx = ab_delta_complex(A, B, d, args.e, args.h, n)
        out["delta_complex"] = {k: str(v) for k, v in cx["volumes"].items()}
        out["delta5_in_delta4"] = cx["delta5_in_delta4"]
        out["theorem3_bound"] = str(degree_bound_theorem3(A, d, args.e, args.h, n))
    return out


def cmd_regularity(args) -> dict:
    G = load_instance(args.instance)
    M = args.max_ext
    out: dict[str, Any] = {"instance": instance_to_json(G)}
    out["affine_dwork_regular"] = is_affine_dwork_regular(G.f, M).to_json()
    out["deligne"] = is_deligne(G.f, M).to_json()
    out["nondegenerate"] = is_nondegenerate(G.G, max_ext=args.nondegenerate_ext).to_json()
    ok, report = is_commode(G.G, range(1, G.n + 1))
    out["commode"] = {"commode": ok, "slices": {",".join(map(str, k)): list(v) for k, v in report.items()}}
    if not G.PB[G.B].is_zero():
        G1, G2 = face_restrictions(G)
        out["face_restrictions"] = {"G1": repr(G1), "G2": repr(G2)}
    out["interiority"] = G.interiority_report()
    return out


def cmd_sample(args) -> dict:
    res = sample_family(
        args.p, args.s, args.d, args.A, args.B, args.n, args.e_max, args.seed, diagonal=args.diagonal, max_ext=args.max_ext
    )
    if args.write:
        save_instance(res.instance, args.write)
    return {
        "instance": instance_to_json(res.instance),
        "redraws": res.redraws,
        "regularity": res.regularity.to_json(),
        "written_to": args.write,
    }


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="absums", description="Exponential sums and L-functions of (A,B)-polynomials.")
    parser.add_argument("--version", action="version", version=f"absums {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p, kernel=True):
        p.add_argument("--output", "-o", help="also write the report to this path")
        if kernel:
            p.add_argument("--threads", type=int, default=default_threads())
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max point evaluations per sum")
            p.add_argument("--method", choices=("auto", "direct", "fiber"), default="auto")
            p.add_argument("--cache-dir", default=None, help="sum cache directory (overrides ABSUMS_CACHE_DIR)")
            p.add_argument("--no-cache", action="store_true")

    def family(p):
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--s", type=int, default=1)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--A", type=int, default=1)
        p.add_argument("--B", type=int, default=1)
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--e-max", type=int, default=0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-ext", type=int, default=None, help="regularity search bound")

    p = sub.add_parser("sum", help="one exponential sum")
    p.add_argument("--instance", required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--domain", choices=("affine", "torus", "subset"), default="affine")
    p.add_argument("--subset", default="", help="comma-separated indices in 1..n for --domain subset")
    common(p)
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("lfun", help="L-polynomial, Newton polygon, purity")
    p.add_argument("--instance", required=True)
    p.add_argument("--domain", choices=("affine", "torus"), default="affine")
    p.add_argument("--degree", type=int, default=None)
    p.add_argument("--M", type=int, default=None, help="horizon (default degree + 2)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--csv", default=None, help="polygon CSV output")
    common(p)
    p.set_defaults(func=cmd_lfun)

    p = sub.add_parser("check", help="bound check with hypothesis validation")
    p.add_argument("--instance", required=True)
    p.add_argument("--theorem", choices=("T1", "T2", "T3"), required=True)
    p.add_argument("--chi", type=int, default=None, help="twist by chi(g^k) = exp(2 pi i chi k/(q-1))")
    p.add_argument("--max-ext", type=int, default=None)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gnp", help="generic Newton polygon search")
    family(p)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--csv", default=None)
    common(p)
    p.set_defaults(func=cmd_gnp)

    p = sub.add_parser("hp", help="Hodge polygon by lattice count and closed form")
    for k in ("A", "B"):
        p.add_argument(f"--{k}", type=int, default=1)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--csv", default=None)
    common(p, kernel=False)
    p.set_defaults(func=cmd_hp)

    p = sub.add_parser("polytope", help="volumes, denominators and degree bounds")
    for k in ("A", "B"):
        p.add_argument(f"--{k}", type=int, default=1)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--e", type=int, default=None)
    p.add_argument("--h", type=int, default=None)
    common(p, kernel=False)
    p.set_defaults(func=cmd_polytope)

    p = sub.add_parser("regularity", help="regularity verdicts for an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--max-ext", type=int, default=None)
    p.add_argument("--nondegenerate-ext", type=int, default=3)
    common(p, kernel=False)
    p.set_defaults(func=cmd_regularity)

    p = sub.add_parser("sample", help="draw an instance from the family and write it to disk")
    family(p)
    p.add_argument("--diagonal", action="store_true", help="use f = 1 + sum t_i^d")
    p.add_argument("--write", default=None, help="instance JSON path")
    common(p, kernel=False)
    p.set_defaults(func=cmd_sample)
    return parser


def _config(args) -> dict:
    skip = {"func", "output"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(report: dict, args) -> None:
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if getattr(args, "output", None):
        atomic_write(Path(args.output), text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    report: dict[str, Any] = {
        "schema": SCHEMA,
        "version": __version__,
        "subcommand": args.subcommand,
        "config": _config(args),
    }
    start = time.perf_counter()
    try:
        report["result"] = args.func(args)
        code = 0
    except (HypothesisUnmet, BudgetExceeded) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, HypothesisUnmet):
            report["error"]["clause"] = exc.clause
        code = 2
    except (AbsumsError, OSError, ValueError) as exc:
        print(f"absums: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    report["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
