"""Instance JSON, canonical hashing and the on-disk sum cache."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any

from .cyclotomic import CycInt
from .errors import InstanceFormatError
from .field import build_field
from .polynomial import ABPolynomial, LaurentPoly, assemble

CACHE_ENV = "ABSUMS_CACHE_DIR"
REQUIRED = ("p", "s", "n", "A", "B", "f", "g", "PB")


def _coeff_json(c) -> list[int]:
    return [int(x) for x in c.coeffs]


def _terms_json(P: LaurentPoly) -> list:
    return [[_coeff_json(c), list(w)] for w, c in sorted(P.terms.items())]


def instance_to_json(G: ABPolynomial, include_seed: bool = True) -> dict[str, Any]:
    out: dict[str, Any] = {
        "p": G.p,
        "s": G.field.s,
        "n": G.n,
        "A": G.A,
        "B": G.B,
        "f": _terms_json(G.f),
        "g": _terms_json(G.g),
        "PB": [_coeff_json(c) for c in G.PB],
    }
    if include_seed and G.seed is not None:
        out["seed"] = G.seed
    return out


def _parse_coeff(F, raw, where: str):
    if isinstance(raw, int):
        return F(raw)
    if isinstance(raw, list) and all(isinstance(x, int) for x in raw) and len(raw) <= F.s:
        return F(list(raw) + [0] * (F.s - len(raw)))
    raise InstanceFormatError(f"{where}: coefficient must be an int or a list of at most {F.s} ints, got {raw!r}")


def _parse_terms(F, n: int, raw, where: str) -> LaurentPoly:
    if not isinstance(raw, list):
        raise InstanceFormatError(f"{where}: expected a list of [coeff, exponents] pairs")
    terms = []
    for k, item in enumerate(raw):
        if not (isinstance(item, list) and len(item) == 2):
            raise InstanceFormatError(f"{where}[{k}]: expected [coeff, exponents]")
        c, w = item
        if not (isinstance(w, list) and len(w) == n and all(isinstance(x, int) and x >= 0 for x in w)):
            raise InstanceFormatError(f"{where}[{k}]: exponent must be {n} non-negative ints, got {w!r}")
        terms.append((tuple(w), _parse_coeff(F, c, f"{where}[{k}]")))
    return LaurentPoly(F, n, terms)


def instance_from_json(data: dict[str, Any]) -> ABPolynomial:
    if not isinstance(data, dict):
        raise InstanceFormatError("instance must be a JSON object")
    missing = [k for k in REQUIRED if k not in data]
    if missing:
        raise InstanceFormatError(f"missing keys: {', '.join(missing)}")
    for k in ("p", "s", "n", "A", "B"):
        if not isinstance(data[k], int) or data[k] < (0 if k == "n" else 1):
            raise InstanceFormatError(f"{k} must be a positive integer, got {data[k]!r}")
    F = build_field(data["p"], data["s"])
    n = data["n"]
    f = _parse_terms(F, n, data["f"], "f")
    g = _parse_terms(F, n, data["g"], "g")
    if not isinstance(data["PB"], list):
        raise InstanceFormatError("PB must be a list of coefficients")
    PB = [_parse_coeff(F, c, f"PB[{k}]") for k, c in enumerate(data["PB"])]
    G = assemble(f, g, PB, data["A"], data["B"])
    seed = data.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise InstanceFormatError("seed must be an integer")
    return ABPolynomial(G.field, G.n, G.A, G.B, G.f, G.g, G.PB, seed=seed)


def load_instance(path: str | os.PathLike) -> ABPolynomial:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return instance_from_json(data)


def save_instance(G: ABPolynomial, path: str | os.PathLike) -> None:
    atomic_write(Path(path), json.dumps(instance_to_json(G), indent=2, sort_keys=True) + "\n")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def instance_hash(G: ABPolynomial | LaurentPoly) -> str:
    """SHA-256 of the canonical instance JSON; the sampling seed is not part of the identity."""
    if isinstance(G, ABPolynomial):
        payload = instance_to_json(G, include_seed=False)
    else:
        payload = {"p": G.field.p, "s": G.field.s, "n_vars": G.n_vars, "terms": _terms_json(G)}
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def resolve_cache_dir(flag: str | None) -> Path | None:
    """The --cache-dir flag wins over the environment variable."""
    if flag:
        return Path(flag)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


class SumCache:
    """One JSON file per (instance hash, m, domain)."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.hits = 0
        self.misses = 0

    def _path(self, key: str, m: int, domain: str) -> Path:
        safe = domain.replace("/", "_").replace(",", "-")
        return self.root / key[:2] / f"{key}_m{m}_{safe}.json"

    def get(self, key: str, m: int, domain: str) -> CycInt | None:
        path = self._path(key, m, domain)
        try:
            data = json.loads(path.read_text())
        except (FileNotFoundError, json.JSONDecodeError):
            self.misses += 1
            return None
        self.hits += 1
        return CycInt.from_json(data["value"])

    def put(self, key: str, m: int, domain: str, value: CycInt) -> None:
        payload = {"key": key, "m": m, "domain": domain, "value": value.to_json()}
        atomic_write(self._path(key, m, domain), canonical_json(payload) + "\n")
