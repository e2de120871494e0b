"""Colengths ``deg(u_1^q, ..., u_r^q, f^i)`` over F2 by exact linear algebra.

The quotient ``A = F2[u]/(u_1^q, ..., u_r^q)`` has the monomials of the box
``[0, q)^r`` as a basis, and the colength is ``q^r - rank(f^i : A -> A)``.
Multiplication by a polynomial never mixes monomials from different cosets
of the lattice spanned by differences of its exponents, so the matrix is
block diagonal after a permutation; each block is ranked separately.
"""

from __future__ import annotations

import hashlib
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from filelock import FileLock
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .algebra.gf2 import F2Matrix, f2_rank
from .algebra.rational import rat_str
from .sharp import BlackboxSharp
from .xspace import Dyadic, grid, make_dyadic

Monomial = tuple[int, ...]

CACHE_ENV = "HKCHAR2_CACHE_DIR"


@dataclass(frozen=True)
class F2MultiPoly:
    """A polynomial over F2: a set of exponent vectors in the given variables."""

    variables: tuple[str, ...]
    monomials: frozenset[Monomial]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("repeated variable name")
        for m in self.monomials:
            if len(m) != len(self.variables) or min(m, default=0) < 0:
                raise ValueError(f"bad exponent vector {m}")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self.monomials

    def has_constant_term(self) -> bool:
        return (0,) * self.nvars in self.monomials

    def __add__(self, other: "F2MultiPoly") -> "F2MultiPoly":
        a, b = _common(self, other)
        return F2MultiPoly(a.variables, a.monomials ^ b.monomials)

    def __mul__(self, other: "F2MultiPoly") -> "F2MultiPoly":
        a, b = _common(self, other)
        out: set[Monomial] = set()
        for x in a.monomials:
            for y in b.monomials:
                out ^= {tuple(i + j for i, j in zip(x, y))}
        return F2MultiPoly(a.variables, frozenset(out))

    def with_variables(self, variables: Sequence[str]) -> "F2MultiPoly":
        variables = tuple(variables)
        missing = set(self.variables) - set(variables)
        if missing:
            raise ValueError(f"variables {sorted(missing)} would be dropped")
        pos = [self.variables.index(v) if v in self.variables else None for v in variables]
        mons = frozenset(tuple(m[p] if p is not None else 0 for p in pos) for m in self.monomials)
        return F2MultiPoly(variables, mons)

    def __str__(self):
        if not self.monomials:
            return "0"
        terms = []
        for m in sorted(self.monomials, reverse=True):
            factors = [v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, m) if e]
            terms.append("*".join(factors) or "1")
        return "+".join(terms)

    def canonical_text(self) -> str:
        return f"[{','.join(self.variables)}] {self}"


def _common(a: F2MultiPoly, b: F2MultiPoly) -> tuple[F2MultiPoly, F2MultiPoly]:
    if a.variables == b.variables:
        return a, b
    variables = tuple(sorted(set(a.variables) | set(b.variables)))
    return a.with_variables(variables), b.with_variables(variables)


_TERM_RE = re.compile(r"^(?:(\d+)\*?)?((?:[A-Za-z][A-Za-z0-9_]*(?:\^\d+)?\*?)*)$")
_FACTOR_RE = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(?:\^(\d+))?")


def parse_poly(text: str, variables: Sequence[str] | None = None) -> F2MultiPoly:
    """Parse ``"x^3+y^3+x*y*z"``. Integer coefficients are read mod 2."""
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty polynomial")
    if re.search(r"[^A-Za-z0-9_^*+]", src):
        raise ValueError(f"unexpected character in {text!r}")
    raw_terms = src.split("+")
    parsed: list[tuple[int, dict[str, int]]] = []
    for term in raw_terms:
        m = _TERM_RE.match(term)
        if not term or not m:
            raise ValueError(f"cannot parse term {term!r} in {text!r}")
        coef = int(m.group(1)) if m.group(1) else 1
        powers: dict[str, int] = {}
        body = m.group(2)
        if body.endswith("*"):
            raise ValueError(f"dangling '*' in {term!r}")
        for name, exp in _FACTOR_RE.findall(body):
            powers[name] = powers.get(name, 0) + (int(exp) if exp else 1)
        if not body and m.group(1) is None:
            raise ValueError(f"empty term in {text!r}")
        parsed.append((coef, powers))
    names = sorted({v for _, p in parsed for v in p})
    if variables is not None:
        extra = set(names) - set(variables)
        if extra:
            raise ValueError(f"unknown variables {sorted(extra)}")
        names = list(variables)
    mons: set[Monomial] = set()
    for coef, powers in parsed:
        if coef % 2:
            mons ^= {tuple(powers.get(v, 0) for v in names)}
    return F2MultiPoly(tuple(names), frozenset(mons))


def _box_mul(a: Iterable[Monomial], b: Iterable[Monomial], q: int) -> set[Monomial]:
    out: set[Monomial] = set()
    b = list(b)
    for x in a:
        for y in b:
            m = tuple(i + j for i, j in zip(x, y))
            if max(m) < q:
                out ^= {m}
    return out


def power_in_box(f: F2MultiPoly, i: int, q: int) -> set[Monomial]:
    """Support of ``f^i`` reduced modulo ``(u_1^q, ..., u_r^q)``."""
    result: set[Monomial] = {(0,) * f.nvars}
    base = {m for m in f.monomials if max(m, default=0) < q}
    while i:
        if i & 1:
            result = _box_mul(result, base, q)
        i >>= 1
        if i:
            # Frobenius: squaring a sum over F2 squares each monomial
            base = {tuple(2 * e for e in m) for m in base if 2 * max(m, default=0) < q}
    return result


def multiplication_pairs(g: Iterable[Monomial], q: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """(row, col) index pairs of multiplication by ``g`` on the box basis."""
    side = np.arange(q)
    box = np.stack(np.meshgrid(*([side] * r), indexing="ij"), axis=-1).reshape(-1, r)
    weights = q ** np.arange(r - 1, -1, -1)
    idx = box @ weights
    rows, cols = [], []
    for e in g:
        e = np.asarray(e)
        mask = (box < q - e).all(axis=1)
        c = idx[mask]
        cols.append(c)
        rows.append(c + int(e @ weights))
    if not rows:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(rows), np.concatenate(cols)


def block_rank(rows: np.ndarray, cols: np.ndarray, size: int) -> int:
    """Rank of the sparse 0/1 matrix given by entry pairs, splitting into connected blocks."""
    if rows.size == 0:
        return 0
    graph = coo_matrix((np.ones(rows.size, np.int8), (rows, cols + size)), shape=(2 * size, 2 * size))
    _, labels = connected_components(graph, directed=False)
    comp = labels[rows]
    order = np.argsort(comp, kind="stable")
    rows, cols, comp = rows[order], cols[order], comp[order]
    bounds = np.flatnonzero(np.diff(comp)) + 1
    total = 0
    for r_blk, c_blk in zip(np.split(rows, bounds), np.split(cols, bounds)):
        if r_blk.size == 1:
            total += 1
            continue
        ur, r_loc = np.unique(r_blk, return_inverse=True)
        uc, c_loc = np.unique(c_blk, return_inverse=True)
        if ur.size == 1 or uc.size == 1:
            total += 1
            continue
        # orient so that the shorter side indexes rows
        if uc.size < ur.size:
            mat = F2Matrix.from_pairs(uc.size, ur.size, zip(c_loc.tolist(), r_loc.tolist()))
        else:
            mat = F2Matrix.from_pairs(ur.size, uc.size, zip(r_loc.tolist(), c_loc.tolist()))
        total += f2_rank(mat)
    return total


def colength_uncached(f: F2MultiPoly, q: int, i: int) -> int:
    _check(f, q, i)
    if i == 0:
        return 0
    r = f.nvars
    g = power_in_box(f, i, q)
    rows, cols = multiplication_pairs(g, q, r)
    return q**r - block_rank(rows, cols, q**r)


def _check(f: F2MultiPoly, q: int, i: int) -> None:
    if f.is_zero():
        raise ValueError("f must be nonzero")
    if f.has_constant_term():
        raise ValueError("f has a constant term, so it is not in the maximal ideal")
    if q < 1 or q & (q - 1):
        raise ValueError(f"q={q} is not a power of 2")
    if i < 0:
        raise ValueError("i must be >= 0")


class ColengthCache:
    """Append-only CSV of ``sha256(f_text),q,i,colength`` rows."""

    FILENAME = "colengths.csv"

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path = self.directory / self.FILENAME
        self.lock = FileLock(str(self.path) + ".lock")
        self._table: dict[tuple[str, int, int], int] = {}
        self.reload()

    @staticmethod
    def key(f: F2MultiPoly) -> str:
        return hashlib.sha256(f.canonical_text().encode()).hexdigest()

    def reload(self) -> None:
        self._table.clear()
        if not self.path.exists():
            return
        with self.lock, open(self.path) as fh:
            for line in fh:
                parts = line.strip().split(",")
                if len(parts) == 4:
                    h, q, i, val = parts
                    self._table[(h, int(q), int(i))] = int(val)

    def get(self, f: F2MultiPoly, q: int, i: int) -> int | None:
        return self._table.get((self.key(f), q, i))

    def put(self, f: F2MultiPoly, q: int, i: int, value: int) -> None:
        k = (self.key(f), q, i)
        if k in self._table:
            if self._table[k] != value:
                raise RuntimeError(f"cache conflict for {f} at q={q}, i={i}")
            return
        self._table[k] = value
        with self.lock, open(self.path, "a") as fh:
            fh.write(f"{k[0]},{q},{i},{value}\n")

    def __len__(self) -> int:
        return len(self._table)


def default_cache() -> ColengthCache | None:
    d = os.environ.get(CACHE_ENV)
    return ColengthCache(d) if d else None


def colength(f: F2MultiPoly, q: int, i: int, cache: ColengthCache | None = None) -> int:
    if cache is not None:
        hit = cache.get(f, q, i)
        if hit is not None:
            return hit
    value = colength_uncached(f, q, i)
    if cache is not None:
        cache.put(f, q, i, value)
    return value


def _job(args: tuple[F2MultiPoly, int, int]) -> int:
    return colength_uncached(*args)


def colengths(
    f: F2MultiPoly,
    jobs: Sequence[tuple[int, int]],
    cache: ColengthCache | None = None,
    workers: int = 1,
) -> dict[tuple[int, int], int]:
    """Colengths for many ``(q, i)`` at once, optionally in worker processes."""
    out: dict[tuple[int, int], int] = {}
    todo = []
    for q, i in jobs:
        hit = cache.get(f, q, i) if cache is not None else None
        if hit is not None:
            out[(q, i)] = hit
        else:
            _check(f, q, i)
            todo.append((q, i))
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_job, [(f, q, i) for q, i in todo]))
    else:
        values = [colength_uncached(f, q, i) for q, i in todo]
    for (q, i), v in zip(todo, values):
        out[(q, i)] = v
        if cache is not None:
            cache.put(f, q, i, v)
    return {k: out[k] for k in sorted(out)}


class PhiF:
    """``phi_f`` as a function on dyadics: ``i/q -> colength(f, q, i) / q^r``."""

    def __init__(self, f: F2MultiPoly, cache: ColengthCache | None = None):
        _check(f, 1, 0)
        self.f = f
        self.cache = cache
        self._memo: dict[Dyadic, Fraction] = {}

    def __call__(self, d: Dyadic) -> Fraction:
        hit = self._memo.get(d)
        if hit is None:
            q = d.denominator
            hit = Fraction(colength(self.f, q, d.num, self.cache), q**self.f.nvars)
            self._memo[d] = hit
        return hit

    def prefetch(self, n: int, workers: int = 1) -> None:
        """Fill the memo for every point of level ``<= n``."""
        pts = [d for d in grid(n) if d not in self._memo]
        vals = colengths(self.f, [(d.denominator, d.num) for d in pts], self.cache, workers)
        for d in pts:
            q = d.denominator
            self._memo[d] = Fraction(vals[(q, d.num)], q**self.f.nvars)


def phi_f(f: F2MultiPoly, cache: ColengthCache | None = None) -> PhiF:
    return PhiF(f, cache)


def well_defined_at(f: F2MultiPoly, q: int, i: int, cache: ColengthCache | None = None) -> bool:
    """``colength(f, q, i) / q^r == colength(f, 2q, 2i) / (2q)^r``."""
    r = f.nvars
    return colength(f, q, i, cache) * 2**r == colength(f, 2 * q, 2 * i, cache)


def mu_hk_estimate(f: F2MultiPoly, n: int, cache: ColengthCache | None = None) -> Fraction:
    return phi_f(f, cache)(make_dyadic(1, n)) * (1 << n)


NODAL_CUBIC = "x^3+y^3+x*y*z"


def _levels(qmax: int) -> int:
    if qmax < 1 or qmax & (qmax - 1):
        raise ValueError(f"qmax={qmax} is not a power of 2")
    return qmax.bit_length() - 1


def verify_conjecture_2_3(
    qmax: int, cache: ColengthCache | None = None, workers: int = 1
) -> dict:
    """Compare colength-derived ``phi_f(i/q)`` with ``(t + phi0)(i/q)`` for ``q <= qmax``."""
    from .xspace import default_registry

    reg = default_registry()
    model = reg.t + reg.phi(0)
    f = parse_poly(NODAL_CUBIC)
    phi = phi_f(f, cache)
    n = _levels(qmax)
    phi.prefetch(n, workers)
    points, mismatches = [], []
    for d in grid(n):
        lhs, rhs = phi(d), model(d)
        rec = {"point": str(d), "colength_value": rat_str(lhs), "model_value": rat_str(rhs)}
        points.append(rec)
        if lhs != rhs:
            mismatches.append(rec)
    return {
        "polynomial": str(f),
        "model": "t+phi0",
        "qmax": qmax,
        "points_checked": len(points),
        "points": points,
        "mismatches": mismatches,
        "pass": not mismatches,
    }


def verify_thm_1_9(
    f: F2MultiPoly,
    g: F2MultiPoly,
    qmax: int,
    cache: ColengthCache | None = None,
    workers: int = 1,
) -> dict:
    """Compare ``phi_{f+g}`` (colengths in all variables) with ``phi_f # phi_g``."""
    clash = set(f.variables) & set(g.variables)
    if clash:
        raise ValueError(f"f and g share variables {sorted(clash)}")
    variables = f.variables + g.variables
    h = f.with_variables(variables) + g.with_variables(variables)
    n = _levels(qmax)
    pf, pg, ph = phi_f(f, cache), phi_f(g, cache), phi_f(h, cache)
    for p in (pf, pg, ph):
        p.prefetch(n, workers)
    product = BlackboxSharp(pf, pg)
    points, mismatches = [], []
    for d in grid(n):
        lhs, rhs = ph(d), product(d)
        rec = {"point": str(d), "phi_h": rat_str(lhs), "sharp": rat_str(rhs)}
        points.append(rec)
        if lhs != rhs:
            mismatches.append(rec)
    return {
        "f": str(f),
        "g": str(g),
        "h": str(h),
        "qmax": qmax,
        "points_checked": len(points),
        "points": points,
        "mismatches": mismatches,
        "pass": not mismatches,
    }
