"""The ring Gamma_Q of nilpotent F[T]-modules in characteristic 2.

Elements are finite rational combinations of basis classes ``lam[i]`` with
``lam[i] * lam[j] = lam[i ^ j]``.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra.gf2 import F2Matrix, f2_rank
from .algebra.rational import RatLike, as_rat, rat_str
from .xspace import XFunction, make_dyadic


class GammaElement:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, RatLike] | None = None):
        clean = {}
        for i, c in (coeffs or {}).items():
            if i < 0:
                raise ValueError("basis index must be >= 0")
            c = as_rat(c)
            if c:
                clean[int(i)] = c
        self.coeffs: dict[int, Fraction] = clean

    @classmethod
    def lam(cls, i: int, c: RatLike = 1) -> "GammaElement":
        return cls({i: c})

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs.get(i, Fraction(0))

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def __add__(self, other: "GammaElement") -> "GammaElement":
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return GammaElement(out)

    def __neg__(self):
        return GammaElement({i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GammaElement):
            return nim_mul(self, other)
        c = as_rat(other)
        return GammaElement({i: v * c for i, v in self.coeffs.items()})

    def __rmul__(self, other):
        return self * other

    def __eq__(self, other):
        if not isinstance(other, GammaElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def to_json(self) -> dict[str, str]:
        return {str(i): rat_str(c) for i, c in sorted(self.coeffs.items())}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*lam{i}" for i, c in sorted(self.coeffs.items()))


def nim_mul(a: GammaElement, b: GammaElement) -> GammaElement:
    out: dict[int, Fraction] = {}
    for i, x in a.coeffs.items():
        for j, y in b.coeffs.items():
            k = i ^ j
            out[k] = out.get(k, 0) + x * y
    return GammaElement(out)


def delta(r: int) -> GammaElement:
    """Class of F[T]/T^r: ``lam0 - lam1 + lam2 - ... +- lam(r-1)``."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return GammaElement({i: (-1) ** i for i in range(r)})


def L_n(x: XFunction, n: int) -> GammaElement:
    q = 1 << n
    vals = [Fraction(x(make_dyadic(i, n))) for i in range(q + 1)]
    return GammaElement({i: (vals[i + 1] - vals[i]) * (-1) ** i for i in range(q)})


def delta_decompose(g: GammaElement, q: int) -> list[Fraction]:
    """Coefficients ``d_1..d_q`` with ``g = sum d_r delta_r``.

    Writing ``g = sum c_i (-1)^i lam_i`` (and ``c_q = 0``) gives
    ``d_r = c_{r-1} - c_r``.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if any(i >= q for i in g.coeffs):
        raise ValueError(f"support {g.support()} reaches beyond lam{q - 1}")
    c = [g[i] * (-1) ** i for i in range(q)] + [Fraction(0)]
    return [c[r - 1] - c[r] for r in range(1, q + 1)]


def from_deltas(coeffs: Iterable[RatLike]) -> GammaElement:
    acc = GammaElement()
    for r, d in enumerate(coeffs, start=1):
        if d:
            acc = acc + delta(r) * d
    return acc


def convexity_certificate(g: GammaElement, q: int) -> bool:
    """Non-negativity of the coefficients of ``delta_1 .. delta_{q-1}``."""
    return all(d >= 0 for d in delta_decompose(g, q)[:-1])


def block_class(blocks: Iterable[int]) -> GammaElement:
    """Class in Gamma of a direct sum of Jordan blocks of the given sizes."""
    acc = GammaElement()
    for size in blocks:
        acc = acc + delta(size)
    return acc


def tensor_operator(r: int, s: int) -> F2Matrix:
    """``N_r (x) 1 + 1 (x) N_s`` on F2^(r*s); basis ``e_a (x) f_b`` at index ``a*s + b``."""
    pairs = []
    for a in range(r):
        for b in range(s):
            col = a * s + b
            if a + 1 < r:
                pairs.append(((a + 1) * s + b, col))
            if b + 1 < s:
                pairs.append((a * s + b + 1, col))
    return F2Matrix.from_pairs(r * s, r * s, pairs)


def blocks_from_ranks(ranks: list[int]) -> list[int]:
    """Jordan block sizes of a nilpotent operator given ``rank(T^k)`` for ``k = 0, 1, ...``
    ending with a zero. Blocks of size ``>= k`` number ``rank(T^(k-1)) - rank(T^k)``.
    """
    at_least = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes: list[int] = []
    for k, cnt in enumerate(at_least, start=1):
        nxt = at_least[k] if k < len(at_least) else 0
        sizes += [k] * (cnt - nxt)
    return sorted(sizes, reverse=True)


def jordan_tensor(r: int, s: int) -> list[int]:
    """Block sizes of ``F[T]/T^r (x) F[T]/T^s`` over F2, from ranks of powers."""
    if r < 1 or s < 1:
        raise ValueError("r and s must be >= 1")
    op = tensor_operator(r, s)
    power = F2Matrix.identity(r * s)
    ranks = [r * s]
    while ranks[-1]:
        power = power @ op
        ranks.append(f2_rank(power))
    return blocks_from_ranks(ranks)


def block_multiset(blocks: Iterable[int]) -> dict[int, int]:
    return dict(sorted(Counter(blocks).items(), reverse=True))
