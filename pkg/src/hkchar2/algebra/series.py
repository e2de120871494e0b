"""Truncated power series over Q in one variable (named ``w``)."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .polys import UniPoly
from .rational import RatLike, as_rat, rational_sqrt


class TruncSeries:
    """``c_0 + c_1 w + ... + c_N w^N`` known exactly up to order ``N``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable[RatLike], order: int):
        if order < 0:
            raise ValueError("order must be >= 0")
        cs = [as_rat(c) for c in coeffs][: order + 1]
        cs += [Fraction(0)] * (order + 1 - len(cs))
        self.order = order
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def from_poly(cls, poly: UniPoly | Sequence[RatLike], order: int) -> "TruncSeries":
        cs = poly.coeffs if isinstance(poly, UniPoly) else poly
        return cls(cs, order)

    @classmethod
    def const(cls, c: RatLike, order: int) -> "TruncSeries":
        return cls([c], order)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __len__(self) -> int:
        return self.order + 1

    def _lift(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            if other.order != self.order:
                n = min(self.order, other.order)
                return TruncSeries(other.coeffs, n)
            return other
        if isinstance(other, UniPoly):
            return TruncSeries(other.coeffs, self.order)
        return TruncSeries([other], self.order)

    def _pair(self, other) -> tuple["TruncSeries", "TruncSeries"]:
        other = self._lift(other)
        n = min(self.order, other.order)
        a = self if self.order == n else TruncSeries(self.coeffs, n)
        return a, other

    def __add__(self, other):
        a, b = self._pair(other)
        return TruncSeries([x + y for x, y in zip(a.coeffs, b.coeffs)], a.order)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        a, b = self._pair(other)
        return TruncSeries([x - y for x, y in zip(a.coeffs, b.coeffs)], a.order)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        n = a.order
        out = [Fraction(0)] * (n + 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j in range(n + 1 - i):
                    out[i + j] += x * b.coeffs[j]
        return TruncSeries(out, n)

    __rmul__ = __mul__

    def inverse(self) -> "TruncSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        n = self.order
        inv = [Fraction(0)] * (n + 1)
        inv[0] = 1 / c0
        for k in range(1, n + 1):
            s = sum((self.coeffs[j] * inv[k - j] for j in range(1, k + 1)), Fraction(0))
            inv[k] = -s / c0
        return TruncSeries(inv, n)

    def __truediv__(self, other):
        a, b = self._pair(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncSeries(self.coeffs, order)

    def __repr__(self):
        return f"TruncSeries({[str(c) for c in self.coeffs]}, order={self.order})"


def series_sqrt(s: TruncSeries) -> TruncSeries:
    """Square root with positive constant term, exact up to ``s.order``."""
    root0 = rational_sqrt(s.coeffs[0]) if s.coeffs[0] > 0 else None
    if root0 is None:
        raise ValueError(
            f"constant term {s.coeffs[0]} is not a nonzero rational square"
        )
    n = s.order
    r = [Fraction(0)] * (n + 1)
    r[0] = root0
    for k in range(1, n + 1):
        acc = sum((r[j] * r[k - j] for j in range(1, k)), Fraction(0))
        r[k] = (s.coeffs[k] - acc) / (2 * root0)
    return TruncSeries(r, n)
