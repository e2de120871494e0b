"""Helpers around :class:`fractions.Fraction`, which plays the role of Q here."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Union

Rat = Fraction
RatLike = Union[int, Fraction, str]


def as_rat(value: RatLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing to build an exact rational from {value!r}")
    return Fraction(value)


def rat_str(value: Fraction | int) -> str:
    """Serialize as ``"p/q"`` with q > 0, always including the denominator."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rat(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    return Fraction(text)


def int_sqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


def rational_sqrt(value: Fraction) -> Fraction | None:
    """Return the non-negative square root of ``value`` if it is a rational square."""
    value = Fraction(value)
    p = int_sqrt_exact(value.numerator)
    q = int_sqrt_exact(value.denominator)
    if p is None or q is None:
        return None
    return Fraction(p, q)


def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Write ``n > 0`` as ``s * k**2`` with ``s`` squarefree; return ``(s, k)``."""
    if n <= 0:
        raise ValueError("need a positive integer")
    from sympy import factorint

    s, k = 1, 1
    for p, e in factorint(n).items():
        k *= p ** (e // 2)
        if e % 2:
            s *= p
    return s, k
