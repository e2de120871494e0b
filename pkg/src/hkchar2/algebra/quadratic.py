"""Exact numbers ``a + b*sqrt(d)`` in a real quadratic field."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

from .rational import RatLike, as_rat, rat_str, rational_sqrt, squarefree_decomposition


def _is_squarefree(d: int) -> bool:
    if d < 2:
        return False
    p = 2
    while p * p <= d:
        if d % (p * p) == 0:
            return False
        p += 1
    return True


@dataclass(frozen=True)
class QuadraticNumber:
    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", as_rat(self.a))
        object.__setattr__(self, "b", as_rat(self.b))
        if not _is_squarefree(self.d):
            raise ValueError(f"d={self.d} must be a squarefree integer > 1")

    @classmethod
    def rational(cls, a: RatLike, d: int) -> "QuadraticNumber":
        return cls(as_rat(a), Fraction(0), d)

    @classmethod
    def sqrt_of(cls, r: RatLike, d: int) -> "QuadraticNumber":
        """Non-negative square root of a rational ``r`` inside Q(sqrt(d))."""
        r = as_rat(r)
        if r < 0:
            raise ValueError("negative radicand")
        root = rational_sqrt(r)
        if root is not None:
            return cls(root, Fraction(0), d)
        root = rational_sqrt(r / d)
        if root is None:
            raise ValueError(f"sqrt({r}) does not lie in Q(sqrt({d}))")
        return cls(Fraction(0), root, d)

    def _lift(self, other) -> "QuadraticNumber":
        if isinstance(other, QuadraticNumber):
            if other.d != self.d:
                raise ValueError("mixing different quadratic fields")
            return other
        return QuadraticNumber(as_rat(other), Fraction(0), self.d)

    def __add__(self, other):
        o = self._lift(other)
        return QuadraticNumber(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticNumber(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return QuadraticNumber(
            self.a * o.a + self.d * self.b * o.b, self.a * o.b + self.b * o.a, self.d
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadraticNumber":
        return QuadraticNumber(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "QuadraticNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadraticNumber(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def sign(self) -> int:
        """Exact sign of the real number ``a + b*sqrt(d)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with d*b^2
        diff = self.a * self.a - self.d * self.b * self.b
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * sqrt(self.d)

    def __str__(self):
        if self.b == 0:
            return rat_str(self.a)
        return f"{rat_str(self.a)} + ({rat_str(self.b)})*sqrt({self.d})"


def squarefree_part(r: RatLike) -> tuple[int, Fraction]:
    """For rational ``r > 0`` return ``(s, k)`` with ``r = s * k**2``, ``s`` a squarefree integer."""
    r = as_rat(r)
    if r <= 0:
        raise ValueError("need a positive rational")
    # r = p/q = p*q / q^2
    s, k = squarefree_decomposition(r.numerator * r.denominator)
    return s, Fraction(k, r.denominator)
