"""Univariate and bivariate polynomials over Q, and polynomial-matrix determinants.

``BiPoly`` is sparse: a mapping ``(i, j) -> coeff`` for the monomial
``x**i * w**j``. Zero coefficients are never stored, so the zero polynomial
is the empty mapping.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .rational import RatLike, as_rat, rat_str


class UniPoly:
    """Dense univariate polynomial, coefficients low degree first."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[RatLike] = (), var: str = "w"):
        cs = [as_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.var = var

    @classmethod
    def monomial(cls, k: int, c: RatLike = 1, var: str = "w") -> "UniPoly":
        return cls([0] * k + [c], var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def _lift(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            return other
        return UniPoly([other], self.var)

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[k] + other[k] for k in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return UniPoly((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = UniPoly([1], self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("UniPoly", self.coeffs))

    def __call__(self, value):
        acc = Fraction(0) if isinstance(value, (int, Fraction)) else 0 * value
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def compose(self, inner: "UniPoly") -> "UniPoly":
        acc = UniPoly((), self.var)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def __repr__(self):
        return f"UniPoly({format_terms(self.to_terms())})"

    def to_terms(self) -> list[str]:
        return [_term(c, ((self.var, k),)) for k, c in enumerate(self.coeffs) if c]

    def to_bipoly(self, var: str = "w") -> "BiPoly":
        if var == "w":
            return BiPoly({(0, k): c for k, c in enumerate(self.coeffs)})
        return BiPoly({(k, 0): c for k, c in enumerate(self.coeffs)})


class BiPoly:
    """Sparse polynomial in ``x`` and ``w`` over Q."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], RatLike] | None = None):
        clean: dict[tuple[int, int], Fraction] = {}
        if terms:
            for key, c in terms.items():
                c = as_rat(c)
                if c:
                    clean[(int(key[0]), int(key[1]))] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def const(cls, c: RatLike) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def w(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    def is_zero(self) -> bool:
        return not self.terms

    @staticmethod
    def _lift(other) -> "BiPoly":
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, UniPoly):
            return other.to_bipoly()
        return BiPoly.const(other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict[tuple[int, int], Fraction] = {}
        for (a, b), c in self.terms.items():
            for (d, e), f in other.terms.items():
                key = (a + d, b + e)
                out[key] = out.get(key, 0) + c * f
        return BiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = BiPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, UniPoly)):
            other = self._lift(other)
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def leading(self) -> tuple[tuple[int, int], Fraction]:
        """Leading term in lex order with x > w."""
        key = max(self.terms)
        return key, self.terms[key]

    def divexact(self, divisor: "BiPoly") -> "BiPoly":
        """Exact quotient; raises ``ArithmeticError`` if ``divisor`` does not divide."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        (dx, dw), dc = divisor.leading()
        rem = BiPoly(self.terms)
        quot: dict[tuple[int, int], Fraction] = {}
        while not rem.is_zero():
            (rx, rw), rc = rem.leading()
            if rx < dx or rw < dw:
                raise ArithmeticError("polynomial division is not exact")
            key = (rx - dx, rw - dw)
            c = rc / dc
            quot[key] = c
            rem = rem - BiPoly({key: c}) * divisor
        return BiPoly(quot)

    def degree_x(self) -> int:
        return max((a for a, _ in self.terms), default=-1)

    def degree_w(self) -> int:
        return max((b for _, b in self.terms), default=-1)

    def coeff_x(self, i: int) -> UniPoly:
        """Coefficient of ``x**i`` as a polynomial in ``w``."""
        top = max((b for a, b in self.terms if a == i), default=-1)
        cs = [Fraction(0)] * (top + 1)
        for (a, b), c in self.terms.items():
            if a == i:
                cs[b] = c
        return UniPoly(cs, "w")

    def substitute_x(self, value) -> UniPoly:
        """Set ``x = value`` (a rational) and return a polynomial in ``w``."""
        value = as_rat(value)
        acc = UniPoly((), "w")
        for i in range(self.degree_x() + 1):
            acc = acc + self.coeff_x(i) * (value ** i)
        return acc

    def substitute_w(self, value) -> UniPoly:
        value = as_rat(value)
        out: dict[int, Fraction] = {}
        for (a, b), c in self.terms.items():
            out[a] = out.get(a, 0) + c * value ** b
        top = max(out, default=-1)
        return UniPoly([out.get(k, 0) for k in range(top + 1)], "x")

    def swap(self) -> "BiPoly":
        return BiPoly({(b, a): c for (a, b), c in self.terms.items()})

    def is_palindromic_x(self) -> bool:
        d = self.degree_x()
        return all(self.coeff_x(i) == self.coeff_x(d - i) for i in range(d + 1))

    def to_terms(self, names: tuple[str, str] = ("x", "w")) -> list[str]:
        return [
            _term(c, ((names[0], a), (names[1], b)))
            for (a, b), c in sorted(self.terms.items(), reverse=True)
        ]

    def __repr__(self):
        return f"BiPoly({format_terms(self.to_terms())})"


def _term(c: Fraction, powers: Sequence[tuple[str, int]]) -> str:
    parts = [rat_str(c)]
    for name, e in powers:
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_terms(terms: Sequence[str]) -> str:
    return " + ".join(terms) if terms else "0"


PolyMatrix = Sequence[Sequence[BiPoly]]


def _check_square(m: PolyMatrix) -> int:
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    return n


def poly_det(m: PolyMatrix) -> BiPoly:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = _check_square(m)
    if n == 0:
        return BiPoly.const(1)
    a = [[BiPoly._lift(e) for e in row] for row in m]
    sign = 1
    prev = BiPoly.const(1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return BiPoly()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]).divexact(prev)
            a[i][k] = BiPoly()
        prev = pivot
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def cofactor_det(m: PolyMatrix) -> BiPoly:
    """Laplace expansion along the first row; exponential, small sizes only."""
    n = _check_square(m)
    if n == 0:
        return BiPoly.const(1)
    if n == 1:
        return BiPoly._lift(m[0][0])
    total = BiPoly()
    for j in range(n):
        if BiPoly._lift(m[0][j]).is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in (list(r) for r in m[1:])]
        term = BiPoly._lift(m[0][j]) * cofactor_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def mat_mul(a: PolyMatrix, b: PolyMatrix) -> list[list[BiPoly]]:
    n, k, p = len(a), len(b), len(b[0]) if b else 0
    if any(len(row) != k for row in a):
        raise ValueError("incompatible shapes")
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = BiPoly()
            for t in range(k):
                acc = acc + BiPoly._lift(a[i][t]) * BiPoly._lift(b[t][j])
            row.append(acc)
        out.append(row)
    return out


def mat_lift(rows: Sequence[Sequence[RatLike]]) -> list[list[BiPoly]]:
    return [[BiPoly.const(as_rat(e)) for e in row] for row in rows]
