"""Functions on the dyadic rationals of [0, 1], held exactly.

An element of X is stored symbolically as a finite Q-combination of named
generators. Each generator knows its values at 0 and 1 and how the two
halving operators act on it::

    T0(a)(s) = a(s / 2)        T1(a)(s) = a((1 + s) / 2)

Evaluation at ``i / 2**n`` peels one binary digit per step, so only the
endpoint values are ever needed at the bottom of the recursion.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from .algebra.rational import RatLike, as_rat
from .algebra.series import TruncSeries


@dataclass(frozen=True, order=True)
class Dyadic:
    """The point ``num / 2**level`` of I, always in lowest terms."""

    num: int
    level: int

    def __post_init__(self):
        if self.level < 0 or not 0 <= self.num <= (1 << self.level):
            raise ValueError(f"{self.num}/2^{self.level} is not a point of [0, 1]")
        if self.level > 0 and self.num % 2 == 0:
            raise ValueError("use make_dyadic for non-reduced input")

    @property
    def denominator(self) -> int:
        return 1 << self.level

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.level)

    def __str__(self):
        return f"{self.num}/{1 << self.level}"

    def in_left_half(self) -> bool:
        """True on [0, 1/2]; the midpoint goes left."""
        return 2 * self.num <= (1 << self.level)

    def zoom(self) -> tuple[int, "Dyadic"]:
        """Return ``(0, 2s)`` on the left half and ``(1, 2s - 1)`` on the right."""
        if self.level == 0:
            raise ValueError("endpoints have no finer digit")
        if self.in_left_half():
            return 0, make_dyadic(self.num, self.level - 1)
        return 1, make_dyadic(self.num - (1 << (self.level - 1)), self.level - 1)


ZERO = Dyadic(0, 0)
ONE = Dyadic(1, 0)
HALF = Dyadic(1, 1)


def make_dyadic(i: int, n: int) -> Dyadic:
    if n < 0 or not 0 <= i <= (1 << n):
        raise ValueError(f"{i}/2^{n} is not a point of [0, 1]")
    if i == 0:
        return ZERO
    while n > 0 and i % 2 == 0:
        i //= 2
        n -= 1
    return Dyadic(i, n)


def parse_dyadic(text: str) -> Dyadic:
    """Parse ``"3/16"``, ``"0"``, ``"1"`` or ``"0.375"``-free forms ``p/2^n``."""
    value = Fraction(text.strip())
    den = value.denominator
    if den & (den - 1):
        raise ValueError(f"{text!r} is not dyadic")
    return make_dyadic(value.numerator, den.bit_length() - 1)


def half_of(d: Dyadic) -> Dyadic:
    """``d / 2``."""
    return make_dyadic(d.num, d.level + 1)


def half_plus(d: Dyadic) -> Dyadic:
    """``(1 + d) / 2``."""
    return make_dyadic((1 << d.level) + d.num, d.level + 1)


def grid(n: int) -> list[Dyadic]:
    return [make_dyadic(i, n) for i in range((1 << n) + 1)]


class XFunction(Protocol):
    """Anything that evaluates exactly on dyadic points."""

    def __call__(self, d: Dyadic) -> Fraction: ...


class Generator:
    """A named element of X with endpoint values and lazy halving rules."""

    def __init__(
        self,
        name: str,
        at0: RatLike,
        at1: RatLike,
        t0: Callable[[], "XElement"],
        t1: Callable[[], "XElement"],
        registry: "Registry",
        kind: str = "basic",
    ):
        self.name = name
        self.at0 = as_rat(at0)
        self.at1 = as_rat(at1)
        self.kind = kind
        self.registry = registry
        self._rules = [t0, t1]
        self._images: list[XElement | None] = [None, None]
        self._memo: dict[Dyadic, Fraction] = {}

    def image(self, digit: int) -> "XElement":
        img = self._images[digit]
        if img is None:
            img = self._rules[digit]()
            self._images[digit] = img
        return img

    def T0(self) -> "XElement":
        return self.image(0)

    def T1(self) -> "XElement":
        return self.image(1)

    @property
    def jump(self) -> Fraction:
        return self.at1 - self.at0

    def value(self, d: Dyadic) -> Fraction:
        if d.level == 0:
            return self.at1 if d.num else self.at0
        hit = self._memo.get(d)
        if hit is not None:
            return hit
        if d.level > self.registry.max_level:
            raise RecursionError(
                f"evaluation at level {d.level} exceeds the guard {self.registry.max_level}"
            )
        digit, inner = d.zoom()
        val = self.image(digit).value_at(inner)
        self._memo[d] = val
        return val

    def element(self) -> "XElement":
        return XElement({self: Fraction(1)})

    def __repr__(self):
        return f"Generator({self.name})"


class XElement:
    """A finite Q-linear combination of generators; immutable."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Generator, RatLike] | None = None):
        clean = {}
        for g, c in (coeffs or {}).items():
            c = as_rat(c)
            if c:
                clean[g] = c
        self.coeffs: dict[Generator, Fraction] = clean

    def items(self):
        return self.coeffs.items()

    def __add__(self, other):
        other = _lift(other)
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return XElement(out)

    __radd__ = __add__

    def __neg__(self):
        return XElement({g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, scalar: RatLike):
        scalar = as_rat(scalar)
        return XElement({g: c * scalar for g, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: RatLike):
        return self * (1 / as_rat(scalar))

    def __eq__(self, other):
        if not isinstance(other, XElement):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset((g.name, c) for g, c in self.coeffs.items()))

    def T0(self) -> "XElement":
        return _combine((c, g.T0()) for g, c in self.coeffs.items())

    def T1(self) -> "XElement":
        return _combine((c, g.T1()) for g, c in self.coeffs.items())

    def value_at(self, d: Dyadic) -> Fraction:
        return sum((c * g.value(d) for g, c in self.coeffs.items()), Fraction(0))

    __call__ = value_at

    def at0(self) -> Fraction:
        return sum((c * g.at0 for g, c in self.coeffs.items()), Fraction(0))

    def at1(self) -> Fraction:
        return sum((c * g.at1 for g, c in self.coeffs.items()), Fraction(0))

    def jump(self) -> Fraction:
        return self.at1() - self.at0()

    def generators(self) -> list[Generator]:
        return sorted(self.coeffs, key=lambda g: g.name)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for g in self.generators():
            c = self.coeffs[g]
            parts.append(g.name if c == 1 else f"({c})*{g.name}")
        return " + ".join(parts)

    __repr__ = __str__


def _lift(other) -> XElement:
    if isinstance(other, XElement):
        return other
    if isinstance(other, Generator):
        return other.element()
    raise TypeError(f"cannot add {type(other).__name__} to an element of X")


def _combine(terms: Iterable[tuple[Fraction, XElement]]) -> XElement:
    out: dict[Generator, Fraction] = {}
    for scale, elem in terms:
        for g, c in elem.coeffs.items():
            out[g] = out.get(g, 0) + scale * c
    return XElement(out)


class Registry:
    """Owns generators, their evaluation caches and the lazily built phi_m family."""

    def __init__(self, max_level: int = 24):
        self.max_level = max_level
        self.generators: dict[str, Generator] = {}
        self.pairs: dict[tuple[str, str], Generator] = {}
        self.lock = threading.RLock()
        one = self.add("1", 1, 1, lambda: self.one, lambda: self.one, kind="constant")
        self.one = one.element()
        t = self.add("t", 0, 1, lambda: self.t / 2, lambda: (self.one + self.t) / 2, kind="identity")
        self.t = t.element()
        self.add(
            "eps",
            0,
            0,
            lambda: (self.eps + self.t) / 4,
            lambda: (self.eps + self.one - self.t) / 4,
        )

    def add(self, name, at0, at1, t0, t1, kind: str = "basic") -> Generator:
        with self.lock:
            if name in self.generators:
                raise ValueError(f"generator {name!r} already registered")
            g = Generator(name, at0, at1, t0, t1, self, kind)
            self.generators[name] = g
            return g

    def __getitem__(self, name: str) -> Generator:
        if name in self.generators:
            return self.generators[name]
        m = re.fullmatch(r"phi(\d+)", name)
        if m:
            return self._phi_generator(int(m.group(1)))
        raise KeyError(name)

    @property
    def eps(self) -> XElement:
        return self.generators["eps"].element()

    def phi(self, m: int) -> XElement:
        return self._phi_generator(m).element()

    def _phi_generator(self, m: int) -> Generator:
        if m < 0:
            raise ValueError("phi index must be >= 0")
        name = f"phi{m}"
        with self.lock:
            g = self.generators.get(name)
            if g is None:
                g = self.add(name, 0, 0, lambda: self._phi_rule(m, 0), lambda: self._phi_rule(m, 1))
            return g

    def _phi_rule(self, m: int, digit: int) -> XElement:
        t, one, eps = self.t, self.one, self.eps
        slope = 4 * m + 3
        if digit == 0:
            ramp = slope * t
            if m % 2 == 0:
                return (self.phi(m + 1) + ramp) / 8
            return (self.phi(m - 1) + eps + ramp) / 8
        ramp = slope * (one - t)
        if m == 0:
            return (self.phi(0) + ramp) / 8
        if m % 2 == 0:
            return (self.phi(m - 1) + eps + ramp) / 8
        return (self.phi(m + 1) + ramp) / 8

    def linear_family(
        self,
        names: Sequence[str],
        r: Sequence[Sequence[RatLike]],
        s: Sequence[Sequence[RatLike]],
        c: Sequence[RatLike],
    ) -> list[XElement]:
        """Register ``b_j`` vanishing at both ends with
        ``T0(b_j) = sum_i r[i][j] b_i + c_j t`` and ``T1(b_j) = sum_i s[i][j] b_i + c_j (1 - t)``.
        """
        n = len(names)
        gens: list[Generator] = []

        def rule(j: int, digit: int) -> XElement:
            mat = r if digit == 0 else s
            tail = self.t if digit == 0 else self.one - self.t
            acc = as_rat(c[j]) * tail
            for i in range(n):
                if mat[i][j]:
                    acc = acc + as_rat(mat[i][j]) * gens[i].element()
            return acc

        for j, name in enumerate(names):
            gens.append(
                self.add(name, 0, 0, (lambda j=j: rule(j, 0)), (lambda j=j: rule(j, 1)), kind="family")
            )
        return [g.element() for g in gens]

    def clear_caches(self) -> None:
        for g in self.generators.values():
            g._memo.clear()

    def parse(self, text: str) -> XElement:
        """Parse a combination such as ``"t+phi0"``, ``"2*eps - t/3"`` or ``"1"``."""
        src = text.replace(" ", "").replace("ε", "eps").replace("φ", "phi")
        if not src:
            raise ValueError("empty expression")
        if src[0] not in "+-":
            src = "+" + src
        token = re.compile(r"([+-])(?:(\d+(?:/\d+)?)\*)?([A-Za-z][A-Za-z0-9_]*|1)(?:/(\d+))?")
        pos, acc = 0, XElement()
        while pos < len(src):
            m = token.match(src, pos)
            if not m:
                raise ValueError(f"cannot parse {text!r} near {src[pos:]!r}")
            sign, coef, name, div = m.groups()
            c = Fraction(coef) if coef else Fraction(1)
            if div:
                c /= int(div)
            if sign == "-":
                c = -c
            acc = acc + c * self[name].element()
            pos = m.end()
        return acc


_default: Registry | None = None


def default_registry() -> Registry:
    global _default
    if _default is None:
        _default = Registry()
    return _default


def apply_T0(x: XElement) -> XElement:
    return x.T0()


def apply_T1(x: XElement) -> XElement:
    return x.T1()


def eval_at(x: XFunction, d: Dyadic) -> Fraction:
    return Fraction(x(d))


def values_on_grid(x: XFunction, n: int) -> list[Fraction]:
    return [Fraction(x(d)) for d in grid(n)]


def is_convex_on_grid(x: XFunction, n: int) -> bool:
    """Midpoint inequality ``2a(i/q) >= a((i-1)/q) + a((i+1)/q)`` for ``0 < i < q = 2**n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    v = values_on_grid(x, n)
    return all(2 * v[i] >= v[i - 1] + v[i + 1] for i in range(1, len(v) - 1))


def slope_bound_on_grid(x: XFunction, n: int) -> Fraction:
    if n < 1:
        raise ValueError("n must be >= 1")
    v = values_on_grid(x, n)
    return max(abs(b - a) for a, b in zip(v, v[1:])) * (1 << n)


def mu_estimate(x: XFunction, n: int) -> Fraction:
    return Fraction(x(make_dyadic(1, n))) * (1 << n)


def series_S(x: XFunction, order: int) -> TruncSeries:
    """Coefficients ``x(2**-n) * 2**n`` for ``n <= order``."""
    return TruncSeries([mu_estimate(x, n) for n in range(order + 1)], order)
