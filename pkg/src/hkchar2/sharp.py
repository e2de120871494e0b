"""The bilinear product ``#`` on X, in two engines.

``sharp_eval_blackbox`` follows the inductive definition literally on any
callables. ``sharp_symbolic`` works on :class:`XElement` values: it expands
bilinearly down to generator pairs and registers each pair ``g#h`` as a new
generator whose halving rules are::

    T0(g#h) = T0 g # T0 h + T1 g # T1 h
    T1(g#h) = (g#h)(1/2) + T0 g # T1 h + T1 g # T0 h
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .xspace import (
    ONE,
    ZERO,
    Dyadic,
    Generator,
    Registry,
    XElement,
    XFunction,
    half_of,
    half_plus,
    make_dyadic,
)


def _jump(f: XFunction) -> Fraction:
    return Fraction(f(ONE)) - Fraction(f(ZERO))


def sharp_value_at_one(a: XFunction, b: XFunction) -> Fraction:
    return _jump(a) * _jump(b)


def _left(f: XFunction) -> XFunction:
    return lambda d: f(half_of(d))


def _right(f: XFunction) -> XFunction:
    return lambda d: f(half_plus(d))


def sharp_eval_blackbox(a: XFunction, b: XFunction, d: Dyadic) -> Fraction:
    """Evaluate ``(a#b)(d)`` by the defining recursion on the denominator of ``d``.

    Cost grows like ``2**level``; meant for levels up to about 10.
    """
    if d.num == 0:
        return Fraction(0)
    if d.level == 0:
        return sharp_value_at_one(a, b)
    a0, a1, b0, b1 = _left(a), _right(a), _left(b), _right(b)
    digit, inner = d.zoom()
    if digit == 0:
        return sharp_eval_blackbox(a0, b0, inner) + sharp_eval_blackbox(a1, b1, inner)
    return (
        sharp_value_at_one(a0, b0)
        + sharp_value_at_one(a1, b1)
        + sharp_eval_blackbox(a0, b1, inner)
        + sharp_eval_blackbox(a1, b0, inner)
    )


class BlackboxSharp:
    """``a#b`` as a memoized callable, built on :func:`sharp_eval_blackbox`."""

    def __init__(self, a: XFunction, b: XFunction):
        self.a, self.b = a, b
        self._eval = lru_cache(maxsize=None)(lambda d: sharp_eval_blackbox(a, b, d))

    def __call__(self, d: Dyadic) -> Fraction:
        return self._eval(d)


def _registry_of(*elems: XElement) -> Registry:
    for e in elems:
        for g in e.coeffs:
            return g.registry
    from .xspace import default_registry

    return default_registry()


def sharp_symbolic(a: XElement, b: XElement) -> XElement:
    """``a#b`` as an element of X over lazily created pair generators."""
    reg = _registry_of(a, b)
    t_gen = reg.generators["t"]
    out: dict[Generator, Fraction] = {}

    def add(g: Generator, c: Fraction) -> None:
        out[g] = out.get(g, 0) + c

    for g, cg in a.items():
        if g.kind == "constant":
            continue
        for h, ch in b.items():
            if h.kind == "constant":
                continue
            c = cg * ch
            if g is t_gen:
                add(t_gen, c * h.jump)
            elif h is t_gen:
                add(t_gen, c * g.jump)
            else:
                add(pair_generator(g, h), c)
    return XElement(out)


def pair_generator(g: Generator, h: Generator) -> Generator:
    """The generator for ``g#h``, created once per unordered pair."""
    reg = g.registry
    if h.registry is not reg:
        raise ValueError("generators come from different registries")
    if h.name < g.name:
        g, h = h, g
    key = (g.name, h.name)
    hit = reg.pairs.get(key)
    if hit is not None:
        return hit
    with reg.lock:
        hit = reg.pairs.get(key)
        if hit is not None:
            return hit
        ga, ha = g.element(), h.element()

        def rule0() -> XElement:
            return sharp_symbolic(ga.T0(), ha.T0()) + sharp_symbolic(ga.T1(), ha.T1())

        def rule1() -> XElement:
            mid = ga.T0().jump() * ha.T0().jump() + ga.T1().jump() * ha.T1().jump()
            return (
                mid * reg.one
                + sharp_symbolic(ga.T0(), ha.T1())
                + sharp_symbolic(ga.T1(), ha.T0())
            )

        gen = reg.add(f"({g.name}#{h.name})", 0, g.jump * h.jump, rule0, rule1, kind="pair")
        reg.pairs[key] = gen
        return gen


def midpoint_value(g: Generator) -> Fraction:
    """``g(1/2)``; for pair generators this is the cached product-of-jumps formula."""
    return g.value(make_dyadic(1, 1))
