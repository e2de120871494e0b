from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from hkchar2.sharp import BlackboxSharp, pair_generator, sharp_eval_blackbox, sharp_symbolic
from hkchar2.xspace import (
    HALF,
    Registry,
    grid,
    is_convex_on_grid,
    make_dyadic,
    parse_dyadic,
    slope_bound_on_grid,
)

NAMES = ["1", "t", "eps", "phi0", "phi1", "phi2"]


@pytest.fixture(scope="module")
def reg() -> Registry:
    return Registry()


def test_documented_values(reg):
    t, one, eps, phi0 = reg.t, reg.one, reg.eps, reg.phi(0)
    for d in grid(4):
        assert sharp_eval_blackbox(t, t, d) == d.as_fraction()
        assert sharp_eval_blackbox(one, phi0, d) == 0
    assert sharp_eval_blackbox(eps, eps, HALF) == Fraction(1, 8)
    assert sharp_eval_blackbox(eps, phi0, HALF) == Fraction(3, 16)
    assert sharp_symbolic(eps, phi0)(parse_dyadic("1/4")) == Fraction(29, 256)
    assert sharp_symbolic(reg.t + eps, reg.t + phi0)(make_dyadic(1, 0)) == 1
    assert not sharp_symbolic(t, phi0).coeffs
    assert sharp_symbolic(t, t + eps) == t


@pytest.mark.slow
@pytest.mark.parametrize("pair", list(combinations_with_replacement(NAMES, 2)))
def test_engines_agree_to_level_8(reg, pair):
    a, b = (reg[n].element() for n in pair)
    sym = sharp_symbolic(a, b)
    box = BlackboxSharp(a, b)
    for n in range(9):
        for i in range(1, 1 << n, 2):
            d = make_dyadic(i, n)
            assert sym(d) == box(d), (pair, d)


def _random_combo(reg, rng):
    out = reg.parse("0*t")
    for name in NAMES:
        out = out + Fraction(rng.randint(-5, 5), rng.randint(1, 4)) * reg[name].element()
    return out


@pytest.mark.parametrize("seed", range(3))
def test_bilinear_and_symmetric(reg, seed):
    rng = random.Random(seed)
    a, b, c = (_random_combo(reg, rng) for _ in range(3))
    k = Fraction(rng.randint(1, 9), rng.randint(1, 9))
    lhs = sharp_symbolic(a + k * b, c)
    rhs = sharp_symbolic(a, c) + k * sharp_symbolic(b, c)
    for d in grid(6):
        assert lhs(d) == rhs(d)
        assert sharp_symbolic(a, c)(d) == sharp_symbolic(c, a)(d)
    for d in grid(4):
        assert sharp_eval_blackbox(a, c, d) == sharp_eval_blackbox(c, a, d)


@pytest.mark.parametrize("names", list(combinations_with_replacement(["t", "eps", "phi0"], 3)))
def test_associative_on_level_5(reg, names):
    a, b, c = (reg[n].element() for n in names)
    left = sharp_symbolic(sharp_symbolic(a, b), c)
    right = sharp_symbolic(a, sharp_symbolic(b, c))
    for d in grid(5):
        assert left(d) == right(d)


def test_pair_generators_are_shared(reg):
    g, h = reg["eps"], reg["phi0"]
    assert pair_generator(g, h) is pair_generator(h, g)
    with pytest.raises(ValueError):
        pair_generator(g, Registry()["eps"])


CONVEX = ["t", "eps", "phi0", "phi1", "phi2", "phi3"]


@pytest.mark.parametrize("pair", list(combinations_with_replacement(CONVEX, 2)))
def test_product_of_convex_is_convex(reg, pair):
    a, b = (reg[n].element() for n in pair)
    assert is_convex_on_grid(a, 7) and is_convex_on_grid(b, 7)
    assert is_convex_on_grid(sharp_symbolic(a, b), 7)


@pytest.mark.parametrize("pair", list(combinations_with_replacement(CONVEX, 2)))
def test_slope_bound_squares(reg, pair):
    a, b = (reg[n].element() for n in pair)
    m = max(slope_bound_on_grid(a, 6), slope_bound_on_grid(b, 6))
    assert slope_bound_on_grid(sharp_symbolic(a, b), 6) <= m * m


def test_e1_scaled_values(reg):
    e1 = sharp_symbolic(reg.eps, reg.phi(0))
    scaled = [e1(make_dyadic(1, n)) * 32**n for n in range(9)]
    assert scaled == [0, 6, 116, 1908, 30664, 490988, 7856856, 125712968, 2011418576]
