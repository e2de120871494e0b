from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations_with_replacement, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hkchar2.gamma import (
    GammaElement,
    L_n,
    block_class,
    block_multiset,
    blocks_from_ranks,
    convexity_certificate,
    delta,
    delta_decompose,
    from_deltas,
    jordan_tensor,
    nim_mul,
)
from hkchar2.sharp import BlackboxSharp, sharp_symbolic
from hkchar2.xspace import Registry, half_of, half_plus

lam = GammaElement.lam
FAMILY = ["t", "eps", "phi0", "phi1"]

gammas = st.dictionaries(
    st.integers(0, 63), st.fractions(min_value=-9, max_value=9, max_denominator=8), max_size=6
).map(GammaElement)


@pytest.fixture(scope="module")
def reg() -> Registry:
    return Registry()


def test_nim_basics():
    assert lam(2) * lam(3) == lam(1)
    x = lam(5, 3) + lam(9, Fraction(-1, 2))
    assert lam(0) * x == x
    assert delta(2) * delta(2) == 2 * delta(2)
    assert delta(1) == lam(0)
    assert delta(4) == lam(0) - lam(1) + lam(2) - lam(3)
    with pytest.raises(ValueError):
        delta(0)


@given(gammas, gammas, gammas)
@settings(max_examples=80, deadline=None)
def test_nim_ring_laws(a, b, c):
    assert nim_mul(a, b) == nim_mul(b, a)
    assert nim_mul(nim_mul(a, b), c) == nim_mul(a, nim_mul(b, c))
    assert nim_mul(a, b + c) == nim_mul(a, b) + nim_mul(a, c)


def test_L_n_examples(reg):
    assert L_n(reg.phi(0), 0) == GammaElement()
    assert L_n(reg.t + 3 * reg.one, 0) == lam(0)
    assert L_n(reg.t, 1) == (lam(0) - lam(1)) * Fraction(1, 2)
    assert L_n(reg.eps, 1) == (lam(0) + lam(1)) * Fraction(1, 4)


def test_delta_decompose_examples(reg):
    assert delta_decompose(delta(3), 4) == [0, 0, 1, 0]
    assert delta_decompose(L_n(reg.t, 1), 2) == [0, Fraction(1, 2)]
    # eps satisfies the midpoint inequality, so the certificate accepts it
    assert delta_decompose(L_n(reg.eps, 1), 2) == [Fraction(1, 2), Fraction(-1, 4)]
    assert convexity_certificate(L_n(reg.eps, 1), 2)
    with pytest.raises(ValueError):
        delta_decompose(lam(4), 4)


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6), min_size=1, max_size=8))
def test_delta_round_trip(ds):
    g = from_deltas(ds)
    assert delta_decompose(g, len(ds)) == ds


@pytest.mark.parametrize("name", FAMILY + ["phi2", "phi3"])
def test_convex_elements_have_certificates(reg, name):
    x = reg[name].element()
    for n in range(1, 6):
        assert convexity_certificate(L_n(x, n), 1 << n)


def test_non_convex_element_fails_certificate():
    square = lambda d: d.as_fraction() ** 2
    for n in range(1, 5):
        assert not convexity_certificate(L_n(square, n), 1 << n)


@pytest.mark.parametrize("names", list(combinations_with_replacement(FAMILY, 2)))
def test_L_n_multiplicative(reg, names):
    a, b = (reg[n].element() for n in names)
    prod_sym = sharp_symbolic(a, b)
    prod_box = BlackboxSharp(a, b)
    for n in range(5):
        expected = nim_mul(L_n(a, n), L_n(b, n))
        assert L_n(prod_sym, n) == expected
        if n <= 3:
            assert L_n(prod_box, n) == expected


@pytest.mark.parametrize("name", FAMILY)
def test_L_n_halving_rule(reg, name):
    x = reg[name].element()
    a0 = lambda d: x(half_of(d))
    a1 = lambda d: x(half_plus(d))
    for n in range(1, 5):
        q = 1 << n
        assert L_n(x, n + 1) == L_n(a0, n) + lam(q) * L_n(a1, n)
    # at n = 0 the sign of the lam1 term flips, since (-1)^(q+i) = -(-1)^i for q = 1
    assert L_n(x, 1) == L_n(a0, 0) - lam(1) * L_n(a1, 0)


def test_jordan_tensor_examples():
    assert jordan_tensor(1, 5) == [5]
    assert jordan_tensor(2, 2) == [2, 2]
    assert jordan_tensor(2, 4) == [4, 4]
    assert block_multiset([4, 4, 1]) == {4: 2, 1: 1}
    assert blocks_from_ranks([3, 1, 0]) == [2, 1]


@pytest.mark.parametrize("q", [1, 2, 4, 8])
def test_tensor_classes_match_nim_algebra(q):
    for r, s in product(range(1, q + 1), repeat=2):
        blocks = jordan_tensor(r, s)
        assert sum(blocks) == r * s
        algebra = nim_mul(delta(r), delta(s))
        assert block_class(blocks) == algebra
        coeffs = delta_decompose(algebra, r + s)
        assert all(c >= 0 and c.denominator == 1 for c in coeffs)
    for r in range(1, q + 1):
        assert nim_mul(delta(r), delta(q)) == r * delta(q)


def test_random_tensor_products_are_symmetric():
    rng = random.Random(3)
    for _ in range(10):
        r, s = rng.randint(1, 12), rng.randint(1, 12)
        assert jordan_tensor(r, s) == jordan_tensor(s, r)
