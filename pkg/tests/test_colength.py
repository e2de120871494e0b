from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from hkchar2 import colength as col
from hkchar2.algebra import F2Matrix
from hkchar2.xspace import is_convex_on_grid, make_dyadic, slope_bound_on_grid

CUBIC = col.parse_poly(col.NODAL_CUBIC)


def _dense_colength(f: col.F2MultiPoly, q: int, i: int) -> int:
    """Independent oracle: dense matrix of multiplication by f^i on the monomial box."""
    r = f.nvars
    box = list(product(range(q), repeat=r))
    index = {m: k for k, m in enumerate(box)}
    g = {(0,) * r}
    for _ in range(i):
        nxt: set = set()
        for a in g:
            for b in f.monomials:
                m = tuple(x + y for x, y in zip(a, b))
                if max(m) < q:
                    nxt ^= {m}
        g = nxt
    dense = np.zeros((len(box), len(box)), dtype=np.uint8)
    for m in box:
        for a in g:
            prod_ = tuple(x + y for x, y in zip(m, a))
            if max(prod_) < q:
                dense[index[prod_], index[m]] ^= 1
    return len(box) - F2Matrix.from_dense(dense).rank()


def test_parse_poly():
    assert len(CUBIC.monomials) == 3 and CUBIC.variables == ("x", "y", "z")
    assert len(col.parse_poly("u*v").monomials) == 1
    assert col.parse_poly("x+x").is_zero()
    assert col.parse_poly("3*x^2+2*y") == col.parse_poly("y^0*x^2+x^2+x^2")
    for bad in ("", "x-y", "x^", "x+", "x**2", "2x$"):
        with pytest.raises(ValueError):
            col.parse_poly(bad)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        col.colength(col.parse_poly("x+1"), 2, 1)
    with pytest.raises(ValueError):
        col.colength(CUBIC, 3, 1)
    with pytest.raises(ValueError):
        col.colength(col.parse_poly("x+x"), 2, 1)
    with pytest.raises(ValueError):
        col.colength(CUBIC, 2, -1)


def test_known_colengths():
    assert col.colength(CUBIC, 2, 1) == 7
    assert col.colength(CUBIC, 4, 1) == 35
    assert col.colength(col.parse_poly("u*v"), 8, 3) == 39
    assert col.colength(CUBIC, 4, 0) == 0
    assert col.colength(CUBIC, 4, 4) == 64


@pytest.mark.parametrize(
    "text,q", [(col.NODAL_CUBIC, 2), (col.NODAL_CUBIC, 4), ("u*v", 8), ("x^2+x*y^3", 4), ("x*y+z^3+x^2*z", 4)]
)
def test_colength_matches_dense_oracle(text, q):
    f = col.parse_poly(text)
    for i in range(q + 1):
        assert col.colength_uncached(f, q, i) == _dense_colength(f, q, i)


def test_well_defined(cache):
    for q in (1, 2, 4, 8):
        for i in range(q + 1):
            assert col.well_defined_at(CUBIC, q, i, cache)


def test_phi_f_shape(cache):
    phi = col.phi_f(CUBIC, cache)
    phi.prefetch(4)
    assert phi(make_dyadic(0, 0)) == 0 and phi(make_dyadic(1, 0)) == 1
    assert is_convex_on_grid(phi, 4)
    mu = col.mu_hk_estimate(CUBIC, 4, cache)
    assert slope_bound_on_grid(phi, 4) <= mu


@pytest.mark.parametrize("text", [col.NODAL_CUBIC, "u*v", "x^2+y^3"])
def test_second_differences(text, cache):
    f = col.parse_poly(text)
    q = 8 if f.nvars == 3 else 16
    c = [col.colength(f, q, i, cache) for i in range(q + 1)]
    # colength grows with i, with shrinking increments
    for i in range(1, q):
        assert c[i] - c[i - 1] >= c[i + 1] - c[i] >= 0


def test_mu_estimates(cache):
    vals = [col.mu_hk_estimate(CUBIC, n, cache) for n in range(5)]
    assert vals == [1, Fraction(7, 4), Fraction(35, 16), Fraction(145, 64), Fraction(591, 256)]


def test_cache_round_trip(tmp_path):
    c1 = col.ColengthCache(tmp_path)
    assert col.colength(CUBIC, 4, 1, c1) == 35
    c2 = col.ColengthCache(tmp_path)
    assert c2.get(CUBIC, 4, 1) == 35
    assert c2.get(CUBIC, 4, 1) == col.colength_uncached(CUBIC, 4, 1)
    with pytest.raises(RuntimeError):
        c2.put(CUBIC, 4, 1, 36)
    c2.put(CUBIC, 4, 1, 35)
    assert len(col.ColengthCache(tmp_path)) == 1


def test_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv(col.CACHE_ENV, str(tmp_path))
    assert col.default_cache().directory == tmp_path
    monkeypatch.delenv(col.CACHE_ENV)
    assert col.default_cache() is None


def test_parallel_matches_serial():
    jobs = [(8, i) for i in range(9)]
    assert col.colengths(CUBIC, jobs, workers=2) == col.colengths(CUBIC, jobs, workers=1)


def test_conjecture_to_16(cache):
    report = col.verify_conjecture_2_3(16, cache)
    assert report["points_checked"] == 17
    assert report["mismatches"] == [] and report["pass"]


def test_sum_of_disjoint_polys(cache):
    report = col.verify_thm_1_9(col.parse_poly("u*v"), CUBIC, 4, cache)
    assert report["pass"], report["mismatches"]
    report = col.verify_thm_1_9(col.parse_poly("u^2"), col.parse_poly("v^3"), 8, cache)
    assert report["pass"], report["mismatches"]
    with pytest.raises(ValueError):
        col.verify_thm_1_9(CUBIC, col.parse_poly("x*w"), 2)
