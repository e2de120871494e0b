"""Optional: a degree-4 equation over Q(w) for ``u2 = w^10 (rho sigma tau + 1/(rho sigma tau))``.

With ``y_k = rho_k + 1/rho_k`` the roots of the cubic attached to the
reciprocal sextic and ``a_k^2 = y_k^2 - 4``,

    rho sigma tau + 1/(rho sigma tau) = (y1 y2 y3 + y1 a2 a3 + y2 a1 a3 + y3 a1 a2) / 4.

The four conjugates flip an even number of signs among the three products,
so ``Z = 4 u2 / w^10 - e3`` satisfies
``Z^4 - 2 P2 Z^2 - 8 pqr Z + P2^2 - 4 P22`` with ``P2, P22, pqr`` symmetric in
the ``y_k``. This uses sympy and is not needed by anything else.
"""

from __future__ import annotations

from functools import reduce

import sympy as sp
from sympy.polys.polyfuncs import symmetrize

from .algebra.polys import BiPoly
from .algebraicity import psi_star, reciprocal_to_cubic

W, T = sp.symbols("w T")

RAMIFIED_WITNESSES = (
    "1 - w**2 + 2*w**3",
    "1 - w**2 - 2*w**3",
    "4 + 8*w**2 - 4*w**4 - 12*w**6 - 23*w**8 - 18*w**10 + 81*w**12 + 108*w**14",
)


def _to_sympy_in_w(poly) -> sp.Expr:
    return sum(sp.Rational(c.numerator, c.denominator) * W**k for k, c in enumerate(poly.coeffs))


def u2_min_poly() -> sp.Poly:
    Q: BiPoly = reciprocal_to_cubic(psi_star())
    a = [_to_sympy_in_w(Q.coeff_x(k)) for k in range(4)]
    e1, e2, e3 = -a[2] / a[3], a[1] / a[3], -a[0] / a[3]

    y1, y2, y3, Z = sp.symbols("y1 y2 y3 Z")
    sq = lambda y: y**2 - 4
    p2 = y1**2 * sq(y2) * sq(y3)
    q2 = y2**2 * sq(y1) * sq(y3)
    r2 = y3**2 * sq(y1) * sq(y2)
    pqr = y1 * y2 * y3 * sq(y1) * sq(y2) * sq(y3)

    def in_elementary(expr):
        poly, rest, names = symmetrize(expr, y1, y2, y3, formal=True)
        if rest != 0:
            raise ArithmeticError("expression is not symmetric")
        values = dict(zip((s for s, _ in names), (e1, e2, e3)))
        return poly.subs(values)

    P2 = in_elementary(p2 + q2 + r2)
    P22 = in_elementary(p2 * q2 + q2 * r2 + r2 * p2)
    PQR = in_elementary(pqr)
    quartic = Z**4 - 2 * P2 * Z**2 - 8 * PQR * Z + P2**2 - 4 * P22
    expr = sp.together(quartic.subs(Z, 4 * T / W**10 - e3))
    numer, _ = sp.fraction(expr)
    poly = sp.Poly(sp.expand(numer), T)
    # clear the content in Q[w] and make the leading coefficient monic in w
    content = reduce(sp.gcd, poly.all_coeffs())
    poly = sp.Poly(sp.expand(sp.cancel(poly.as_expr() / content)), T)
    lc = sp.Poly(poly.LC(), W).LC()
    return sp.Poly(sp.expand(poly.as_expr() / lc), T)


def u2_report() -> dict:
    poly = u2_min_poly()
    disc = sp.Poly(sp.discriminant(poly.as_expr(), T), W)
    divides = {}
    for text in RAMIFIED_WITNESSES:
        prime = sp.Poly(sp.sympify(text, locals={"w": W}), W)
        divides[text] = disc.rem(prime).is_zero
    return {
        "degree_in_T": poly.degree(T),
        "polynomial": str(poly.as_expr()),
        "discriminant_divisible_by": divides,
    }
