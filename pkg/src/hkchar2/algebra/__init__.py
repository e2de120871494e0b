"""Exact arithmetic primitives: rationals, polynomials, series, Q(sqrt d), GF(2) matrices."""

from .gf2 import F2Matrix, f2_rank
from .polys import BiPoly, UniPoly, cofactor_det, mat_lift, mat_mul, poly_det
from .quadratic import QuadraticNumber, squarefree_part
from .rational import Rat, as_rat, parse_rat, rat_str, rational_sqrt
from .series import TruncSeries, series_sqrt

__all__ = [
    "BiPoly",
    "F2Matrix",
    "QuadraticNumber",
    "Rat",
    "TruncSeries",
    "UniPoly",
    "as_rat",
    "cofactor_det",
    "f2_rank",
    "mat_lift",
    "mat_mul",
    "parse_rat",
    "poly_det",
    "rat_str",
    "rational_sqrt",
    "series_sqrt",
    "squarefree_part",
]
