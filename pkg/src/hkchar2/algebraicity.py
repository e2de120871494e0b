"""Series engines and determinant machinery downstream of the ``#`` product.

Two routes to the coefficients of ``sum E1(2^-n) (32 w)^n`` with
``E1 = eps # phi0``: the tridiagonal band action of ``32 T0`` on the
``E_k = eps # phi_{k-1}``, and the closed algebraic form

    (1-16w)(1-4w)(1-2w)^2 S = 4w(1-2w)^2 + (2w - 12w^2) sqrt(1 - 4w^2).

The general construction handles any ``b_1`` in a finite ``T0, T1``-stable
space, encoded by matrices ``R, S`` and a vector ``c`` (see
:class:`StronglyRationalRep`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra.polys import BiPoly, UniPoly, mat_lift, mat_mul, poly_det
from .algebra.quadratic import QuadraticNumber, squarefree_part
from .algebra.rational import RatLike, as_rat
from .algebra.series import TruncSeries, series_sqrt

Matrix = list[list[Fraction]]


def e1_band_sequence(N: int) -> list[Fraction]:
    """``E1(2^-n) * 32^n`` for ``n = 0..N`` from the band rules for ``T = 32 T0``.

    State keys: ``k >= 1`` for ``E_k``, ``"ee"`` for ``eps#eps``, ``"t"`` for ``t``.
    Evaluation at 1 kills every ``E_k`` and ``eps#eps`` and sends ``t`` to 1.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    state: dict = {1: Fraction(1)}
    out = []
    for _ in range(N + 1):
        out.append(state.get("t", Fraction(0)))
        nxt: dict = {}

        def add(key, c):
            nxt[key] = nxt.get(key, 0) + c

        for key, c in state.items():
            if key == "t":
                add("t", 16 * c)
            elif key == "ee":
                add("ee", 4 * c)
                add("t", 4 * c)
            elif key == 1:
                add(1, c)
                add(2, c)
                add("t", 6 * c)
            else:
                add(key - 1, c)
                add(key + 1, c)
                add("t", (8 * key - 2) * c)
                add("ee", c)
        state = {k: v for k, v in nxt.items() if v}
    return out


def _poly(coeffs: Sequence[int], N: int) -> TruncSeries:
    return TruncSeries(coeffs, N)


def lemma_2_6_series(N: int) -> TruncSeries:
    """Expand the closed form for ``sum E1(2^-n)(32w)^n`` to order ``N``."""
    if N < 0:
        raise ValueError("N must be >= 0")
    one_m_2w_sq = _poly([1, -4, 4], N)
    numer = _poly([0, 4], N) * one_m_2w_sq + _poly([0, 2, -12], N) * series_sqrt(_poly([1, 0, -4], N))
    denom = _poly([1, -16], N) * _poly([1, -4], N) * one_m_2w_sq
    return numer / denom


def lambda_exact() -> QuadraticNumber:
    """Value of ``(1-16w) S`` at ``w = 1/16``, in Q(sqrt 7)."""
    w = Fraction(1, 16)
    root = QuadraticNumber.sqrt_of(1 - 4 * w * w, 7)
    numer = root * (2 * w - 12 * w * w) + 4 * w * (1 - 2 * w) ** 2
    return numer / ((1 - 4 * w) * (1 - 2 * w) ** 2)


def mu_uv_plus_f() -> QuadraticNumber:
    return lambda_exact() + 1


def convergence_table(n_max: int) -> list[dict]:
    """``E1(2^-n) 2^n`` against the exact limit, for ``n = 0..n_max``."""
    lam = lambda_exact()
    rows = []
    for n, v in enumerate(e1_band_sequence(n_max)):
        approx = v / Fraction(16) ** n
        err = abs(lam - approx)
        rows.append({"n": n, "value": approx, "error": err})
    return rows


@dataclass(frozen=True)
class StronglyRationalRep:
    """``T0 b_j = sum_i r[i][j] b_i + c_j t`` and ``T1 b_j = sum_i s[i][j] b_i + c_j (1 - t)``."""

    r: tuple[tuple[Fraction, ...], ...]
    s: tuple[tuple[Fraction, ...], ...]
    c: tuple[Fraction, ...]

    @classmethod
    def build(cls, r, s, c) -> "StronglyRationalRep":
        to = lambda m: tuple(tuple(as_rat(x) for x in row) for row in m)
        rep = cls(to(r), to(s), tuple(as_rat(x) for x in c))
        rep.validate()
        return rep

    @property
    def dim(self) -> int:
        return len(self.c)

    def validate(self) -> None:
        n = self.dim
        for m in (self.r, self.s):
            if len(m) != n or any(len(row) != n for row in m):
                raise ValueError("R and S must be square of the same size as c")


def eps_rep() -> StronglyRationalRep:
    """``b_1 = eps``: ``T0 eps = eps/4 + t/4`` and ``T1 eps = eps/4 + (1-t)/4``."""
    q = Fraction(1, 4)
    return StronglyRationalRep.build([[q]], [[q]], [q])


def general_e1_sequence(rep: StronglyRationalRep, N: int) -> list[Fraction]:
    """``E1(2^-n) * 8^n`` for ``E1 = b_1 # phi0`` and ``n = 0..N``.

    Iterates ``T = 8 T0`` on ``E_{j+lm} = b_j # phi_m`` together with
    ``Y = span(t, b_j # eps)``, where ``8 T0 t = 4t`` and
    ``8 T0 (b_j # eps) = 2 sum_i (r+s)[i][j] (b_i # eps) + 4 c_j t``.
    State keys: ``("E", m, j)``, ``("B", j)`` and ``"t"``.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    l = rep.dim
    R, S, c = rep.r, rep.s, rep.c
    state: dict = {("E", 0, 0): Fraction(1)}
    out = []
    for _ in range(N + 1):
        out.append(state.get("t", Fraction(0)))
        nxt: dict = {}

        def add(key, v):
            nxt[key] = nxt.get(key, 0) + v

        for key, v in state.items():
            if key == "t":
                add("t", 4 * v)
            elif key[0] == "B":
                j = key[1]
                for i in range(l):
                    rs = R[i][j] + S[i][j]
                    if rs:
                        add(("B", i), 2 * rs * v)
                add("t", 4 * c[j] * v)
            else:
                _, m, j = key
                add("t", (8 * m + 6) * c[j] * v)
                if m == 0:
                    down, up, tail = S, R, None
                    for i in range(l):
                        if down[i][j]:
                            add(("E", 0, i), down[i][j] * v)
                        if up[i][j]:
                            add(("E", 1, i), up[i][j] * v)
                    continue
                if m % 2:
                    lower, upper, tail = R, S, R
                else:
                    lower, upper, tail = S, R, S
                for i in range(l):
                    if lower[i][j]:
                        add(("E", m - 1, i), lower[i][j] * v)
                    if upper[i][j]:
                        add(("E", m + 1, i), upper[i][j] * v)
                    if tail[i][j]:
                        add(("B", i), tail[i][j] * v)
        state = {k: x for k, x in nxt.items() if x}
    return out


@dataclass
class BlockSystem:
    """``A, B, C, D`` (each ``2l x 2l``) and the ``|.|`` flag used to build them."""

    l: int
    A: Matrix
    B: Matrix
    C: Matrix
    D: Matrix
    absolute: bool = True
    notes: dict = field(default_factory=dict)

    def truncated_V(self, n_blocks: int) -> Matrix:
        """Finite corner of the infinite matrix, assembled from ``2l``-blocks."""
        s = 2 * self.l
        size = n_blocks * s
        V = [[Fraction(0)] * size for _ in range(size)]

        def put(bi, bj, M):
            for a in range(s):
                for b in range(s):
                    V[bi * s + a][bj * s + b] = M[a][b]

        for k in range(n_blocks):
            put(k, k, self.D if k == 0 else self.B)
            if k + 1 < n_blocks:
                put(k + 1, k, self.A)
                put(k, k + 1, self.C)
        return V


def _zeros(n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(n)]


def _blocks(tl: Matrix, tr: Matrix, bl: Matrix, br: Matrix) -> Matrix:
    return [a + b for a, b in zip(tl, tr)] + [a + b for a, b in zip(bl, br)]


def _rs(rep: StronglyRationalRep, absolute: bool) -> tuple[Matrix, Matrix]:
    f = abs if absolute else (lambda x: x)
    R = [[f(x) for x in row] for row in rep.r]
    S = [[f(x) for x in row] for row in rep.s]
    return R, S


def build_block_system(rep: StronglyRationalRep, absolute: bool = True) -> BlockSystem:
    """``D = [[S,R],[R,0]]``, ``B = [[0,R],[R,0]]``, ``A = [[0,S],[0,0]]``, ``C = [[0,0],[S,0]]``."""
    l = rep.dim
    R, S = _rs(rep, absolute)
    Z = _zeros(l)
    system = BlockSystem(
        l=l,
        D=_blocks(S, R, R, Z),
        B=_blocks(Z, R, R, Z),
        A=_blocks(Z, S, Z, Z),
        C=_blocks(Z, Z, S, Z),
        absolute=absolute,
    )
    other = _rs(rep, not absolute)
    system.notes["abs_matters"] = other != (R, S)
    return system


def direct_V(rep: StronglyRationalRep, n_blocks: int, absolute: bool = True) -> Matrix:
    """The infinite matrix built straight from ``l``-blocks: ``S`` first on the
    diagonal then zeros, and off-diagonal neighbours alternating ``R, S, R, ...``."""
    l = rep.dim
    R, S = _rs(rep, absolute)
    size = n_blocks * l
    V = [[Fraction(0)] * size for _ in range(size)]
    for a in range(l):
        for b in range(l):
            V[a][b] = S[a][b]
    for k in range(n_blocks - 1):
        M = R if k % 2 == 0 else S
        for a in range(l):
            for b in range(l):
                V[(k + 1) * l + a][k * l + b] = M[a][b]
                V[k * l + a][(k + 1) * l + b] = M[a][b]
    return V


def psi(J0: Sequence[Sequence[RatLike]], J1: Sequence[Sequence[RatLike]]) -> BiPoly:
    """``det(x I - w^2 (J0 + x J1)(J1 + x J0))``."""
    n = len(J0)
    if len(J1) != n or any(len(row) != n for row in list(J0) + list(J1)):
        raise ValueError("J0 and J1 must be square of the same size")
    x, w2 = BiPoly.x(), BiPoly.w() ** 2
    A, B = mat_lift(J0), mat_lift(J1)
    left = [[A[i][j] + x * B[i][j] for j in range(n)] for i in range(n)]
    right = [[B[i][j] + x * A[i][j] for j in range(n)] for i in range(n)]
    prod = mat_mul(left, right)
    m = [
        [(x if i == j else BiPoly()) - w2 * prod[i][j] for j in range(n)]
        for i in range(n)
    ]
    return poly_det(m)


# --- the five-dimensional worked example -------------------------------------

SECTION4_T0_ARROWS = {1: 2, 2: 3, 3: 1, 4: 5, 5: None}
SECTION4_T1_ARROWS = {5: 4, 4: 3, 3: 5, 2: 1, 1: None}


def arrows_to_matrix(arrows: dict[int, int | None], n: int) -> Matrix:
    """``b_j -> b_i`` puts a 1 in row ``i``, column ``j`` (operators act on columns)."""
    M = _zeros(n)
    for j, i in arrows.items():
        if i is not None:
            M[i - 1][j - 1] = Fraction(1)
    return M


def section4_matrices() -> tuple[Matrix, Matrix]:
    """Matrices of ``4 T0`` and ``4 T1`` on the five-dimensional space."""
    return arrows_to_matrix(SECTION4_T0_ARROWS, 5), arrows_to_matrix(SECTION4_T1_ARROWS, 5)


def psi_star() -> BiPoly:
    """Reference reciprocal sextic in ``x`` over Q[w]."""
    x, w = BiPoly.x(), BiPoly.w()
    return (
        w**10 * (x**6 + 1)
        - (2 * w**8 + w**4) * (x**5 + x)
        - (2 * w**8 - 3 * w**6 - 2 * w**2) * (x**4 + x**2)
        + (2 * w**10 - w**8 + 2 * w**6 - 4 * w**4 - 1) * x**3
    )


def section4_psi() -> BiPoly:
    J0, J1 = section4_matrices()
    return psi(J0, J1)


def reciprocal_to_cubic(p: BiPoly) -> BiPoly:
    """For ``p`` palindromic of degree ``2k`` in ``x``, return ``Q`` (as a BiPoly in
    ``(y, w)``) with ``p(x) / x^k = Q(x + 1/x)``."""
    d = p.degree_x()
    if d < 0 or d % 2 or not p.is_palindromic_x():
        raise ValueError("input must be palindromic of even degree in x")
    k = d // 2
    y = BiPoly.x()
    # P_j(y) = x^j + x^-j:  P_0 = 2, P_1 = y, P_{j+1} = y P_j - P_{j-1}
    P = [BiPoly.const(2), y]
    for _ in range(2, k + 1):
        P.append(y * P[-1] - P[-2])
    out = p.coeff_x(k).to_bipoly("w")
    for j in range(1, k + 1):
        out = out + p.coeff_x(k + j).to_bipoly("w") * P[j]
    return out


def u1_squared_parts() -> dict[str, UniPoly]:
    Q = reciprocal_to_cubic(psi_star())
    q_plus, q_minus = Q.substitute_x(2), Q.substitute_x(-2)
    return {"Q(2)": q_plus, "Q(-2)": q_minus, "u1^2": q_plus * q_minus}


def u1_squared() -> UniPoly:
    """``u1^2 = Q(2) Q(-2)``, since ``(rho - 1/rho)^2 = (rho + 1/rho)^2 - 4``."""
    return u1_squared_parts()["u1^2"]


def u1_squared_product_form() -> UniPoly:
    w2 = UniPoly([0, 0, 1])
    one = UniPoly([1])
    return (w2 - 1) ** 2 * (w2 + 1) ** 4 * ((one - w2) ** 2 - UniPoly.monomial(6, 4))


def residue_field_report(at: RatLike = Fraction(1, 16)) -> dict:
    from sympy import factorint

    value = u1_squared()(as_rat(at))
    s, k = squarefree_part(value)
    return {
        "w": as_rat(at),
        "u1_squared": value,
        "positive": value > 0,
        "squarefree_part": s,
        "square_factor": k,
        "factorization": {int(p): int(e) for p, e in factorint(s).items()},
    }


SECTION4_POLY = "u^6+u^3*v^3+v^6"


def section4_rep_from_phi(phi) -> tuple[StronglyRationalRep, dict]:
    """Recover the ``c_j`` of the five-dimensional example from ``phi_g``.

    With ``b1 = phi_g - t`` the arrows fix each ``b_j`` up to ``Q + Q t``;
    normalising the endpoints gives ``b2 = 4 T0 b1 - 4 c1 t``,
    ``b3 = 4 T0 b2 - 4 c2 t``, ``b5 = 4 T1 b3 - 4 c3 (1 - t)`` and
    ``b4 = 4 T1 b5 - 4 c5 (1 - t)``, where ``c_j = b_j(1/2)``. The returned
    dict holds the five functions so the remaining arrows can be checked.
    """
    from .xspace import HALF, half_of, half_plus

    t = lambda d: d.as_fraction()
    b: dict[int, object] = {}
    c: dict[int, Fraction] = {}

    def left(j, prev):
        return lambda d: 4 * b[prev](half_of(d)) - 4 * c[prev] * t(d)

    def right(j, prev):
        return lambda d: 4 * b[prev](half_plus(d)) - 4 * c[prev] * (1 - t(d))

    b[1] = lambda d: phi(d) - t(d)
    c[1] = b[1](HALF)
    for j, prev, side in ((2, 1, left), (3, 2, left), (5, 3, right), (4, 5, right)):
        b[j] = side(j, prev)
        c[j] = b[j](HALF)
    J0, J1 = section4_matrices()
    quarter = lambda M: [[x / 4 for x in row] for row in M]
    rep = StronglyRationalRep.build(quarter(J0), quarter(J1), [c[j] for j in range(1, 6)])
    return rep, b


def check_rep_against(rep: StronglyRationalRep, funcs: dict, level: int) -> list[str]:
    """Every arrow ``T0 b_j = sum r_ij b_i + c_j t`` (and the ``T1`` analogue) on ``grid(level)``.

    Returns a list of failure descriptions; empty means consistent.
    """
    from .xspace import grid, half_of, half_plus

    l = rep.dim
    failures = []
    for d in grid(level):
        t = d.as_fraction()
        for j in range(l):
            for digit, M, tail, move in ((0, rep.r, t, half_of), (1, rep.s, 1 - t, half_plus)):
                lhs = funcs[j + 1](move(d))
                rhs = sum((M[i][j] * funcs[i + 1](d) for i in range(l)), Fraction(0)) + rep.c[j] * tail
                if lhs != rhs:
                    failures.append(f"T{digit}(b{j + 1}) at {d}: {lhs} != {rhs}")
    return failures


def register_family(registry, rep: StronglyRationalRep, prefix: str = "b") -> list:
    """Register ``rep`` as generators ``b1..bl`` in ``registry`` (reuses them if present)."""
    names = [f"{prefix}{j}" for j in range(1, rep.dim + 1)]
    if all(n in registry.generators for n in names):
        return [registry.generators[n].element() for n in names]
    return registry.linear_family(names, rep.r, rep.s, rep.c)
