"""Command-line entry point: ``hkchar2 <subcommand> ...``.

Every subcommand prints one report (JSON by default) with exact rationals as
``"p/q"`` strings. Floats only appear under keys ending in ``_approx``.
The exit status is 0 exactly when every verdict in the report passes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

from . import algebraicity as alg
from . import colength as col
from . import gamma as gam
from .algebra.polys import BiPoly, UniPoly
from .algebra.quadratic import QuadraticNumber
from .algebra.rational import rat_str
from .sharp import sharp_eval_blackbox, sharp_symbolic
from .xspace import (
    Registry,
    XElement,
    default_registry,
    grid,
    is_convex_on_grid,
    mu_estimate,
    parse_dyadic,
    slope_bound_on_grid,
)

BASE_MAX_DIM = 4096
FLAGGED_MAX_DIM = 32768


class UsageError(Exception):
    pass


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, float)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rat_str(obj)
    if isinstance(obj, QuadraticNumber):
        return str(obj)
    if isinstance(obj, (BiPoly, UniPoly)):
        return obj.to_terms()
    if isinstance(obj, XElement):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return str(obj)


def _verdicts(report: dict) -> list[bool]:
    out = []
    for k, v in report.items():
        if k == "pass" and isinstance(v, bool):
            out.append(v)
        elif isinstance(v, dict):
            out += _verdicts(v)
    return out


# --- feasibility -------------------------------------------------------------


def _check_feasible(args, nvars: int, q: int) -> None:
    dim = q**nvars
    limit = BASE_MAX_DIM
    if args.max_dim:
        limit = args.max_dim
    elif (args.q32 and nvars <= 3) or (args.fivevar_q8 and nvars >= 4):
        limit = FLAGGED_MAX_DIM
    if dim > limit:
        hint = "--q32" if nvars <= 3 else "--fivevar-q8"
        raise UsageError(
            f"q={q} with {nvars} variables needs a {dim}-dimensional quotient; "
            f"the default envelope is {limit}. Pass {hint} (up to {FLAGGED_MAX_DIM}) "
            "or --max-dim to run it anyway."
        )


def _cache(args) -> col.ColengthCache | None:
    directory = args.cache or os.environ.get(col.CACHE_ENV)
    return col.ColengthCache(directory) if directory else None


def _power_of_two(text: str) -> int:
    q = int(text)
    if q < 1 or q & (q - 1):
        raise argparse.ArgumentTypeError(f"{text} is not a power of 2")
    return q


# --- subcommands -------------------------------------------------------------


def cmd_colength(args) -> dict:
    f = col.parse_poly(args.poly)
    _check_feasible(args, f.nvars, args.q)
    if args.i == "all":
        indices = list(range(args.q + 1))
    else:
        indices = [int(x) for x in args.i.split(",")]
    values = col.colengths(f, [(args.q, i) for i in indices], _cache(args), args.jobs)
    rows = [{"q": args.q, "i": i, "colength": values[(args.q, i)]} for i in indices]
    report: dict = {"polynomial": str(f), "variables": list(f.variables), "q": args.q, "values": rows}
    if len(rows) == 1:
        report["colength"] = rows[0]["colength"]
    return report


def _xfunction(args, text: str | None, poly: str | None, reg: Registry):
    if poly:
        f = col.parse_poly(poly)
        return col.phi_f(f, _cache(args)), f"phi_f[{f}]", f
    if not text:
        raise UsageError("give --gen or --poly")
    return reg.parse(text), text, None


def cmd_phi_eval(args) -> dict:
    reg = default_registry()
    x, label, f = _xfunction(args, args.gen, args.poly, reg)
    points = [parse_dyadic(p) for p in args.point]
    if f is not None:
        for d in points:
            _check_feasible(args, f.nvars, d.denominator)
    return {"function": label, "values": [{"point": str(d), "value": x(d)} for d in points]}


def cmd_grid(args) -> dict:
    reg = default_registry()
    x, label, f = _xfunction(args, args.gen, args.poly, reg)
    if f is not None:
        _check_feasible(args, f.nvars, 1 << args.level)
        x.prefetch(args.level, args.jobs)
    report: dict = {
        "function": label,
        "level": args.level,
        "points": [{"point": str(d), "value": x(d)} for d in grid(args.level)],
    }
    checks: dict = {}
    for check in args.check or []:
        if check == "convex":
            checks["convex"] = {"pass": is_convex_on_grid(x, args.level)}
        elif check == "slope":
            checks["slope_bound"] = slope_bound_on_grid(x, args.level)
        elif check == "mu":
            checks["mu_estimates"] = [mu_estimate(x, n) for n in range(args.level + 1)]
    if checks:
        report["checks"] = checks
    return report


def cmd_sharp(args) -> dict:
    reg = default_registry()
    a, b = reg.parse(args.left), reg.parse(args.right)
    points = [parse_dyadic(p) for p in args.point]
    rows = []
    for d in points:
        row: dict = {"point": str(d)}
        if args.engine in ("blackbox", "both"):
            row["blackbox"] = sharp_eval_blackbox(a, b, d)
        if args.engine in ("symbolic", "both"):
            row["symbolic"] = sharp_symbolic(a, b)(d)
        rows.append(row)
    report: dict = {"left": args.left, "right": args.right, "engine": args.engine, "values": rows}
    if args.engine == "both":
        report["agreement"] = {"pass": all(r["blackbox"] == r["symbolic"] for r in rows)}
    return report


def cmd_gamma(args) -> dict:
    if args.op == "delta":
        return {"op": "delta", "r": args.r, "class": gam.delta(args.r).to_json()}
    if args.op == "nim":
        return {"op": "nim", "i": args.r, "j": args.s, "product": f"lam{args.r ^ args.s}"}
    blocks = gam.jordan_tensor(args.r, args.s)
    algebra = gam.nim_mul(gam.delta(args.r), gam.delta(args.s))
    q = max(blocks)
    deltas = gam.delta_decompose(algebra, q)
    return {
        "op": "tensor",
        "r": args.r,
        "s": args.s,
        "blocks": blocks,
        "block_multiset": {str(k): v for k, v in gam.block_multiset(blocks).items()},
        "delta_coefficients": {f"delta{r}": d for r, d in enumerate(deltas, start=1) if d},
        "agreement": {"pass": gam.block_class(blocks) == algebra},
    }


def cmd_conjecture(args) -> dict:
    n_vars = 3
    _check_feasible(args, n_vars, args.qmax)
    report = col.verify_conjecture_2_3(args.qmax, _cache(args), args.jobs)
    if not args.points:
        report.pop("points")
    return report


def cmd_thm19(args) -> dict:
    f, g = col.parse_poly(args.f), col.parse_poly(args.g)
    _check_feasible(args, f.nvars + g.nvars, args.qmax)
    report = col.verify_thm_1_9(f, g, args.qmax, _cache(args), args.jobs)
    if not args.points:
        report.pop("points")
    return report


def cmd_series(args) -> dict:
    N = args.order
    if args.engine == "band":
        coeffs = alg.e1_band_sequence(N)
    elif args.engine == "closed":
        coeffs = list(alg.lemma_2_6_series(N).coeffs)
    else:
        coeffs = [v * 4**n for n, v in enumerate(alg.general_e1_sequence(alg.eps_rep(), N))]
    report: dict = {"engine": args.engine, "order": N, "series": "sum E1(2^-n) (32w)^n", "coefficients": coeffs}
    if args.compare:
        others = {
            "band": alg.e1_band_sequence(N),
            "closed": list(alg.lemma_2_6_series(N).coeffs),
        }
        report["agreement"] = {"pass": all(v == coeffs for v in others.values())}
    return report


def cmd_lambda(args) -> dict:
    lam = alg.lambda_exact()
    mu = alg.mu_uv_plus_f()
    table = alg.convergence_table(args.n)
    errs = [row["error"] for row in table]
    decreasing = all(errs[k + 1] < errs[k] for k in range(2, len(errs) - 1))
    small = errs[-1] < Fraction(1, 10**4)
    return {
        "lambda": lam,
        "lambda_approx": float(lam),
        "mu_uv_plus_f": mu,
        "mu_uv_plus_f_approx": float(mu),
        "convergence": [
            {"n": r["n"], "value": r["value"], "error_approx": float(r["error"])} for r in table
        ],
        "monotone_from_2": {"pass": decreasing},
        "below_1e-4_at_end": {"pass": small},
    }


def _load_matrix(text: str) -> list[list[Fraction]]:
    data = json.loads(text)
    return [[Fraction(str(x)) for x in row] for row in data]


def cmd_psi(args) -> dict:
    if args.data == "section4":
        J0, J1 = alg.section4_matrices()
        p = alg.psi(J0, J1)
        target = -(BiPoly.x() ** 2) * alg.psi_star()
        return {
            "data": "section4",
            "psi": p,
            "psi_star": alg.psi_star(),
            "equals_minus_x2_psi_star": {"pass": p == target},
        }
    if not (args.j0 and args.j1):
        raise UsageError("give --data section4 or both --j0 and --j1 as JSON matrices")
    return {"psi": alg.psi(_load_matrix(args.j0), _load_matrix(args.j1))}


def cmd_section4(args) -> dict:
    J0, J1 = alg.section4_matrices()
    p = alg.psi(J0, J1)
    star = alg.psi_star()
    parts = alg.u1_squared_parts()
    residue = alg.residue_field_report()
    report: dict = {
        "matrix_4T0": J0,
        "matrix_4T1": J1,
        "psi": {"value": p, "pass": p == -(BiPoly.x() ** 2) * star},
        "psi_star": {"value": star, "palindromic": star.is_palindromic_x()},
        "cubic_in_y": alg.reciprocal_to_cubic(star).to_terms(("y", "w")),
        "Q(2)": parts["Q(2)"],
        "Q(-2)": parts["Q(-2)"],
        "u1_squared": {
            "value": parts["u1^2"],
            "product_form": "(w^2-1)^2 (w^2+1)^4 ((1-w^2)^2 - 4 w^6)",
            "pass": parts["u1^2"] == alg.u1_squared_product_form(),
        },
        "residue_field": {
            "u1_squared_at_1/16": residue["u1_squared"],
            "squarefree_part": residue["squarefree_part"],
            "factorization": {str(k): v for k, v in residue["factorization"].items()},
            "pass": residue["factorization"] == {13: 1, 157: 1, 2039: 1} and residue["positive"],
        },
    }
    if args.u2_stretch:
        from .u2 import u2_report

        u2 = u2_report()
        u2["pass"] = u2["degree_in_T"] == 4 and all(u2["discriminant_divisible_by"].values())
        report["u2"] = u2
    return report


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", metavar="DIR", help=f"colength cache directory (or ${col.CACHE_ENV})")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for colength jobs")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--json", action="store_const", const="json", dest="format")
    common.add_argument("--seed", type=int, default=None, help="echoed in the report")
    common.add_argument("--no-timing", action="store_true", help="omit the timing block")
    common.add_argument("--q32", action="store_true", help="allow 3-variable quotients up to q=32")
    common.add_argument("--fivevar-q8", action="store_true", help="allow 5-variable quotients up to q=8")
    common.add_argument("--u2-stretch", action="store_true", help="include the u2 equation in section4-report")
    common.add_argument("--max-dim", type=int, default=0, help="override the quotient-dimension envelope")

    parser = argparse.ArgumentParser(prog="hkchar2", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("colength", parents=[common], help="colength of (u^q, f^i) over F2")
    p.add_argument("--poly", required=True)
    p.add_argument("--q", type=_power_of_two, required=True)
    p.add_argument("--i", default="1", help="an index, a comma list, or 'all'")
    p.set_defaults(func=cmd_colength)

    p = sub.add_parser("phi-eval", parents=[common], help="evaluate an element of X")
    p.add_argument("--gen")
    p.add_argument("--poly", help="use the colength function of this polynomial")
    p.add_argument("--point", action="append", required=True)
    p.set_defaults(func=cmd_phi_eval)

    p = sub.add_parser("grid", parents=[common], help="values on the level-n grid plus checks")
    p.add_argument("--gen")
    p.add_argument("--poly")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--check", action="append", choices=("convex", "slope", "mu"))
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("sharp", parents=[common], help="evaluate a # b")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--point", action="append", required=True)
    p.add_argument("--engine", choices=("blackbox", "symbolic", "both"), default="both")
    p.set_defaults(func=cmd_sharp)

    p = sub.add_parser("gamma", parents=[common], help="Grothendieck ring operations")
    p.add_argument("--op", choices=("tensor", "delta", "nim"), default="tensor")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, default=1)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("conjecture", parents=[common], help="colengths of x^3+y^3+xyz against t+phi0")
    p.add_argument("--qmax", type=_power_of_two, default=16)
    p.add_argument("--points", action="store_true", help="list every compared point")
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("thm19", parents=[common], help="phi_{f+g} against phi_f # phi_g")
    p.add_argument("--f", default="u*v")
    p.add_argument("--g", default=col.NODAL_CUBIC)
    p.add_argument("--qmax", type=_power_of_two, default=4)
    p.add_argument("--points", action="store_true")
    p.set_defaults(func=cmd_thm19)

    p = sub.add_parser("series", parents=[common], help="coefficients of sum E1(2^-n)(32w)^n")
    p.add_argument("--engine", choices=("band", "closed", "general"), default="band")
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--compare", action="store_true")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("lambda", parents=[common], help="exact limit and convergence table")
    p.add_argument("--n", type=int, default=12)
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("psi", parents=[common], help="det(xI - w^2 (J0 + x J1)(J1 + x J0))")
    p.add_argument("--data", choices=("section4",))
    p.add_argument("--j0")
    p.add_argument("--j1")
    p.set_defaults(func=cmd_psi)

    p = sub.add_parser("section4-report", parents=[common], help="the five-dimensional worked example")
    p.set_defaults(func=cmd_section4)
    return parser


def render(report: dict, fmt: str) -> str:
    data = to_jsonable(report)
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=False)
    if fmt == "csv":
        rows = data.get("values") or data.get("points") or []
        if not rows:
            raise UsageError("csv output needs a list of values")
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue().rstrip("\n")
    lines = []
    for k, v in data.items():
        lines.append(f"{k}: {v if isinstance(v, (str, int, float, bool)) else json.dumps(v)}")
    return "\n".join(lines)


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    start = time.perf_counter()
    try:
        body = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"hkchar2 {args.command}: {exc}", file=sys.stderr)
        return 2
    report = {"command": args.command}
    if args.seed is not None:
        report["seed"] = args.seed
    report.update(body)
    ok = all(_verdicts(report))
    report["verdict"] = "pass" if ok else "fail"
    if not args.no_timing and args.format == "json":
        report["timing"] = {"seconds_approx": round(time.perf_counter() - start, 3)}
    try:
        print(render(report, args.format), file=out)
    except UsageError as exc:
        print(f"hkchar2 {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
