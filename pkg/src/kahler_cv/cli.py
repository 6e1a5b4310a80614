"""Command-line front end.

Usage::

    kahler-cv valuate -e "1/z" --circle 0,0,1,ccw
    kahler-cv cauchy -e "exp(z)" --circle 0,0,1 --at 0.3,0.2 --json
    kahler-cv check -e "exp(z)" --grid -1,1,-1,1,5

Exit codes: 0 success, 2 bad input (expression or arguments),
3 singular integrand or exhausted quadrature budget, 4 geometry error
(point not enclosed, overlapping circles).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Optional, Sequence

from .cauchy_suite import (
    PoleSpec,
    cauchy_derivative_result,
    cauchy_value_result,
    decompose_valuation,
    goursat_residual,
    residue,
)
from .contour import (
    CCW,
    Circle,
    Polyline,
    QuadratureConfig,
    curve_from_json,
    potential_result,
    valuation,
)
from .errors import (
    BudgetExceeded,
    GeometryError,
    NonFinite,
    ParseError,
    PoleOnOrOutside,
    SingularEvaluation,
    SingularOnCurve,
    ZeroDivisor,
)
from .expr_field import Point, grid, is_strict_harmonic, parse_expr, raw_field
from .kahler_core import Edif, format_edif

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SINGULAR = 3
EXIT_GEOMETRY = 4

TOL_ENV = "KAHLER_CV_TOL"


class UsageError(Exception):
    pass


def _floats(text: str, n: Optional[int] = None, what: str = "value") -> list[float]:
    try:
        vals = [float(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"could not parse {what} {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    return vals


def _point(text: str) -> Point:
    x, y = _floats(text, 2, "point")
    return Point(x, y)


def _points(text: str) -> list[Point]:
    return [_point(chunk) for chunk in text.split(";") if chunk.strip()]


def _circle(text: str) -> Circle:
    parts = text.split(",")
    orient = CCW
    if len(parts) == 4:
        orient = parts.pop().strip()
    cx, cy, r = _floats(",".join(parts), 3, "circle")
    return Circle(Point(cx, cy), r, orient)


def _curve(args, required: bool = True):
    given = [a for a in ("circle", "polyline", "curve_json") if getattr(args, a, None)]
    if len(given) > 1:
        raise UsageError("give only one of --circle, --polyline, --curve-json")
    if args.circle:
        return _circle(args.circle)
    if args.polyline:
        return Polyline(tuple(_points(args.polyline)), closed=not args.open)
    if args.curve_json:
        try:
            return curve_from_json(json.loads(args.curve_json))
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"bad curve JSON: {exc}") from None
    if required:
        raise UsageError("a curve is required (--circle, --polyline or --curve-json)")
    return None


def _config(args) -> QuadratureConfig:
    rel = args.rel_tol
    if rel is None:
        env = os.environ.get(TOL_ENV)
        rel = float(env) if env else QuadratureConfig.rel_tol
    return QuadratureConfig(rel_tol=rel, abs_tol=args.abs_tol, max_evals=args.max_evals)


class _SampleWriter:
    def __init__(self, path: Optional[str]):
        self.path = path
        self.rows = []

    def __call__(self, piece, t, x, y, u, v):
        self.rows.append((t, x, y, u, v))

    @property
    def sink(self):
        return self if self.path else None

    def flush(self):
        if not self.path:
            return
        with open(self.path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y", "u", "v"])
            for row in self.rows:
                w.writerow([repr(float(c)) for c in row])


def _valuation_text(label: str, d: dict) -> list[str]:
    return [
        f"{label}: {format_edif(Edif(d['value']['u'], d['value']['v']))}",
        f"abs_error_estimate: {d['abs_error_estimate']!r}",
        f"integrand_evals: {d['integrand_evals']}",
    ]


def cmd_valuate(args, samples):
    f = parse_expr(args.expr)
    res = valuation(f, _curve(args), _config(args), sink=samples.sink)
    d = res.to_dict()
    return d, _valuation_text("valuation", d)


def cmd_cauchy(args, samples):
    f = parse_expr(args.expr)
    res = cauchy_value_result(f, _point(args.at), _curve(args), _config(args), samples.sink)
    d = res.to_dict()
    return d, _valuation_text("value", d)


def cmd_derivative(args, samples):
    if args.order < 1:
        raise UsageError("--order must be >= 1")
    f = parse_expr(args.expr)
    res = cauchy_derivative_result(f, _point(args.at), args.order, _curve(args), _config(args),
                                   samples.sink)
    d = res.to_dict()
    return d, _valuation_text(f"derivative[{args.order}]", d)


def cmd_residue(args, samples):
    f = parse_expr(args.expr)
    pole = PoleSpec(_point(args.pole), args.order_hint)
    others = [PoleSpec(p) for p in _points(args.other_poles)] if args.other_poles else []
    rep = residue(f, pole, args.radius, _config(args), others, samples.sink)
    d = rep.to_dict()
    return d, [f"residue: {format_edif(rep.residue)}",
               f"circle_radius: {rep.circle_radius!r}",
               f"error_estimate: {rep.error_estimate!r}"]


def cmd_decompose(args, samples):
    f = parse_expr(args.expr)
    poles = [PoleSpec(p) for p in _points(args.poles)] if args.poles else []
    radii = _floats(args.radii, what="radii") if args.radii else []
    res = decompose_valuation(f, _curve(args), poles, radii, _config(args))
    d = res.to_dict()
    return d, [f"lhs: {format_edif(res.lhs)}", f"rhs: {format_edif(res.rhs)}",
               f"lhs_error: {res.lhs_error!r}", f"rhs_error: {res.rhs_error!r}"]


def cmd_potential(args, samples):
    f = parse_expr(args.expr)
    path = _curve(args, required=False)
    res = potential_result(f, _point(args.base), _point(args.target), path, _config(args),
                           samples.sink)
    d = res.to_dict()
    return d, _valuation_text("potential", d)


def cmd_goursat(args, samples):
    f = parse_expr(args.expr)
    r = goursat_residual(f, _curve(args), _config(args))
    return {"residual": r}, [f"goursat_residual: {r!r}"]


def cmd_check(args, samples):
    if args.raw_u is not None or args.raw_v is not None:
        if args.expr:
            raise UsageError("give either -e or --raw-u/--raw-v, not both")
        ut = parse_expr(args.raw_u or "0", variables=("x", "y"))
        vt = parse_expr(args.raw_v or "0", variables=("x", "y"))
        f = raw_field(lambda x, y: ut.evaluate(x, y).u, lambda x, y: vt.evaluate(x, y).u,
                      label=f"u={args.raw_u}, v={args.raw_v}")
    elif args.expr:
        f = parse_expr(args.expr)
    else:
        raise UsageError("check needs -e or --raw-u/--raw-v")
    x0, x1, y0, y1, n = _floats(args.grid, 5, "grid")
    if n != int(n) or n < 1:
        raise UsageError("grid size must be a positive integer")
    ok, worst = is_strict_harmonic(f, grid(x0, x1, y0, y1, int(n)), args.tol)
    d = {"shedif": ok, "tol": args.tol,
         "worst": {"r1": worst.r1, "r2": worst.r2, "x": worst.at.x, "y": worst.at.y,
                   "relative": worst.relative}}
    return d, [f"shedif: {'true' if ok else 'false'}",
               f"worst residual at ({worst.at.x!r}, {worst.at.y!r}): "
               f"r1={worst.r1!r} r2={worst.r2!r} (relative {worst.relative!r})"]


COMMANDS = {
    "valuate": (cmd_valuate, "valuation <f>_c of a field on a curve"),
    "cauchy": (cmd_cauchy, "reconstruct f(z0) with the Cauchy integral formula"),
    "derivative": (cmd_derivative, "n-th derivative at z0 via the Cauchy derivative formula"),
    "residue": (cmd_residue, "residue at a declared pole"),
    "decompose": (cmd_decompose, "outer valuation versus the sum over pole circles"),
    "potential": (cmd_potential, "valuation potential from a base point to a target"),
    "check": (cmd_check, "sample-based Cauchy-Riemann (shedif) test"),
    "goursat": (cmd_goursat, "norm of the valuation on a closed curve"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-e", "--expr", help="expression in z")
    common.add_argument("--circle", help="cx,cy,r[,ccw|cw]")
    common.add_argument("--polyline", help="x,y;x,y;... (closed unless --open)")
    common.add_argument("--open", action="store_true", help="treat --polyline as open")
    common.add_argument("--curve-json", help='curve as JSON, e.g. {"kind":"circle",...}')
    common.add_argument("--rel-tol", type=float, default=None,
                        help=f"relative tolerance (default 1e-10, or ${TOL_ENV})")
    common.add_argument("--abs-tol", type=float, default=QuadratureConfig.abs_tol)
    common.add_argument("--max-evals", type=int, default=QuadratureConfig.max_evals)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--dump-samples", metavar="PATH",
                        help="write integrand samples (t,x,y,u,v) as CSV")

    parser = argparse.ArgumentParser(prog="kahler-cv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {name: sub.add_parser(name, parents=[common], help=help_)
            for name, (_, help_) in COMMANDS.items()}

    for name in ("cauchy", "derivative"):
        subs[name].add_argument("--at", required=True, help="x,y")
    subs["derivative"].add_argument("--order", type=int, required=True)
    subs["residue"].add_argument("--pole", required=True, help="x,y")
    subs["residue"].add_argument("--radius", type=float, default=None)
    subs["residue"].add_argument("--order-hint", type=int, default=None)
    subs["residue"].add_argument("--other-poles", help="x,y;x,y;... used for the default radius")
    subs["decompose"].add_argument("--poles", help="x,y;x,y;...")
    subs["decompose"].add_argument("--radii", help="r1,r2,...")
    subs["potential"].add_argument("--from", dest="base", required=True, help="x,y")
    subs["potential"].add_argument("--to", dest="target", required=True, help="x,y")
    subs["check"].add_argument("--grid", required=True, help="x0,x1,y0,y1,n")
    subs["check"].add_argument("--tol", type=float, default=1e-6)
    subs["check"].add_argument("--raw-u", help="scalar part u(x, y)")
    subs["check"].add_argument("--raw-v", help="dxdy part v(x, y)")
    return parser


_VALUE_OPTIONS = frozenset({"--circle", "--polyline", "--at", "--pole", "--other-poles", "--poles",
                            "--radii", "--from", "--to", "--grid"})


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--grid -1,1,...`` into ``--grid=-1,1,...`` so argparse accepts it."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_OPTIONS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            elif nxt[:1] == "-" and nxt[1:2].isdigit() or nxt[:2] == "-.":
                out.append(f"{tok}={nxt}")
            else:
                out.extend([tok, nxt])
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_glue_negative_values(argv))
    fn, _ = COMMANDS[args.command]
    if args.command != "check" and not args.expr:
        parser.error("-e/--expr is required")
    samples = _SampleWriter(args.dump_samples)
    try:
        data, lines = fn(args, samples)
    except (ParseError, UsageError, ValueError) as exc:
        if isinstance(exc, (PoleOnOrOutside, GeometryError)):
            print(f"kahler-cv: geometry error: {exc}", file=sys.stderr)
            return EXIT_GEOMETRY
        print(f"kahler-cv: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SingularOnCurve, SingularEvaluation, NonFinite, ZeroDivisor, BudgetExceeded) as exc:
        print(f"kahler-cv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    samples.flush()
    if args.json:
        print(json.dumps({"command": args.command, "expr": args.expr, "result": data},
                         sort_keys=True))
    else:
        print("\n".join(lines))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
