"""Goursat, Cauchy integral and derivative formulas, residues and decomposition.

All statements are about valuations, so everything here reduces to calls to
:func:`kahler_cv.contour.valuation` with suitably built integrands.  Division
by ``2 pi dxdy`` is multiplication by ``-dxdy / (2 pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from . import kahler_core as kc
from .contour import (
    DEFAULT_CONFIG,
    Circle,
    Curve,
    Parametric,
    Polyline,
    QuadratureConfig,
    SampleSink,
    ValuationResult,
    potential_result,
    segment,
    valuation,
)
from .errors import GeometryError, PoleOnOrOutside
from .expr_field import (
    Const,
    Div,
    Expr,
    Point,
    PointLike,
    Pow,
    Sub,
    Z,
    as_point,
    covaluation,
    eval_field,
)
from .kahler_core import Edif

# (2 pi dxdy)^-1
INV_TWO_PI_DXDY = Edif(0.0, -1.0 / (2.0 * math.pi))


def divide_by_two_pi_dxdy(w: Edif) -> Edif:
    return kc.edif_mul(INV_TWO_PI_DXDY, w)


@dataclass(frozen=True)
class PoleSpec:
    location: Point
    order_hint: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "location", as_point(self.location))
        if self.order_hint is not None and self.order_hint < 1:
            raise ValueError("order_hint must be >= 1")


@dataclass(frozen=True)
class ResidueReport:
    pole: PoleSpec
    residue: Edif
    circle_radius: float
    error_estimate: float

    def __post_init__(self):
        if not self.circle_radius > 0:
            raise ValueError("circle_radius must be positive")

    def to_dict(self) -> dict:
        return {
            "pole": {"x": self.pole.location.x, "y": self.pole.location.y,
                     "order_hint": self.pole.order_hint},
            "residue": {"u": self.residue.u, "v": self.residue.v},
            "circle_radius": self.circle_radius,
            "error_estimate": self.error_estimate,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ResidueReport:
        p = d["pole"]
        return cls(PoleSpec(Point(float(p["x"]), float(p["y"])), p.get("order_hint")),
                   Edif(float(d["residue"]["u"]), float(d["residue"]["v"])),
                   float(d["circle_radius"]), float(d["error_estimate"]))


class Decomposition(NamedTuple):
    lhs: Edif
    rhs: Edif
    lhs_error: float
    rhs_error: float

    @property
    def error_estimate(self) -> float:
        return self.lhs_error + self.rhs_error

    @property
    def discrepancy(self) -> float:
        return abs(self.lhs - self.rhs)

    def to_dict(self) -> dict:
        return {"lhs": {"u": self.lhs.u, "v": self.lhs.v},
                "rhs": {"u": self.rhs.u, "v": self.rhs.v},
                "lhs_error": self.lhs_error, "rhs_error": self.rhs_error}

    @classmethod
    def from_dict(cls, d: dict) -> Decomposition:
        return cls(Edif(float(d["lhs"]["u"]), float(d["lhs"]["v"])),
                   Edif(float(d["rhs"]["u"]), float(d["rhs"]["v"])),
                   float(d["lhs_error"]), float(d["rhs_error"]))


def kernel(z0: PointLike, power: int) -> Expr:
    """The tree for ``(z - z0)^(-power)``."""
    p = as_point(z0)
    return Pow(Sub(Z, Const(p.to_edif())), -power)


def _require_closed(c: Curve) -> None:
    if not c.closed:
        raise GeometryError("a closed curve is required")


def _winding(c: Curve, z0: Point) -> int:
    """Winding number of ``c`` about ``z0``; parametric curves are taken on trust."""
    if isinstance(c, Parametric):
        return 1
    scale = max(1.0, abs(z0.x), abs(z0.y))
    if c.distance_to(z0) <= 1e-12 * scale:
        raise PoleOnOrOutside(f"({z0.x}, {z0.y}) lies on the curve")
    w = c.winding_number(z0)
    if w == 0:
        raise PoleOnOrOutside(f"({z0.x}, {z0.y}) is not enclosed by the curve")
    return w


def goursat_residual(f: Expr, c: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``|<f>_c|``; zero (to quadrature accuracy) for a shedif regular inside ``c``."""
    _require_closed(c)
    return abs(valuation(f, c, cfg).value)


def kernel_valuation_result(z0: PointLike, n: int, c: Curve,
                            cfg: QuadratureConfig = DEFAULT_CONFIG) -> ValuationResult:
    if n < 0:
        raise ValueError("n must be >= 0")
    _require_closed(c)
    return valuation(kernel(z0, n + 1), c, cfg, poles=[z0])


def kernel_valuation(z0: PointLike, n: int, c: Curve,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> Edif:
    """``<(z - z0)^-(n+1)>_c``: ``2 pi dxdy`` for ``n == 0`` and zero otherwise."""
    return kernel_valuation_result(z0, n, c, cfg).value


def dx_only_integral(f: Expr, z0: PointLike, c: Curve,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> Edif:
    """``int_c f(z)/(z - z0) dx`` alone, i.e. the scalar part of the valuation.

    The dxdy slot is left empty because the ``dy`` integral is not taken.
    """
    _require_closed(c)
    integrand = Div(f, Sub(Z, Const(as_point(z0).to_edif())))
    res = valuation(integrand, c, cfg, poles=[z0])
    return Edif(res.value.u, 0.0)


def cauchy_value_result(f: Expr, z0: PointLike, c: Curve,
                        cfg: QuadratureConfig = DEFAULT_CONFIG,
                        sink: Optional[SampleSink] = None) -> ValuationResult:
    return cauchy_derivative_result(f, z0, 0, c, cfg, sink)


def cauchy_value(f: Expr, z0: PointLike, c: Curve,
                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> Edif:
    """Reconstruct ``f(z0)`` as ``(2 pi dxdy)^-1 <f(z)/(z - z0)>_c``."""
    return cauchy_value_result(f, z0, c, cfg).value


def cauchy_derivative_result(f: Expr, z0: PointLike, n: int, c: Curve,
                             cfg: QuadratureConfig = DEFAULT_CONFIG,
                             sink: Optional[SampleSink] = None) -> ValuationResult:
    """``n! (2 pi dxdy)^-1 <f(z)/(z - z0)^(n+1)>_c`` with its scaled error estimate.

    A curve winding ``k`` times about ``z0`` is divided by ``k`` as well, so
    clockwise contours also reproduce ``f^(n)(z0)``.
    """
    if n < 0:
        raise ValueError("derivative order must be >= 0")
    _require_closed(c)
    p = as_point(z0)
    wind = _winding(c, p)
    integrand = Div(f, Pow(Sub(Z, Const(p.to_edif())), n + 1))
    res = valuation(integrand, c, cfg, poles=[p], sink=sink)
    factor = math.factorial(n) / wind
    value = divide_by_two_pi_dxdy(res.value) * factor
    scale = abs(factor) / (2.0 * math.pi)
    return ValuationResult(value, res.abs_error_estimate * scale, res.integrand_evals)


def cauchy_derivative(f: Expr, z0: PointLike, n: int, c: Curve,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> Edif:
    """``f^(n)(z0)`` from the valuation of ``f(z)/(z - z0)^(n+1)``."""
    if n < 1:
        raise ValueError("derivative order must be >= 1; use cauchy_value for n = 0")
    return cauchy_derivative_result(f, z0, n, c, cfg).value


def default_residue_radius(pole: PoleSpec, others: Sequence[PoleSpec] = ()) -> float:
    """Half the distance to the nearest other pole, capped at 1."""
    p = pole.location
    r = 1.0
    for q in others:
        d = math.hypot(q.location.x - p.x, q.location.y - p.y)
        if d == 0:
            continue
        r = min(r, 0.5 * d)
    return r


def residue(f: Expr, pole: PoleSpec, radius: Optional[float] = None,
            cfg: QuadratureConfig = DEFAULT_CONFIG, others: Sequence[PoleSpec] = (),
            sink: Optional[SampleSink] = None) -> ResidueReport:
    """``(2 pi dxdy)^-1 <f>`` over a ccw circle of ``radius`` about the pole."""
    if not isinstance(pole, PoleSpec):
        pole = PoleSpec(as_point(pole))
    if radius is None:
        radius = default_residue_radius(pole, others)
    c = Circle(pole.location, radius)
    for q in others:
        if q.location == pole.location:
            continue
        if c.winding_number(q.location) != 0 or c.distance_to(q.location) == 0.0:
            raise GeometryError(
                f"residue circle about ({pole.location.x}, {pole.location.y}) also meets "
                f"the pole at ({q.location.x}, {q.location.y})")
    res = valuation(f, c, cfg, sink=sink)
    return ResidueReport(pole, divide_by_two_pi_dxdy(res.value), radius,
                         res.abs_error_estimate / (2.0 * math.pi))


def _orientation_sign(c: Curve) -> int:
    if isinstance(c, Circle):
        return c.sign
    if isinstance(c, Polyline):
        return 1 if c.signed_area() > 0 else -1
    raise GeometryError("decomposition geometry checks need a circle or polyline")


def _check_decomposition_geometry(C: Curve, circles: Sequence[Circle]) -> None:
    for i, ci in enumerate(circles):
        if C.winding_number(ci.center) == 0:
            raise GeometryError(f"circle {i} is centred outside the outer curve")
        if C.distance_to(ci.center) <= ci.radius:
            raise GeometryError(f"circle {i} crosses the outer curve")
        if isinstance(C, Circle):
            d = math.hypot(ci.center.x - C.center.x, ci.center.y - C.center.y)
            if d + ci.radius >= C.radius:
                raise GeometryError(f"circle {i} is not inside the outer circle")
        for j in range(i):
            cj = circles[j]
            d = math.hypot(ci.center.x - cj.center.x, ci.center.y - cj.center.y)
            if d <= ci.radius + cj.radius:
                raise GeometryError(f"circles {j} and {i} overlap")


def decompose_valuation(f: Expr, C: Curve, poles: Sequence[PoleSpec], radii: Sequence[float],
                        cfg: QuadratureConfig = DEFAULT_CONFIG) -> Decomposition:
    """Valuation on ``C`` versus the sum over equally oriented circles about the poles."""
    _require_closed(C)
    if len(poles) != len(radii):
        raise ValueError("one radius per pole is required")
    poles = [p if isinstance(p, PoleSpec) else PoleSpec(as_point(p)) for p in poles]
    orient = "ccw" if _orientation_sign(C) > 0 else "cw"
    circles = [Circle(p.location, r, orient) for p, r in zip(poles, radii)]
    _check_decomposition_geometry(C, circles)
    locations = [p.location for p in poles]
    lhs = valuation(f, C, cfg, poles=locations)
    parts = [valuation(f, ci, cfg, poles=locations) for ci in circles]
    rhs = Edif(math.fsum(r.value.u for r in parts), math.fsum(r.value.v for r in parts))
    rhs_err = math.fsum(r.abs_error_estimate for r in parts)
    return Decomposition(lhs.value, rhs, lhs.abs_error_estimate, rhs_err)


def continuity_limit_check(f: Expr, z0: PointLike, radii: Sequence[float],
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[float]:
    """``|<(f(z) - f(z0))/(z - z0)>|`` on shrinking circles about ``z0``."""
    p = as_point(z0)
    f0 = eval_field(f, p)
    quotient = Div(Sub(f, Const(f0)), Sub(Z, Const(p.to_edif())))
    out = []
    prev = math.inf
    for r in radii:
        if not 0 < r < prev:
            raise ValueError("radii must be positive and strictly decreasing")
        prev = r
        out.append(abs(valuation(quotient, Circle(p, r), cfg).value))
    return out


def covaluation_roundtrip(f: Expr, c: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG,
                          h: Optional[float] = None) -> tuple[float, float]:
    """Check that valuation and ``d/dx`` undo each other along an open curve.

    ``residual1`` compares ``d/dx`` of the potential at the curve's end with
    ``f`` there; the x-derivative is a central difference of the potential,
    i.e. the valuation along the short segment from ``end - h`` to ``end + h``
    divided by ``2h``.  ``residual2`` compares the valuation of ``df/dx``
    along ``c`` with ``f(end) - f(start)``.
    """
    if c.closed:
        raise GeometryError("co-valuation round trip needs an open curve")
    start, end = c.start(), c.end()
    if h is None:
        h = 1e-4 * max(1.0, abs(end.x), abs(end.y))
    fe = eval_field(f, end)
    fs = eval_field(f, start)

    left, right = Point(end.x - h, end.y), Point(end.x + h, end.y)
    # U(end + h) - U(end - h) by path independence.
    diff = potential_result(f, left, right, segment(left, right), cfg).value
    d_potential = diff / (2.0 * h)
    residual1 = abs(d_potential - fe)

    df = covaluation(f)
    val_df = potential_result(df, start, end, c, cfg).value
    residual2 = abs(val_df - fe + fs)
    return residual1, residual2
