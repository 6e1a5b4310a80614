"""Oriented plane curves and the valuation of edif fields along them.

The valuation of ``w = u + v dxdy`` on a curve ``c`` is the edif::

    <w>_c = [int_c w dx] + dxdy [int_c w dy]
          = int_c (u dx - v dy) + dxdy int_c (u dy + v dx)

where ``w dx`` and ``w dy`` are Clifford products.  Both real integrals are
computed together by adaptive Gauss-Kronrod quadrature in the curve
parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import GeometryError, NonFinite, SingularEvaluation, SingularOnCurve
from .expr_field import Expr, Point, PointLike, as_point, eval_field, render_safe
from .kahler_core import Edif
from .quadrature import Piece, integrate_pieces

CCW = "ccw"
CW = "cw"

# Sink for integrand samples: (piece, t, x, y, u, v).
SampleSink = Callable[[int, float, float, float, float, float], None]


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_evals: int = 1_000_000
    min_pole_distance: float = 0.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_evals < 64:
            raise ValueError("max_evals must be at least 64")
        if self.min_pole_distance < 0:
            raise ValueError("min_pole_distance must be non-negative")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class ValuationResult:
    value: Edif
    abs_error_estimate: float
    integrand_evals: int

    def to_dict(self) -> dict:
        return {
            "value": {"u": self.value.u, "v": self.value.v},
            "abs_error_estimate": self.abs_error_estimate,
            "integrand_evals": self.integrand_evals,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ValuationResult:
        return cls(Edif(float(d["value"]["u"]), float(d["value"]["v"])),
                   float(d["abs_error_estimate"]), int(d["integrand_evals"]))


# --------------------------------------------------------------------------
# Curves

# (x, y, dx/dt, dy/dt) at parameter t
Trace = Callable[[float], tuple[float, float, float, float]]


class Curve:
    closed: bool

    def pieces(self) -> list[tuple[float, float, Trace, int]]:
        """Parameter pieces ``(t0, t1, trace, initial_panels)`` in traversal order."""
        raise NotImplementedError

    def start(self) -> Point:
        t0, _, trace, _ = self.pieces()[0]
        x, y, _, _ = trace(t0)
        return Point(x, y)

    def end(self) -> Point:
        _, t1, trace, _ = self.pieces()[-1]
        x, y, _, _ = trace(t1)
        return Point(x, y)

    def reverse(self) -> Curve:
        raise NotImplementedError

    def distance_to(self, p: PointLike) -> float:
        raise NotImplementedError

    def winding_number(self, p: PointLike) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Circle(Curve):
    center: Point
    radius: float
    orientation: str = CCW
    closed: bool = field(default=True, init=False)

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise GeometryError(f"circle radius must be positive and finite, got {self.radius}")
        if self.orientation not in (CCW, CW):
            raise GeometryError(f"orientation must be 'ccw' or 'cw', got {self.orientation!r}")

    def _trace(self, t: float):
        c, s = math.cos(t), math.sin(t)
        r = self.radius
        if self.orientation == CCW:
            return (self.center.x + r * c, self.center.y + r * s, -r * s, r * c)
        return (self.center.x + r * c, self.center.y - r * s, -r * s, -r * c)

    def pieces(self):
        return [(0.0, 2.0 * math.pi, self._trace, 8)]

    def reverse(self) -> Circle:
        return Circle(self.center, self.radius, CW if self.orientation == CCW else CCW)

    def distance_to(self, p):
        p = as_point(p)
        return abs(math.hypot(p.x - self.center.x, p.y - self.center.y) - self.radius)

    def winding_number(self, p):
        p = as_point(p)
        if math.hypot(p.x - self.center.x, p.y - self.center.y) < self.radius:
            return 1 if self.orientation == CCW else -1
        return 0

    @property
    def sign(self) -> int:
        return 1 if self.orientation == CCW else -1


@dataclass(frozen=True)
class Polyline(Curve):
    vertices: tuple[Point, ...]
    closed: bool = False

    def __post_init__(self):
        verts = tuple(as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2:
            raise GeometryError("a polyline needs at least two vertices")
        if self.closed:
            if len(verts) < 3:
                raise GeometryError("a closed polyline needs at least three vertices")
            if verts[0] == verts[-1]:
                raise GeometryError("closed polylines close implicitly; do not repeat the first vertex")
        for a, b in self.edges():
            if a == b:
                raise GeometryError("polyline has a zero-length edge")

    def edges(self) -> list[tuple[Point, Point]]:
        vs = self.vertices
        out = list(zip(vs[:-1], vs[1:]))
        if self.closed:
            out.append((vs[-1], vs[0]))
        return out

    def pieces(self):
        out = []
        for a, b in self.edges():
            dx, dy = b.x - a.x, b.y - a.y

            def trace(t, a=a, dx=dx, dy=dy):
                return (a.x + t * dx, a.y + t * dy, dx, dy)

            out.append((0.0, 1.0, trace, 2))
        return out

    def start(self) -> Point:
        return self.vertices[0]

    def end(self) -> Point:
        return self.vertices[0] if self.closed else self.vertices[-1]

    def reverse(self) -> Polyline:
        return Polyline(tuple(reversed(self.vertices)), self.closed)

    def distance_to(self, p):
        p = as_point(p)
        return min(_segment_distance(p, a, b) for a, b in self.edges())

    def winding_number(self, p):
        if not self.closed:
            raise GeometryError("winding number needs a closed curve")
        p = as_point(p)
        wn = 0
        for a, b in self.edges():
            cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)
            if a.y <= p.y:
                if b.y > p.y and cross > 0:
                    wn += 1
            elif b.y <= p.y and cross < 0:
                wn -= 1
        return wn

    def signed_area(self) -> float:
        vs = self.vertices
        n = len(vs)
        return 0.5 * math.fsum(vs[i].x * vs[(i + 1) % n].y - vs[(i + 1) % n].x * vs[i].y
                               for i in range(n))


@dataclass(frozen=True)
class Parametric(Curve):
    """Curve given by ``t -> (x, y, dx/dt, dy/dt)`` on ``[0, 1]``.

    Inside/outside questions cannot be answered for these; callers assert them.
    """

    sampler: Trace
    closed: bool = False
    panels: int = 8

    def pieces(self):
        return [(0.0, 1.0, self.sampler, self.panels)]

    def reverse(self) -> Parametric:
        fn = self.sampler

        def back(t):
            x, y, dx, dy = fn(1.0 - t)
            return (x, y, -dx, -dy)

        return _ReversedParametric(back, self.closed, self.panels, self)

    def distance_to(self, p, samples: int = 4096):
        p = as_point(p)
        best = math.inf
        for i in range(samples + 1):
            x, y, _, _ = self.sampler(i / samples)
            best = min(best, math.hypot(x - p.x, y - p.y))
        return best

    def winding_number(self, p):
        raise GeometryError("winding number is not available for parametric curves")


@dataclass(frozen=True)
class _ReversedParametric(Parametric):
    original: Optional[Parametric] = None

    def reverse(self) -> Parametric:
        return self.original


def reverse(c: Curve) -> Curve:
    return c.reverse()


def _segment_distance(p: Point, a: Point, b: Point) -> float:
    dx, dy = b.x - a.x, b.y - a.y
    t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)
    t = min(1.0, max(0.0, t))
    return math.hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy))


def circle(cx: float, cy: float, r: float, orientation: str = CCW) -> Circle:
    return Circle(Point(cx, cy), r, orientation)


def segment(a: PointLike, b: PointLike) -> Polyline:
    return Polyline((as_point(a), as_point(b)), closed=False)


def curve_from_json(obj: dict) -> Curve:
    kind = obj.get("kind")
    if kind == "circle":
        return Circle(Point(float(obj["cx"]), float(obj["cy"])), float(obj["r"]),
                      obj.get("orientation", CCW))
    if kind == "polyline":
        pts = tuple(Point(float(x), float(y)) for x, y in obj["points"])
        return Polyline(pts, bool(obj.get("closed", False)))
    raise GeometryError(f"unknown curve kind {kind!r}")


def curve_to_json(c: Curve) -> dict:
    if isinstance(c, Circle):
        return {"kind": "circle", "cx": c.center.x, "cy": c.center.y, "r": c.radius,
                "orientation": c.orientation}
    if isinstance(c, Polyline):
        return {"kind": "polyline", "points": [[p.x, p.y] for p in c.vertices], "closed": c.closed}
    raise GeometryError("parametric curves have no JSON form")


# --------------------------------------------------------------------------
# Valuation


def _pair_integrand(f: Expr, trace: Trace, piece: int, sink: Optional[SampleSink]):
    def fn(t: float) -> tuple[float, float]:
        x, y, dx, dy = trace(t)
        try:
            w = eval_field(f, (x, y))
        except (SingularEvaluation, NonFinite) as exc:
            raise SingularOnCurve(
                f"{render_safe(f)} is singular on the curve at ({x!r}, {y!r})") from exc
        u, v = w.u, w.v
        if sink is not None:
            sink(piece, t, x, y, u, v)
        a = u * dx - v * dy
        b = u * dy + v * dx
        if not (math.isfinite(a) and math.isfinite(b)):
            raise SingularOnCurve(f"integrand is not finite at ({x!r}, {y!r})")
        return a, b

    return fn


def check_pole_clearance(c: Curve, poles: Iterable[PointLike], cfg: QuadratureConfig) -> None:
    if cfg.min_pole_distance <= 0:
        return
    for p in poles:
        d = c.distance_to(p)
        if d <= cfg.min_pole_distance:
            pp = as_point(p)
            raise SingularOnCurve(
                f"declared pole ({pp.x}, {pp.y}) is {d:.3g} from the curve "
                f"(minimum {cfg.min_pole_distance})")


def valuation(f: Expr, c: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG,
              poles: Sequence[PointLike] = (), sink: Optional[SampleSink] = None) -> ValuationResult:
    """``<f>_c`` with an error estimate.

    ``poles`` are only consulted when ``cfg.min_pole_distance`` is positive.
    """
    check_pole_clearance(c, poles, cfg)
    pieces = [Piece(t0, t1, _pair_integrand(f, trace, k, sink), panels)
              for k, (t0, t1, trace, panels) in enumerate(c.pieces())]
    res = integrate_pieces(pieces, cfg.rel_tol, cfg.abs_tol, cfg.max_evals)
    return ValuationResult(Edif(*res.value), res.abs_error, res.evals)


def valuation_potential(f: Expr, base: PointLike, target: PointLike,
                        path: Optional[Curve] = None,
                        cfg: QuadratureConfig = DEFAULT_CONFIG) -> Edif:
    """Valuation potential ``U + V dxdy`` at ``target``, pinned to zero at ``base``.

    For a shedif on a simply connected region the result depends only on the
    endpoints; ``path`` defaults to the straight segment.
    """
    return potential_result(f, base, target, path, cfg).value


def potential_result(f: Expr, base: PointLike, target: PointLike,
                     path: Optional[Curve] = None,
                     cfg: QuadratureConfig = DEFAULT_CONFIG,
                     sink: Optional[SampleSink] = None) -> ValuationResult:
    base, target = as_point(base), as_point(target)
    if base == target and path is None:
        return ValuationResult(Edif(0.0, 0.0), 0.0, 1)
    if path is None:
        path = segment(base, target)
    if path.closed:
        raise GeometryError("a potential is taken along an open path")
    scale = max(1.0, abs(base.x), abs(base.y), abs(target.x), abs(target.y))
    for want, got, label in ((base, path.start(), "start"), (target, path.end(), "end")):
        if math.hypot(want.x - got.x, want.y - got.y) > 1e-12 * scale:
            raise GeometryError(f"path {label} ({got.x}, {got.y}) does not match ({want.x}, {want.y})")
    return valuation(f, path, cfg, sink=sink)
