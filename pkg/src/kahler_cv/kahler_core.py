"""Kähler algebra of the real plane and its even subalgebra.

A general element is ``s + a dx + b dy + p dxdy`` with the Euclidean metric
``dx dx = dy dy = 1``, so ``(dxdy)**2 = -1``.  Even elements ``u + v dxdy``
("edifs") form a commutative field isomorphic to the complex numbers; every
elementary function here is written out with real trigonometric and
hyperbolic identities rather than delegated to ``cmath``, so that a complex
oracle stays an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import NonFinite, ZeroDivisor, ZeroEdif

Real = Union[int, float]


@dataclass(frozen=True, slots=True)
class Multivector:
    s: float = 0.0
    a: float = 0.0  # dx
    b: float = 0.0  # dy
    p: float = 0.0  # dxdy

    def __add__(self, other: Multivector) -> Multivector:
        other = as_multivector(other)
        return Multivector(self.s + other.s, self.a + other.a, self.b + other.b, self.p + other.p)

    __radd__ = __add__

    def __sub__(self, other: Multivector) -> Multivector:
        other = as_multivector(other)
        return Multivector(self.s - other.s, self.a - other.a, self.b - other.b, self.p - other.p)

    def __neg__(self) -> Multivector:
        return Multivector(-self.s, -self.a, -self.b, -self.p)

    def __mul__(self, other) -> Multivector:
        return clifford_product(self, as_multivector(other))

    def __rmul__(self, other) -> Multivector:
        return clifford_product(as_multivector(other), self)

    def even_part(self) -> Edif:
        return Edif(self.s, self.p)

    def odd_part(self) -> Multivector:
        return Multivector(0.0, self.a, self.b, 0.0)

    def components(self) -> tuple[float, float, float, float]:
        return (self.s, self.a, self.b, self.p)

    def __str__(self) -> str:
        return f"{self.s!r} + {self.a!r}·dx + {self.b!r}·dy + {self.p!r}·dxdy"


@dataclass(frozen=True, slots=True)
class Edif:
    """Even differential form ``u + v dxdy``."""

    u: float = 0.0
    v: float = 0.0

    def __add__(self, other) -> Edif:
        if isinstance(other, Edif):
            return Edif(self.u + other.u, self.v + other.v)
        if isinstance(other, (int, float)):
            return Edif(self.u + other, self.v)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other) -> Edif:
        if isinstance(other, Edif):
            return Edif(self.u - other.u, self.v - other.v)
        if isinstance(other, (int, float)):
            return Edif(self.u - other, self.v)
        return NotImplemented

    def __rsub__(self, other) -> Edif:
        if isinstance(other, (int, float)):
            return Edif(other - self.u, -self.v)
        return NotImplemented

    def __neg__(self) -> Edif:
        return Edif(-self.u, -self.v)

    def __mul__(self, other) -> Edif:
        if isinstance(other, Edif):
            return edif_mul(self, other)
        if isinstance(other, (int, float)):
            return Edif(self.u * other, self.v * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other) -> Edif:
        if isinstance(other, (int, float)):
            if other == 0:
                raise ZeroDivisor("division by zero scalar")
            return Edif(self.u / other, self.v / other)
        if isinstance(other, Edif):
            return edif_mul(self, edif_inverse(other))
        return NotImplemented

    def __rtruediv__(self, other) -> Edif:
        if isinstance(other, (int, float)):
            return edif_inverse(self) * other
        return NotImplemented

    def __pow__(self, n: int) -> Edif:
        if isinstance(n, int):
            return edif_ipow(self, n)
        return NotImplemented

    def __abs__(self) -> float:
        return math.hypot(self.u, self.v)

    def conjugate(self) -> Edif:
        return Edif(self.u, -self.v)

    def is_finite(self) -> bool:
        return math.isfinite(self.u) and math.isfinite(self.v)

    def to_multivector(self) -> Multivector:
        return Multivector(self.u, 0.0, 0.0, self.v)

    def __complex__(self) -> complex:
        return complex(self.u, self.v)

    @classmethod
    def from_complex(cls, c: complex) -> Edif:
        return cls(c.real, c.imag)

    def __str__(self) -> str:
        return format_edif(self)


@dataclass(frozen=True, slots=True)
class PolarForm:
    rho: float
    phi: float

    def reconstruct(self) -> Edif:
        return Edif(self.rho * math.cos(self.phi), self.rho * math.sin(self.phi))


ONE = Edif(1.0, 0.0)
ZERO = Edif(0.0, 0.0)
DXDY = Edif(0.0, 1.0)

DX = Multivector(0.0, 1.0, 0.0, 0.0)
DY = Multivector(0.0, 0.0, 1.0, 0.0)


def as_multivector(x) -> Multivector:
    if isinstance(x, Multivector):
        return x
    if isinstance(x, Edif):
        return x.to_multivector()
    if isinstance(x, (int, float)):
        return Multivector(float(x))
    raise TypeError(f"cannot interpret {type(x).__name__} as a multivector")


def iso(w: Edif) -> complex:
    """The ring isomorphism ``u + v dxdy -> u + iv``."""
    return complex(w.u, w.v)


def format_edif(w: Edif) -> str:
    sign = "-" if math.copysign(1.0, w.v) < 0 else "+"
    return f"{w.u!r} {sign} {abs(w.v)!r}·dxdy"


def clifford_product(x: Multivector, y: Multivector) -> Multivector:
    s1, a1, b1, p1 = x.s, x.a, x.b, x.p
    s2, a2, b2, p2 = y.s, y.a, y.b, y.p
    return Multivector(
        s1 * s2 + a1 * a2 + b1 * b2 - p1 * p2,
        s1 * a2 + a1 * s2 - b1 * p2 + p1 * b2,
        s1 * b2 + b1 * s2 + a1 * p2 - p1 * a2,
        s1 * p2 + p1 * s2 + a1 * b2 - b1 * a2,
    )


def edif_mul(w1: Edif, w2: Edif) -> Edif:
    return Edif(w1.u * w2.u - w1.v * w2.v, w1.u * w2.v + w1.v * w2.u)


def edif_inverse(w: Edif) -> Edif:
    u, v = w.u, w.v
    # Scale first so u*u + v*v neither overflows nor underflows.
    scale = max(abs(u), abs(v))
    if scale == 0.0:
        raise ZeroDivisor("edif with u**2 + v**2 == 0 has no inverse")
    if not math.isfinite(scale):
        raise NonFinite(f"cannot invert non-finite edif {w}")
    us, vs = u / scale, v / scale
    d = (us * us + vs * vs) * scale
    return Edif(us / d, -vs / d)


def polar_decompose(w: Edif) -> PolarForm:
    if w.u == 0.0 and w.v == 0.0:
        raise ZeroEdif("polar form of the zero edif is undefined")
    phi = math.atan2(w.v, w.u)
    if phi == -math.pi:
        # -0.0 lies on the cut itself; a tiny negative v only rounded onto it.
        phi = math.pi if w.v == 0.0 else math.nextafter(-math.pi, 0.0)
    return PolarForm(math.hypot(w.u, w.v), phi)


def edif_ipow(w: Edif, n: int) -> Edif:
    """Integer power by square-and-multiply; negative powers invert first."""
    if n < 0:
        return edif_ipow(edif_inverse(w), -n)
    result = ONE
    base = w
    while n:
        if n & 1:
            result = edif_mul(result, base)
        n >>= 1
        if n:
            base = edif_mul(base, base)
    return result


def ipow_polar(w: Edif, n: int) -> Edif:
    """``rho**n (cos n*phi + dxdy sin n*phi)``; the trigonometric route to integer powers."""
    if n == 0:
        return ONE
    pf = polar_decompose(w)
    r = pf.rho ** n
    return Edif(r * math.cos(n * pf.phi), r * math.sin(n * pf.phi))


def _checked(u: float, v: float, name: str) -> Edif:
    if not (math.isfinite(u) and math.isfinite(v)):
        raise NonFinite(f"{name} overflowed")
    return Edif(u, v)


def _exp(u: float, v: float) -> Edif:
    try:
        m = math.exp(u)
    except OverflowError:
        raise NonFinite("exp overflowed") from None
    return _checked(m * math.cos(v), m * math.sin(v), "exp")


def _log(u: float, v: float) -> Edif:
    pf = polar_decompose(Edif(u, v))
    # log|w| without forming |w|, which loses digits for subnormal parts
    big, small = max(abs(u), abs(v)), min(abs(u), abs(v))
    return Edif(math.log(big) + 0.5 * math.log1p((small / big) ** 2), pf.phi)


def _sqrt(u: float, v: float) -> Edif:
    if u == 0.0 and v == 0.0:
        raise ZeroEdif("sqrt at the zero edif is undefined on the principal branch")
    # Stable principal square root: choose the root with nonnegative scalar part.
    rho = math.hypot(u, v)
    if u >= 0.0:
        t = math.sqrt(0.5 * (rho + u))
        return Edif(t, v / (2.0 * t))
    t = math.sqrt(0.5 * (rho - u))
    # v == -0.0 still sits at phi = pi on the principal branch.
    return Edif(abs(v) / (2.0 * t), -t if v < 0.0 else t)


def _trig_hyp(fn):
    def wrapped(u: float, v: float) -> Edif:
        try:
            return _checked(*fn(u, v), fn.__name__)
        except OverflowError:
            raise NonFinite(f"{fn.__name__} overflowed") from None

    return wrapped


@_trig_hyp
def sin(u: float, v: float):
    return math.sin(u) * math.cosh(v), math.cos(u) * math.sinh(v)


@_trig_hyp
def cos(u: float, v: float):
    return math.cos(u) * math.cosh(v), -math.sin(u) * math.sinh(v)


@_trig_hyp
def sinh(u: float, v: float):
    return math.sinh(u) * math.cos(v), math.cosh(u) * math.sin(v)


@_trig_hyp
def cosh(u: float, v: float):
    return math.cosh(u) * math.cos(v), math.sinh(u) * math.sin(v)


@_trig_hyp
def tan(u: float, v: float):
    if abs(v) > 20.0:
        # cosh(2v) dominates the denominator; avoid overflow.
        e = math.exp(-2.0 * abs(v))
        return 2.0 * math.sin(2.0 * u) * e, math.copysign(1.0, v)
    d = math.cos(2.0 * u) + math.cosh(2.0 * v)
    if d == 0.0:
        raise ZeroDivisor("tan evaluated at a pole")
    return math.sin(2.0 * u) / d, math.sinh(2.0 * v) / d


ELEMENTARY = {
    "exp": _exp,
    "log": _log,
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sinh": sinh,
    "cosh": cosh,
    "sqrt": _sqrt,
}


def edif_elementary(name: str, w: Edif) -> Edif:
    try:
        fn = ELEMENTARY[name]
    except KeyError:
        raise ValueError(f"unknown elementary function {name!r}") from None
    return fn(w.u, w.v)


def edif_rpow(w: Edif, p: float) -> Edif:
    """Real (non-integer) power on the principal branch, ``exp(p log w)``."""
    if float(p).is_integer():
        return edif_ipow(w, int(p))
    if w.u == 0.0 and w.v == 0.0:
        if p > 0:
            return ZERO
        raise ZeroDivisor("negative real power of the zero edif")
    lg = _log(w.u, w.v)
    return _exp(p * lg.u, p * lg.v)
