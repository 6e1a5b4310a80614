"""Edif-valued fields on the plane given as expressions in ``z = x + y dxdy``.

Expressions are parsed into small immutable trees.  A tree can be evaluated
at a point with the Kähler-algebra arithmetic, differentiated symbolically
(``d/dz``, which coincides with ``d/dx`` for functions of ``z``), and tested
numerically for the Cauchy-Riemann relations through the operator
``dx d/dx + dy d/dy``.

Grammar::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := ["-"] base ["^" exponent]
    base   := number | "z" | "I" | "pi" | ident "(" expr ")" | "(" expr ")"

``I`` is the unit ``dxdy``.  Exponents are signed integers, optionally in
parentheses; a non-integer exponent is accepted and evaluated on the
principal branch.
"""

from __future__ import annotations

import math
import re
import sys
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

from . import kahler_core as kc
from .errors import (
    NonFinite,
    NotDifferentiable,
    ParseError,
    SingularEvaluation,
    ZeroDivisor,
    ZeroEdif,
)
from .kahler_core import Edif, Multivector

FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sinh", "cosh", "sqrt")


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def to_edif(self) -> Edif:
        return Edif(float(self.x), float(self.y))

    def __iter__(self):
        yield self.x
        yield self.y


PointLike = Union[Point, Sequence[float], Edif, complex]


def as_point(p: PointLike) -> Point:
    if isinstance(p, Point):
        return p
    if isinstance(p, Edif):
        return Point(p.u, p.v)
    if isinstance(p, complex):
        return Point(p.real, p.imag)
    x, y = p
    return Point(float(x), float(y))


# --------------------------------------------------------------------------
# Tree nodes


class Expr:
    """Base class for expression nodes. Instances are immutable."""

    __slots__ = ()

    def evaluate(self, x: float, y: float) -> Edif:
        raise NotImplementedError

    # Operator sugar for building trees in Python code.
    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __truediv__(self, other):
        return Div(self, _lift(other))

    def __rtruediv__(self, other):
        return Div(_lift(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, n):
        return Pow(self, n)

    def __str__(self) -> str:
        return render(self)


def _lift(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, Edif):
        return Const(value)
    if isinstance(value, complex):
        return Const(Edif(value.real, value.imag))
    if isinstance(value, (int, float)):
        return Const(Edif(float(value), 0.0))
    raise TypeError(f"cannot use {type(value).__name__} in an expression")


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Edif

    def __post_init__(self):
        if not self.value.is_finite():
            raise ValueError("constants must be finite edifs")

    def evaluate(self, x, y):
        return self.value


@dataclass(frozen=True, slots=True)
class Var(Expr):
    """The variable ``z``; ``x`` and ``y`` are the real coordinate scalars used by raw fields."""

    name: str = "z"

    def evaluate(self, x, y):
        if self.name == "z":
            return Edif(x, y)
        if self.name == "x":
            return Edif(x, 0.0)
        if self.name == "y":
            return Edif(y, 0.0)
        raise ValueError(f"unknown variable {self.name!r}")


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr

    def evaluate(self, x, y):
        return -self.arg.evaluate(x, y)


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr

    def evaluate(self, x, y):
        return self.left.evaluate(x, y) + self.right.evaluate(x, y)


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def evaluate(self, x, y):
        return self.left.evaluate(x, y) - self.right.evaluate(x, y)


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def evaluate(self, x, y):
        return kc.edif_mul(self.left.evaluate(x, y), self.right.evaluate(x, y))


@dataclass(frozen=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr

    def evaluate(self, x, y):
        num = self.left.evaluate(x, y)
        return kc.edif_mul(num, kc.edif_inverse(self.right.evaluate(x, y)))


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: Union[int, float]

    def evaluate(self, x, y):
        w = self.base.evaluate(x, y)
        if isinstance(self.exponent, int):
            return kc.edif_ipow(w, self.exponent)
        return kc.edif_rpow(w, self.exponent)


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")

    def evaluate(self, x, y):
        return kc.edif_elementary(self.name, self.arg.evaluate(x, y))


@dataclass(frozen=True, slots=True)
class RawField(Expr):
    """Field given directly by its scalar and dxdy parts ``u(x, y)``, ``v(x, y)``.

    Not a function of ``z`` in general, so it cannot be differentiated
    symbolically; used to exhibit fields that violate Cauchy-Riemann.
    """

    u: Callable[[float, float], float]
    v: Callable[[float, float], float]
    label: str = "raw"

    def evaluate(self, x, y):
        return Edif(float(self.u(x, y)), float(self.v(x, y)))


Z = Var("z")
I_UNIT = Const(kc.DXDY)


def raw_field(u: Callable[[float, float], float], v: Callable[[float, float], float],
              label: str = "raw") -> RawField:
    return RawField(u, v, label)


# --------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos,
                             frozenset({"number", "identifier", "+", "-", "*", "/", "^", "(", ")"}))
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: frozenset[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = variables

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect_op(self, op: str) -> None:
        if self.tok.kind == "op" and self.tok.text == op:
            self.advance()
            return
        raise ParseError(f"unexpected {self._describe(self.tok)}", self.tok.pos, frozenset({op}))

    @staticmethod
    def _describe(t: _Token) -> str:
        return "end of input" if t.kind == "end" else f"token {t.text!r}"

    def _base_starts(self) -> frozenset[str]:
        return frozenset({"number", "(", "I", "pi", *self.variables, *FUNCTIONS})

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self._describe(self.tok)}", self.tok.pos,
                             frozenset({"+", "-", "*", "/", "^", "end of input"}))
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self) -> Expr:
        negate = False
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            negate = True
        node = self.base()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            node = Pow(node, self.exponent())
        return Neg(node) if negate else node

    def exponent(self) -> Union[int, float]:
        paren = self.tok.kind == "op" and self.tok.text == "("
        if paren:
            self.advance()
        sign = 1
        if self.tok.kind == "op" and self.tok.text in "+-":
            sign = -1 if self.advance().text == "-" else 1
        if self.tok.kind != "num":
            raise ParseError(f"unexpected {self._describe(self.tok)} in exponent", self.tok.pos,
                             frozenset({"integer"}))
        text = self.advance().text
        if paren:
            self.expect_op(")")
        if re.fullmatch(r"\d+", text):
            return sign * int(text)
        return sign * float(text)

    def base(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(Edif(float(t.text), 0.0))
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        if t.kind == "ident":
            if t.text in self.variables:
                self.advance()
                return Var(t.text)
            if t.text == "I":
                self.advance()
                return I_UNIT
            if t.text == "pi":
                self.advance()
                return Const(Edif(math.pi, 0.0))
            if t.text in FUNCTIONS:
                self.advance()
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Func(t.text, arg)
            raise ParseError(f"unknown identifier {t.text!r}", t.pos, self._base_starts())
        raise ParseError(f"unexpected {self._describe(t)}", t.pos, self._base_starts())


def parse_expr(text: str, variables: Iterable[str] = ("z",)) -> Expr:
    """Parse ``text`` into an expression tree.

    ``variables`` names the free variables; the default is just ``z``.  Raw
    component fields are written in the real coordinates with
    ``variables=("x", "y")``.
    """
    return _Parser(text, frozenset(variables)).parse()


# --------------------------------------------------------------------------
# Rendering (inverse of parse_expr up to parenthesisation)


def _num(value: float) -> str:
    return repr(float(value))


def _render_const(w: Edif) -> str:
    u, v = w.u, w.v
    neg_u = math.copysign(1.0, u) < 0
    re_part = f"(0 - {_num(-u)})" if neg_u else _num(u)
    if v == 0.0 and math.copysign(1.0, v) > 0:
        return re_part
    sign = "-" if math.copysign(1.0, v) < 0 else "+"
    return f"({re_part} {sign} {_num(abs(v))}*I)"


def render(node: Expr) -> str:
    """Fully parenthesised text that parses back to an identically evaluating tree."""
    if isinstance(node, Const):
        return _render_const(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-({render(node.arg)}))"
    if isinstance(node, (Add, Sub, Mul, Div)):
        op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(node)]
        return f"({render(node.left)} {op} {render(node.right)})"
    if isinstance(node, Pow):
        e = node.exponent
        e_text = str(e) if isinstance(e, int) else _num(e)
        return f"({render(node.base)})^({e_text})"
    if isinstance(node, Func):
        return f"{node.name}({render(node.arg)})"
    if isinstance(node, RawField):
        raise TypeError("raw fields have no textual form")
    raise TypeError(f"unknown node {node!r}")


# --------------------------------------------------------------------------
# Evaluation


def eval_field(f: Expr, at: PointLike) -> Edif:
    p = as_point(at)
    try:
        w = f.evaluate(float(p.x), float(p.y))
    except (ZeroDivisor, ZeroEdif) as exc:
        raise SingularEvaluation(f"{render_safe(f)} is singular at ({p.x}, {p.y}): {exc}") from exc
    if not w.is_finite():
        raise NonFinite(f"{render_safe(f)} is not finite at ({p.x}, {p.y})")
    return w


def render_safe(f: Expr) -> str:
    try:
        return render(f)
    except TypeError:
        return repr(f)


# --------------------------------------------------------------------------
# Symbolic d/dz

_ZERO = Const(kc.ZERO)
_ONE = Const(kc.ONE)


def _is_const(node: Expr, value: float) -> bool:
    return isinstance(node, Const) and node.value == Edif(value, 0.0)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    return Sub(a, b)


def _neg(a: Expr) -> Expr:
    if _is_const(a, 0.0):
        return _ZERO
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(kc.edif_mul(a.value, b.value))
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return _ZERO
    if _is_const(b, 1.0):
        return a
    return Div(a, b)


def _scalar(c: float) -> Const:
    return Const(Edif(float(c), 0.0))


def _pow(base: Expr, e) -> Expr:
    if e == 0:
        return _ONE
    if e == 1:
        return base
    return Pow(base, e)


def differentiate(f: Expr) -> Expr:
    """Symbolic ``d/dz`` of a field built from ``z``; equals ``d/dx`` for such fields."""
    if isinstance(f, Const):
        return _ZERO
    if isinstance(f, Var):
        if f.name != "z":
            raise NotDifferentiable(f"d/dz of the coordinate {f.name!r} is not defined")
        return _ONE
    if isinstance(f, Neg):
        return _neg(differentiate(f.arg))
    if isinstance(f, Add):
        return _add(differentiate(f.left), differentiate(f.right))
    if isinstance(f, Sub):
        return _sub(differentiate(f.left), differentiate(f.right))
    if isinstance(f, Mul):
        return _add(_mul(differentiate(f.left), f.right), _mul(f.left, differentiate(f.right)))
    if isinstance(f, Div):
        da, db = differentiate(f.left), differentiate(f.right)
        if _is_const(db, 0.0):
            return _div(da, f.right)
        return _div(_sub(_mul(da, f.right), _mul(f.left, db)), _pow(f.right, 2))
    if isinstance(f, Pow):
        e = f.exponent
        if e == 0:
            return _ZERO
        db = differentiate(f.base)
        return _mul(_mul(_scalar(e), _pow(f.base, e - 1)), db)
    if isinstance(f, Func):
        a = f.arg
        da = differentiate(a)
        if f.name == "exp":
            outer = f
        elif f.name == "log":
            return _div(da, a)
        elif f.name == "sin":
            outer = Func("cos", a)
        elif f.name == "cos":
            outer = _neg(Func("sin", a))
        elif f.name == "tan":
            outer = _div(_ONE, _pow(Func("cos", a), 2))
        elif f.name == "sinh":
            outer = Func("cosh", a)
        elif f.name == "cosh":
            outer = Func("sinh", a)
        elif f.name == "sqrt":
            return _div(da, _mul(_scalar(2.0), f))
        else:  # pragma: no cover - Func validates names
            raise NotDifferentiable(f.name)
        return _mul(outer, da)
    raise NotDifferentiable(f"cannot differentiate node {type(f).__name__}")


def differentiate_n(f: Expr, n: int) -> Expr:
    for _ in range(n):
        f = differentiate(f)
    return f


def uses_coordinates(f: Expr) -> bool:
    """True if ``f`` references ``x``, ``y`` or a raw component field."""
    if isinstance(f, RawField):
        return True
    if isinstance(f, Var):
        return f.name != "z"
    for child in _children(f):
        if uses_coordinates(child):
            return True
    return False


def _children(f: Expr) -> tuple[Expr, ...]:
    if isinstance(f, (Neg, Func)):
        return (f.arg,)
    if isinstance(f, (Add, Sub, Mul, Div)):
        return (f.left, f.right)
    if isinstance(f, Pow):
        return (f.base,)
    return ()


def covaluation(f: Expr) -> Expr:
    """``dw/dx`` of a shedif, as a tree.

    For fields that are not functions of ``z`` the two textbook forms of the
    co-valuation disagree; a warning is emitted and the tree is refused.
    """
    if uses_coordinates(f):
        warnings.warn("co-valuation is only defined here for fields built from z", stacklevel=2)
        raise NotDifferentiable("co-valuation requires a function of z")
    return differentiate(f)


# --------------------------------------------------------------------------
# Numeric Kähler derivative and Cauchy-Riemann test

_CBRT_EPS = sys.float_info.epsilon ** (1.0 / 3.0)


def default_step(at: PointLike) -> float:
    p = as_point(at)
    return _CBRT_EPS * max(1.0, abs(p.x), abs(p.y))


@dataclass(frozen=True, slots=True)
class _Partials:
    value: Edif
    u_x: float
    u_y: float
    v_x: float
    v_y: float


def _partials(f: Expr, p: Point, h: float) -> _Partials:
    x, y = p.x, p.y
    e = lambda px, py: eval_field(f, (px, py))  # noqa: E731
    c = e(x, y)
    xp, xm = e(x + h, y), e(x - h, y)
    yp, ym = e(x, y + h), e(x, y - h)
    inv = 0.5 / h
    return _Partials(
        c,
        (xp.u - xm.u) * inv,
        (yp.u - ym.u) * inv,
        (xp.v - xm.v) * inv,
        (yp.v - ym.v) * inv,
    )


def kahler_derivative(f: Expr, at: PointLike, h: float | None = None) -> Multivector:
    """``(dx d/dx + dy d/dy) w`` by central differences; odd-valued."""
    p = as_point(at)
    if h is None:
        h = default_step(p)
    d = _partials(f, p, h)
    return Multivector(0.0, d.u_x - d.v_y, d.u_y + d.v_x, 0.0)


@dataclass(frozen=True, slots=True)
class CrResidual:
    r1: float  # u_x - v_y
    r2: float  # u_y + v_x
    at: Point
    scale: float = 1.0

    @property
    def magnitude(self) -> float:
        return math.hypot(self.r1, self.r2)

    @property
    def relative(self) -> float:
        """Residual measured against the size of the field and its partials."""
        return self.magnitude / self.scale


def cr_residual(f: Expr, at: PointLike, h: float | None = None) -> CrResidual:
    p = as_point(at)
    if h is None:
        h = default_step(p)
    d = _partials(f, p, h)
    scale = max(1.0, abs(d.value), abs(d.u_x), abs(d.u_y), abs(d.v_x), abs(d.v_y))
    return CrResidual(d.u_x - d.v_y, d.u_y + d.v_x, p, scale)


def is_strict_harmonic(f: Expr, samples: Iterable[PointLike], tol: float = 1e-6,
                       h: float | None = None) -> tuple[bool, CrResidual]:
    """Sample-based Cauchy-Riemann test.

    The residual at each sample is compared to ``tol`` after dividing by
    ``max(1, |w|, |partials|)``, so fields of large magnitude are judged on
    the same footing as unit-sized ones.  Returns the worst residual seen.
    """
    worst = None
    for s in samples:
        r = cr_residual(f, s, h)
        if worst is None or r.relative > worst.relative:
            worst = r
    if worst is None:
        raise ValueError("at least one sample point is required")
    return worst.relative <= tol, worst


def grid(x0: float, x1: float, y0: float, y1: float, n: int) -> list[Point]:
    if n < 1:
        raise ValueError("grid needs n >= 1")
    if n == 1:
        return [Point((x0 + x1) / 2, (y0 + y1) / 2)]
    xs = [x0 + (x1 - x0) * i / (n - 1) for i in range(n)]
    ys = [y0 + (y1 - y0) * j / (n - 1) for j in range(n)]
    return [Point(x, y) for y in ys for x in xs]
