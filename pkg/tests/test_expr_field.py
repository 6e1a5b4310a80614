import cmath
import math
import random

import pytest

from exprgen import is_regular, random_expr
from oracle import complex_fn

from kahler_cv.errors import NotDifferentiable, ParseError, SingularEvaluation
from kahler_cv.expr_field import (
    Add,
    Const,
    Div,
    Func,
    Mul,
    Neg,
    Point,
    Pow,
    Sub,
    Var,
    covaluation,
    cr_residual,
    differentiate,
    differentiate_n,
    eval_field,
    grid,
    is_strict_harmonic,
    kahler_derivative,
    parse_expr,
    raw_field,
    render,
)
from kahler_cv.kahler_core import DX, DY, Edif, clifford_product, edif_inverse

Z = Var("z")


def c(u, v=0.0):
    return Const(Edif(float(u), float(v)))


@pytest.mark.parametrize("text,tree", [
    ("z^2", Pow(Z, 2)),
    ("1/(z*(z - pi/2))", Div(c(1), Mul(Z, Sub(Z, Div(c(math.pi), c(2)))))),
    ("1/(z^2+1)^2", Div(c(1), Pow(Add(Pow(Z, 2), c(1)), 2))),
    ("-z^2", Neg(Pow(Z, 2))),
    ("2*-z", Mul(c(2), Neg(Z))),
    ("exp( z )", Func("exp", Z)),
    ("z^-2", Pow(Z, -2)),
    ("z^(-2)", Pow(Z, -2)),
    ("z^0.5", Pow(Z, 0.5)),
    ("1.5e-3 + I", Add(c(1.5e-3), c(0, 1))),
    ("a - b - c".replace("a", "z").replace("b", "1").replace("c", "2"), Sub(Sub(Z, c(1)), c(2))),
])
def test_parse(text, tree):
    assert parse_expr(text) == tree


@pytest.mark.parametrize("text,pos", [
    ("z +", 3),
    ("(z", 2),
    ("foo(z)", 0),
    ("z $ 2", 2),
    ("z^z", 2),
    ("x", 0),
    ("z z", 2),
])
def test_parse_errors(text, pos):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.position == pos
    assert info.value.expected


def test_parse_error_expected_set():
    with pytest.raises(ParseError) as info:
        parse_expr("exp z")
    assert info.value.expected == {"("}


def test_raw_coordinates_parse():
    f = parse_expr("x*y + 1", variables=("x", "y"))
    assert eval_field(f, (2, 3)) == Edif(7.0, 0.0)


@pytest.mark.parametrize("text,at,expected", [
    ("z", (2, 3), Edif(2.0, 3.0)),
    ("z^2", (2, 1), Edif(3.0, 4.0)),
    ("1/z", (0, 1), Edif(0.0, -1.0)),
    ("I*I", (5, 5), Edif(-1.0, 0.0)),
])
def test_eval_examples(text, at, expected):
    assert eval_field(parse_expr(text), at) == expected


def test_eval_singular():
    with pytest.raises(SingularEvaluation):
        eval_field(parse_expr("1/z"), (0, 0))
    with pytest.raises(SingularEvaluation):
        eval_field(parse_expr("log(z)"), (0, 0))


def test_eval_deterministic():
    f = parse_expr("sin(z)/(z^3 + 2*I) - log(z + 4)")
    assert eval_field(f, (0.3, -0.7)) == eval_field(f, (0.3, -0.7))


def test_eval_against_oracle():
    rng = random.Random(3)
    text = "exp(z)*sin(z)/(z^2 + 3) + sqrt(z + 4) - cosh(z)^(-1) + tan(z/3)"
    f, g = parse_expr(text), complex_fn(text)
    for _ in range(50):
        x, y = rng.uniform(-1, 1), rng.uniform(-1, 1)
        got = complex(eval_field(f, (x, y)))
        want = complex(g(complex(x, y)))
        assert abs(got - want) <= 1e-12 * abs(want)


def test_differentiate_examples():
    d = differentiate(Z)
    assert d == c(1)
    assert eval_field(d, (0.4, -2.0)) == Edif(1.0, 0.0)
    assert eval_field(differentiate(parse_expr("z^3")), (0.5, 0)) == Edif(0.75, 0.0)
    assert differentiate(parse_expr("exp(z)")) == parse_expr("exp(z)")


def test_differentiate_raw_rejected():
    with pytest.raises(NotDifferentiable):
        differentiate(raw_field(lambda x, y: x, lambda x, y: 0.0))
    with pytest.raises(NotDifferentiable):
        differentiate(parse_expr("x", variables=("x",)))


def test_covaluation_warns_for_non_z_fields():
    with pytest.warns(UserWarning):
        with pytest.raises(NotDifferentiable):
            covaluation(raw_field(lambda x, y: x, lambda x, y: y))
    assert covaluation(parse_expr("z^2")) == differentiate(parse_expr("z^2"))


@pytest.mark.parametrize("text", [
    "z^5 - 3*z", "exp(z)*sin(z)", "1/(z - 3)", "log(z + 2)", "sqrt(z + 2)",
    "tan(z)", "cosh(z)/sinh(z + 2)", "(z + I)^(-2)", "cos(z^2)", "z^2.5",
])
def test_symbolic_derivative_vs_finite_difference(text):
    f = parse_expr(text)
    df = differentiate(f)
    rng = random.Random(hash(text) & 0xFFFF)
    for _ in range(10):
        x, y = rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)
        h = 1e-5
        fd = (eval_field(f, (x + h, y)) - eval_field(f, (x - h, y))) / (2 * h)
        sym = eval_field(df, (x, y))
        assert abs(sym - fd) <= 1e-6 * max(1.0, abs(sym))


def test_symbolic_derivative_random_trees():
    rng = random.Random(11)
    checked = 0
    while checked < 100:
        f = random_expr(rng, 4)
        p = (rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        if not is_regular(f, p, margin=0.2, cap=1e4):
            continue
        h = 1e-5
        try:
            fd = (eval_field(f, (p[0] + h, p[1])) - eval_field(f, (p[0] - h, p[1]))) / (2 * h)
        except Exception:
            continue
        sym = eval_field(differentiate(f), p)
        assert abs(sym - fd) <= 1e-6 * max(1.0, abs(sym), abs(eval_field(f, p))), render(f)
        checked += 1


def test_kahler_derivative_examples():
    d = kahler_derivative(parse_expr("z^2"), (0.7, -0.3))
    assert d.s == 0.0 and d.p == 0.0
    assert abs(d.a) < 1e-9 and abs(d.b) < 1e-9

    sq = raw_field(lambda x, y: x * x, lambda x, y: 0.0)
    d = kahler_derivative(sq, (1.0, 0.0))
    assert d.a == pytest.approx(2.0, abs=1e-9)
    assert abs(d.b) < 1e-9

    d = kahler_derivative(parse_expr("1/z"), (0.0, 1.0))
    assert abs(d.a) < 1e-9 and abs(d.b) < 1e-9


def test_kahler_derivative_singular_stencil():
    with pytest.raises(SingularEvaluation):
        kahler_derivative(parse_expr("1/z"), (0.0, 0.0))


def test_strict_harmonic_examples():
    ok, worst = is_strict_harmonic(parse_expr("exp(z)"), grid(-1, 1, -1, 1, 5), 1e-6)
    assert ok
    ok, _ = is_strict_harmonic(parse_expr("z^2 + 3*z + 1"), grid(-1, 1, -1, 1, 5), 1e-6)
    assert ok

    ux = raw_field(lambda x, y: x, lambda x, y: 0.0)
    ok, worst = is_strict_harmonic(ux, grid(-1, 1, -1, 1, 5), 1e-6)
    assert not ok
    for p in grid(-1, 1, -1, 1, 5):
        r = cr_residual(ux, p)
        assert r.r1 == pytest.approx(1.0, abs=1e-9)
        assert r.r2 == 0.0


def test_conjugate_field_is_not_harmonic():
    conj = raw_field(lambda x, y: x, lambda x, y: -y)
    ok, worst = is_strict_harmonic(conj, [(0.5, 0.5)], 1e-6)
    assert not ok and worst.r1 == pytest.approx(2.0, abs=1e-9)


def test_render_roundtrip_bit_identical():
    rng = random.Random(5)
    for _ in range(300):
        f = random_expr(rng, 5)
        g = parse_expr(render(f))
        for _ in range(3):
            p = (rng.uniform(-2, 2), rng.uniform(-2, 2))
            try:
                a = eval_field(f, p)
            except Exception as exc:
                with pytest.raises(type(exc)):
                    eval_field(g, p)
                continue
            b = eval_field(g, p)
            assert (a.u, a.v) == (b.u, b.v)


def test_render_constants():
    for w in (Edif(-1.5, 0.0), Edif(2.0, -3.0), Edif(-0.25, 0.125), Edif(math.pi, 0.0)):
        assert eval_field(parse_expr(render(Const(w))), (0, 0)) == w


def test_polar_identities_pointwise():
    """d(phi) = (1/z) dy and d(rho) = (rho/z) dx as Clifford products."""
    rng = random.Random(17)
    n = 0
    while n < 100:
        x, y = rng.uniform(-3, 3), rng.uniform(-3, 3)
        rho = math.hypot(x, y)
        if rho <= 0.1:
            continue
        n += 1
        inv_z = edif_inverse(Edif(x, y))
        dphi = clifford_product(inv_z.to_multivector(), DY)
        drho = clifford_product((inv_z * rho).to_multivector(), DX)
        for got, want in ((dphi.a, -y / rho**2), (dphi.b, x / rho**2),
                          (drho.a, x / rho), (drho.b, y / rho)):
            assert abs(got - want) <= 1e-10 * max(abs(want), 1e-300) or abs(got - want) < 1e-15
        assert dphi.s == 0 and dphi.p == 0 and drho.s == 0 and drho.p == 0


def test_point_validation():
    with pytest.raises(ValueError):
        Point(math.nan, 0.0)


def test_nth_derivative():
    f = parse_expr("1/(z + I)^2")
    d1 = eval_field(differentiate_n(f, 1), (0, 1))
    assert complex(d1) == pytest.approx(-2 / (2j) ** 3, rel=1e-14)
    assert eval_field(differentiate_n(parse_expr("exp(z)"), 4), (0, 0)) == Edif(1.0, 0.0)


def test_operator_sugar():
    f = (Z + 1) * Z - 2 / Z
    assert complex(eval_field(f, (1, 1))) == pytest.approx(((1 + 1j) + 1) * (1 + 1j) - 2 / (1 + 1j))
    assert cmath.isclose(complex(eval_field(-Z ** 2, (0, 1))), 1)
