import cmath
import math
import random

import pytest

from oracle import complex_fn, curve_integral

from kahler_cv.cauchy_suite import (
    Decomposition,
    PoleSpec,
    ResidueReport,
    cauchy_derivative,
    cauchy_derivative_result,
    cauchy_value,
    cauchy_value_result,
    continuity_limit_check,
    covaluation_roundtrip,
    decompose_valuation,
    default_residue_radius,
    dx_only_integral,
    goursat_residual,
    kernel,
    kernel_valuation,
    residue,
)
from kahler_cv.contour import Circle, Polyline, circle, segment, valuation
from kahler_cv.errors import GeometryError, PoleOnOrOutside
from kahler_cv.expr_field import differentiate_n, eval_field, parse_expr
from kahler_cv.kahler_core import Edif

TWO_PI = 2 * math.pi
UNIT = circle(0, 0, 1)
SQUARE = Polyline(((-1, -1), (1, -1), (1, 1), (-1, 1)), closed=True)


def near(w, target, tol):
    return abs(complex(w) - complex(target)) <= tol


@pytest.mark.parametrize("text,curve", [("exp(z)", UNIT), ("z^2 - 3*z", SQUARE)])
def test_goursat_examples(text, curve):
    assert goursat_residual(parse_expr(text), curve) <= 1e-9


def test_goursat_needs_shedif_inside():
    assert goursat_residual(parse_expr("1/z"), UNIT) == pytest.approx(TWO_PI, rel=1e-12)


def test_goursat_rejects_open_curve():
    with pytest.raises(GeometryError):
        goursat_residual(parse_expr("z"), segment((0, 0), (1, 0)))


def test_kernel_examples():
    z0 = (0.1, -0.2)
    assert near(kernel_valuation(z0, 0, UNIT), TWO_PI * 1j, 1e-10)
    assert near(kernel_valuation(z0, 3, UNIT), 0, 1e-10)
    assert near(kernel_valuation(z0, 0, circle(3, 4, 7)), TWO_PI * 1j, 1e-10)


def test_kernel_law_random_configurations():
    rng = random.Random(101)
    for _ in range(50):
        z0 = (rng.uniform(-3, 3), rng.uniform(-3, 3))
        r = rng.uniform(0.3, 5)
        off = rng.uniform(0, 0.8 * r)
        th = rng.uniform(0, TWO_PI)
        c = circle(z0[0] + off * math.cos(th), z0[1] + off * math.sin(th), r)
        assert near(kernel_valuation(z0, 0, c), TWO_PI * 1j, 1e-8)
        for n in range(1, 6):
            assert abs(kernel_valuation(z0, n, c)) <= 1e-8


def test_kernel_tree():
    assert eval_field(kernel((1, 0), 2), (2, 0)) == Edif(1.0, 0.0)


def test_dx_only_examples():
    z0 = (0.2, 0.3)
    assert abs(dx_only_integral(parse_expr("1"), z0, UNIT)) <= 1e-10
    f = kernel(z0, 2)  # (z - z0)^-2
    assert abs(dx_only_integral(f, z0, UNIT)) <= 1e-10
    # f = z gives U = Re(2 pi i z0), which vanishes when z0 sits on the x-axis
    assert abs(dx_only_integral(parse_expr("z"), (0.4, 0.0), UNIT)) <= 1e-10
    assert dx_only_integral(parse_expr("exp(z)"), z0, UNIT).v == 0.0


def test_cauchy_value_examples():
    got = cauchy_value(parse_expr("exp(z)"), (0.3, 0.2), UNIT)
    assert near(got, cmath.exp(0.3 + 0.2j), 1e-12)
    assert near(cauchy_value(parse_expr("1"), (-0.4, 0.5), UNIT), 1, 1e-12)
    assert near(cauchy_value(parse_expr("1/(z - pi/2)"), (0, 0), UNIT), -2 / math.pi, 1e-12)


def test_cauchy_value_clockwise_and_errors():
    f = parse_expr("sin(z)")
    assert near(cauchy_value(f, (0.2, 0.1), circle(0, 0, 1, "cw")), cmath.sin(0.2 + 0.1j), 1e-12)
    with pytest.raises(PoleOnOrOutside):
        cauchy_value(f, (2, 0), UNIT)
    with pytest.raises(PoleOnOrOutside):
        cauchy_value(f, (1, 1), SQUARE)
    with pytest.raises(PoleOnOrOutside):
        cauchy_value(f, (1, 0), UNIT)


@pytest.mark.parametrize("text", ["exp(z)", "sin(z)", "z^3 - 2*z", "1/(z - 3) + z^2", "cosh(z)/(z + 2*I)"])
def test_cauchy_reconstruction(text):
    f = parse_expr(text)
    rng = random.Random(text)
    for _ in range(20):
        r, th = 0.9 * math.sqrt(rng.random()), rng.uniform(0, TWO_PI)
        z0 = (r * math.cos(th), r * math.sin(th))
        assert abs(cauchy_value(f, z0, circle(0, 0, 1.2)) - eval_field(f, z0)) <= 1e-8


def test_cauchy_result_error_is_scaled():
    res = cauchy_value_result(parse_expr("exp(z)"), (0, 0), UNIT)
    raw = valuation(parse_expr("exp(z)/z"), UNIT)
    assert res.abs_error_estimate == pytest.approx(raw.abs_error_estimate / TWO_PI)


def test_contour_independence():
    f = parse_expr("exp(z)*sin(z)/(z - 4)")
    for z0 in [(0, 0), (0.3, -0.5), (-0.6, 0.6)]:
        a = cauchy_value_result(f, z0, circle(0, 0, 0.95))
        b = cauchy_value_result(f, z0, SQUARE)
        assert abs(a.value - b.value) <= a.abs_error_estimate + b.abs_error_estimate


def test_derivative_examples():
    d = cauchy_derivative(parse_expr("1/(z + I)^2"), (0, 1), 1, circle(0, 1, 0.5))
    assert near(d, -0.25j, 1e-12)
    # times 2 pi dxdy recovers the valuation of 1/(z^2+1)^2 around (0, 1)
    assert near(Edif(0.0, TWO_PI) * d, math.pi / 2, 1e-12)
    assert near(cauchy_derivative(parse_expr("z^3"), (0.5, 0), 2, UNIT), 3, 1e-12)
    for n in range(1, 5):
        assert near(cauchy_derivative(parse_expr("exp(z)"), (0, 0), n, UNIT), 1, 1e-11)


@pytest.mark.parametrize("text,z0", [
    ("exp(z)", (0.1, 0.2)),
    ("sin(z)*cos(z)", (-0.3, 0.1)),
    ("1/(z - 2)", (0.2, -0.1)),
    ("z^5 - z^2 + 1", (0.4, 0.4)),
    ("sqrt(z + 3)", (0.0, 0.3)),
])
def test_derivative_agreement(text, z0):
    f = parse_expr(text)
    for n in range(1, 5):
        got = cauchy_derivative(f, z0, n, UNIT)
        want = eval_field(differentiate_n(f, n), z0)
        assert abs(got - want) <= 1e-6 * max(abs(want), 1.0)


def test_derivative_order_validation():
    with pytest.raises(ValueError):
        cauchy_derivative(parse_expr("z"), (0, 0), 0, UNIT)
    with pytest.raises(ValueError):
        cauchy_derivative_result(parse_expr("z"), (0, 0), -1, UNIT)


def test_residue_examples():
    rep = residue(parse_expr("1/(z*(z - pi/2))"), PoleSpec((0, 0)), 1.0)
    assert near(rep.residue, -2 / math.pi, 1e-12)
    assert near(residue(parse_expr("1/z"), PoleSpec((0, 0)), 1.0).residue, 1, 1e-12)
    rep = residue(parse_expr("1/(z^2+1)^2"), PoleSpec((0, 1)), 0.5)
    assert near(rep.residue, -0.25j, 1e-12)
    assert rep.circle_radius == 0.5 and rep.error_estimate >= 0


def test_residue_default_radius():
    a, b = PoleSpec((0, 0)), PoleSpec((0.6, 0.8))
    assert default_residue_radius(a) == 1.0
    assert default_residue_radius(a, [b]) == pytest.approx(0.5)
    rep = residue(parse_expr("1/(z*(z - 0.6 - 0.8*I))"), a, others=[b])
    assert rep.circle_radius == pytest.approx(0.5)
    assert near(rep.residue, 1 / complex(-0.6, -0.8), 1e-12)


def test_residue_circle_must_isolate_pole():
    with pytest.raises(GeometryError):
        residue(parse_expr("1/(z*(z-1))"), PoleSpec((0, 0)), 2.0, others=[PoleSpec((1, 0))])


def test_residue_matches_oracle():
    text = "exp(z)/((z - 0.5)*(z + I))"
    rep = residue(parse_expr(text), PoleSpec((0.5, 0)), 0.3)
    want = curve_integral(complex_fn(text), circle(0.5, 0, 0.3)) / (TWO_PI * 1j)
    assert abs(complex(rep.residue) - want) <= 1e-6


def test_pole_spec_validation():
    with pytest.raises(ValueError):
        PoleSpec((0, 0), 0)
    with pytest.raises(ValueError):
        ResidueReport(PoleSpec((0, 0)), Edif(1.0, 0.0), 0.0, 0.0)


def test_report_dict_roundtrip():
    rep = residue(parse_expr("1/(z - I)"), PoleSpec((0, 1), 1), 0.5)
    assert ResidueReport.from_dict(rep.to_dict()) == rep
    dec = decompose_valuation(parse_expr("1/z"), circle(0, 0, 3), [PoleSpec((0, 0))], [1.0])
    assert Decomposition.from_dict(dec.to_dict()) == dec


def test_decompose_examples():
    d = decompose_valuation(parse_expr("1/(z*(z-2))"), circle(0, 0, 5),
                            [PoleSpec((0, 0)), PoleSpec((2, 0))], [0.5, 0.5])
    assert abs(d.lhs) <= 1e-10 and abs(d.rhs) <= 1e-10
    d = decompose_valuation(parse_expr("1/z"), circle(0, 0, 3), [PoleSpec((0, 0))], [1.0])
    assert near(d.lhs, TWO_PI * 1j, 1e-10) and near(d.rhs, TWO_PI * 1j, 1e-10)
    d = decompose_valuation(parse_expr("z^2"), UNIT, [], [])
    assert abs(d.lhs) <= 1e-12 and d.rhs == Edif(0.0, 0.0)


def test_decompose_follows_outer_orientation():
    d = decompose_valuation(parse_expr("1/z"), circle(0, 0, 3, "cw"), [(0, 0)], [1.0])
    assert near(d.rhs, -TWO_PI * 1j, 1e-10)
    assert d.discrepancy <= d.error_estimate
    cw_square = SQUARE.reverse()
    d = decompose_valuation(parse_expr("1/(z - 0.2)"), cw_square, [(0.2, 0)], [0.3])
    assert near(d.lhs, -TWO_PI * 1j, 1e-10) and d.discrepancy <= d.error_estimate


@pytest.mark.parametrize("poles,radii", [
    ([(0, 0), (0.5, 0)], [0.4, 0.4]),       # overlap
    ([(0, 0)], [3.5]),                      # leaves C
    ([(4, 0)], [0.5]),                      # centre outside
    ([(2.8, 0)], [0.5]),                    # crosses C
])
def test_decompose_geometry_errors(poles, radii):
    with pytest.raises(GeometryError):
        decompose_valuation(parse_expr("1/z"), circle(0, 0, 3), poles, radii)


def test_decompose_random_rationals():
    rng = random.Random(8)
    for _ in range(10):
        k = rng.choice((2, 3))
        locs = []
        while len(locs) < k:
            p = (round(rng.uniform(-2, 2), 3), round(rng.uniform(-2, 2), 3))
            if all(math.dist(p, q) > 0.8 for q in locs):
                locs.append(p)
        den = "*".join(f"(z - ({x}) - ({y})*I)" for x, y in locs)
        f = parse_expr(f"({rng.uniform(-2, 2)} + z)/({den})")
        d = decompose_valuation(f, circle(0, 0, 3.5), [PoleSpec(p, 1) for p in locs], [0.3] * k)
        assert d.discrepancy <= d.error_estimate


def test_continuity_examples():
    seq = continuity_limit_check(parse_expr("exp(z)"), (0, 0), [0.5, 0.25, 0.125])
    assert all(s <= 1e-9 for s in seq)
    assert all(s <= 1e-9 for s in continuity_limit_check(parse_expr("z^2"), (1, 0), [0.5, 0.1]))
    assert continuity_limit_check(parse_expr("1"), (0.3, 0.3), [1, 0.5]) == [0.0, 0.0]
    with pytest.raises(ValueError):
        continuity_limit_check(parse_expr("z"), (0, 0), [0.5, 0.5])


@pytest.mark.parametrize("text,end", [("z^2", (1, 1)), ("1", (1, 1)), ("sin(z)", (0.5, 0.5))])
def test_covaluation_examples(text, end):
    r1, r2 = covaluation_roundtrip(parse_expr(text), segment((0, 0), end))
    assert r1 <= 1e-6 and r2 <= 1e-6


def test_covaluation_constant_is_zero_to_roundoff():
    r1, r2 = covaluation_roundtrip(parse_expr("1"), segment((0, 0), (1, 1)))
    assert r2 == 0.0  # d1/dx is the constant 0
    assert r1 <= 1e-12  # Kronrod weights sum to 2 only to roundoff


def test_covaluation_needs_open_curve():
    with pytest.raises(GeometryError):
        covaluation_roundtrip(parse_expr("z"), UNIT)


def test_valuations_match_oracle():
    cases = [
        ("exp(z)/(z - 0.3 - 0.2*I)", UNIT),
        ("sin(z)/(z - 0.1)^3", circle(0, 0, 0.8)),
        ("1/(z*(z-2))", circle(0, 0, 5)),
        ("(z + 1)/((z - 0.5*I)*(z + 0.7))", SQUARE),
    ]
    for text, c in cases:
        got = valuation(parse_expr(text), c).value
        assert abs(complex(got) - curve_integral(complex_fn(text), c)) <= 1e-6


def test_circle_type():
    assert isinstance(UNIT, Circle)
