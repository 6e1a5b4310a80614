"""Complex-variable calculus on the real plane through the Kähler algebra.

``z`` is the even differential form ``x + y dxdy``; holomorphic functions
become strict harmonic edifs and contour integrals become valuations.
"""

from .cauchy_suite import (
    Decomposition,
    PoleSpec,
    ResidueReport,
    cauchy_derivative,
    cauchy_value,
    continuity_limit_check,
    covaluation_roundtrip,
    decompose_valuation,
    dx_only_integral,
    goursat_residual,
    kernel_valuation,
    residue,
)
from .contour import (
    Circle,
    Parametric,
    Polyline,
    QuadratureConfig,
    ValuationResult,
    circle,
    curve_from_json,
    curve_to_json,
    reverse,
    segment,
    valuation,
    valuation_potential,
)
from .errors import (
    BudgetExceeded,
    GeometryError,
    KahlerError,
    NonFinite,
    NotDifferentiable,
    ParseError,
    PoleOnOrOutside,
    SingularEvaluation,
    SingularOnCurve,
    ZeroDivisor,
    ZeroEdif,
)
from .expr_field import (
    CrResidual,
    Point,
    differentiate,
    eval_field,
    is_strict_harmonic,
    kahler_derivative,
    parse_expr,
    raw_field,
    render,
)
from .kahler_core import (
    DXDY,
    Edif,
    Multivector,
    PolarForm,
    clifford_product,
    edif_elementary,
    edif_inverse,
    edif_ipow,
    edif_mul,
    polar_decompose,
)

__version__ = "0.1.0"
