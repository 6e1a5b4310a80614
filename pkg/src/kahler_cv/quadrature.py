"""Globally adaptive Gauss-Kronrod (7/15) quadrature for pairs of line integrals.

The driver works on a list of parameter pieces, each integrated over its own
interval, and always bisects the interval with the largest error estimate.
Ties are broken by creation order, and the final sum is taken in
(piece, left endpoint) order with ``math.fsum``, so a given problem yields
the same bits on every run.
"""

from __future__ import annotations

import heapq
import math
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import BudgetExceeded

_EPS = sys.float_info.epsilon
_UFLOW = sys.float_info.min

# Kronrod abscissae on [0, 1); odd indices are the 7-point Gauss nodes.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

EVALS_PER_PANEL = 15

PairIntegrand = Callable[[float], tuple[float, float]]


@dataclass(frozen=True)
class Piece:
    """One parameter interval ``[t0, t1]`` of a curve with its integrand."""

    t0: float
    t1: float
    integrand: PairIntegrand
    panels: int = 1


@dataclass(frozen=True)
class QuadResult:
    value: tuple[float, float]
    abs_error: float
    evals: int


def _qk15_component(fc, fvals1, fvals2, half):
    """Kronrod value, error estimate and |f| integral for one scalar component."""
    resk = fc * _WGK[7]
    resg = fc * _WG[3]
    resabs = abs(resk)
    for j in range(7):
        f1, f2 = fvals1[j], fvals2[j]
        resk += _WGK[j] * (f1 + f2)
        resabs += _WGK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            resg += _WG[j // 2] * (f1 + f2)
    mean = resk * 0.5
    resasc = _WGK[7] * abs(fc - mean)
    for j in range(7):
        resasc += _WGK[j] * (abs(fvals1[j] - mean) + abs(fvals2[j] - mean))
    result = resk * half
    resabs *= abs(half)
    resasc *= abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    floor = 0.0
    if resabs > _UFLOW / (50.0 * _EPS):
        floor = 50.0 * _EPS * resabs
        err = max(floor, err)
    return result, err, floor


def qk15_pair(fn: PairIntegrand, a: float, b: float):
    """Apply the 15-point Kronrod rule to both components of ``fn`` on ``[a, b]``.

    Returns ``((I1, I2), error, roundoff_floor)``.
    """
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc1, fc2 = fn(center)
    lo1, lo2, hi1, hi2 = [], [], [], []
    for j in range(7):
        dx = half * _XGK[j]
        g1, g2 = fn(center - dx)
        h1, h2 = fn(center + dx)
        lo1.append(g1)
        lo2.append(g2)
        hi1.append(h1)
        hi2.append(h2)
    r1, e1, fl1 = _qk15_component(fc1, lo1, hi1, half)
    r2, e2, fl2 = _qk15_component(fc2, lo2, hi2, half)
    return (r1, r2), math.hypot(e1, e2), math.hypot(fl1, fl2)


def integrate_pieces(pieces: Sequence[Piece], rel_tol: float, abs_tol: float,
                     max_evals: int) -> QuadResult:
    """Adaptive integration of a pair-valued integrand summed over ``pieces``."""
    heap = []
    done = []
    seq = 0
    evals = 0
    total1 = total2 = 0.0
    total_err = 0.0

    def panel(k, piece, a, b):
        nonlocal seq, evals
        vals, err, floor = qk15_pair(piece.integrand, a, b)
        evals += EVALS_PER_PANEL
        seq += 1
        return (-err, seq, k, a, b, vals, err, floor)

    for k, piece in enumerate(pieces):
        n = max(1, piece.panels)
        for i in range(n):
            a = piece.t0 + (piece.t1 - piece.t0) * i / n
            b = piece.t0 + (piece.t1 - piece.t0) * (i + 1) / n
            entry = panel(k, piece, a, b)
            total1 += entry[5][0]
            total2 += entry[5][1]
            total_err += entry[6]
            heapq.heappush(heap, entry)

    while heap:
        tol = max(abs_tol, rel_tol * math.hypot(total1, total2))
        if total_err <= tol:
            break
        entry = heapq.heappop(heap)
        _, _, k, a, b, vals, err, floor = entry
        if err <= floor * 1.0000001:
            # Already at the rounding floor; bisection cannot improve it.
            done.append(entry)
            continue
        mid = 0.5 * (a + b)
        if not (a < mid < b):
            raise BudgetExceeded("interval cannot be bisected further; integrand is not resolvable")
        if evals + 2 * EVALS_PER_PANEL > max_evals:
            raise BudgetExceeded(
                f"evaluation budget {max_evals} exhausted with error estimate {total_err:.3e} > {tol:.3e}"
            )
        left = panel(k, pieces[k], a, mid)
        right = panel(k, pieces[k], mid, b)
        total1 += left[5][0] + right[5][0] - vals[0]
        total2 += left[5][1] + right[5][1] - vals[1]
        total_err += left[6] + right[6] - err
        heapq.heappush(heap, left)
        heapq.heappush(heap, right)

    final = sorted(done + heap, key=lambda e: (e[2], e[3]))
    v1 = math.fsum(e[5][0] for e in final)
    v2 = math.fsum(e[5][1] for e in final)
    err = math.fsum(e[6] for e in final)
    return QuadResult((v1, v2), err, evals)
