"""
Closed-form walk quantities on complete graphs and the optimality constants.

All closed forms accept a real-valued number of marked nodes ``m`` so that the
line ``m = (n - 1) / a`` can be evaluated without rounding. They also accept
real ``t``: the first maximum of the marked-node probability sits at a
fractional time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

#: Bracket for the optimality slope. The residual changes sign on it.
A_BRACKET = (1.2, 1.8)
#: Values of ``a`` where the reduced optimality equation has a vanishing denominator.
EXCLUDED_A = (0.5, 2.0)
#: Limits of ``P*_M`` are evaluated at these node counts.
N_LOWER_LIMIT = 1.0 + 1e-6
N_UPPER_LIMIT = 1e9

ChebyshevKind = Literal["first", "second"]


def _angle(x: float) -> float:
    # arccos via atan2 keeps full relative accuracy near x = +-1
    return 2.0 * math.atan2(math.sqrt((1.0 - x) / 2.0), math.sqrt((1.0 + x) / 2.0))


def chebyshev(kind: ChebyshevKind, k: float, x: float) -> float:
    """Chebyshev polynomial ``T_k(x)`` or ``U_k(x)`` by its trigonometric form.

    ``k`` may be real; the closed forms below evaluate at fractional times.
    ``U_{-1}`` is 0, and at ``|x| = 1`` the analytic limits are returned. For
    integer ``k`` and ``x < 0`` the parity ``P_k(-x) = (-1)^k P_k(x)`` is used.
    """
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"Chebyshev argument must lie in [-1, 1], got {x!r}")
    if k < -1:
        raise ValueError(f"Chebyshev degree must be >= -1, got {k!r}")
    if x < 0 and float(k).is_integer():
        # parity keeps the evaluation on the well-conditioned side near x = -1
        sign = -1.0 if int(k) % 2 else 1.0
        return sign * chebyshev(kind, k, -x)
    theta = _angle(x)
    if kind == "first":
        return math.cos(k * theta)
    if kind != "second":
        raise ValueError(f"unknown Chebyshev kind {kind!r}")
    if k == -1:
        return 0.0
    s = math.sqrt((1.0 - x) * (1.0 + x))
    if s == 0.0:
        # sin((k+1)t)/sin(t) as t -> 0 or pi
        return (k + 1.0) if x > 0 else (k + 1.0) * math.cos(k * math.pi)
    return math.sin((k + 1.0) * theta) / s


def _check_nm(n: float, m: float) -> None:
    if not n > 1:
        raise ValueError(f"need n > 1, got n={n}")
    if not 0 < m < n:
        raise ValueError(f"need 0 < m < n, got n={n}, m={m}")


def cos_theta2(n: float, m: float) -> float:
    return (n - m - 1.0) / (n - 1.0)


@dataclass(frozen=True)
class EigenphaseTriple:
    theta0: float
    theta1: float
    theta2: float


def eigenphases(n: int, m: float) -> EigenphaseTriple:
    """Eigenphases of the walk on ``K_n`` with ``m`` marked nodes."""
    if n <= 2:
        raise ValueError(f"eigenphases need n >= 3, got n={n}")
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got n={n}, m={m}")
    return EigenphaseTriple(
        theta0=0.0,
        theta1=math.acos(1.0 / (n - 1.0)),
        theta2=math.acos(cos_theta2(n, m)),
    )


def p_marked_closed(t: float, n: float, m: float) -> float:
    """Probability of finding the walker on a marked node of ``K_n`` at time ``t``.

    With ``x = (n-m-1)/(n-1)`` the marked-row amplitude, relative to its value
    at ``t = 0``, is ``(n-1)/(2n-m-2) T_2t(x) + U_2t-1(x) + (n-m-1)/(2n-m-2)``.
    It equals 1 at ``t = 0``, so the expression reduces to ``m/n`` there.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    _check_nm(n, m)
    x = cos_theta2(n, m)
    denom = 2.0 * n - m - 2.0
    amp = (
        (n - 1.0) / denom * chebyshev("first", 2.0 * t, x)
        + chebyshev("second", 2.0 * t - 1.0, x)
        + (n - m - 1.0) / denom
    )
    return m * (n - m) / (n * (n - 1.0)) * amp**2 + m * (m - 1.0) / (n * (n - 1.0))


def tad_closed(t: float, n: float, m: float) -> float:
    """Time-averaged squared distance from the initial state on ``K_n``.

    Equals the mean of ``||psi(s) - psi(0)||^2`` over ``s = 0..t``.
    """
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    _check_nm(n, m)
    x = cos_theta2(n, m)
    num = 2.0 * (n - 1.0) * (n - m) * (2.0 * t + 1.0 - chebyshev("second", 2.0 * t, x))
    return num / (n * (2.0 * n - m - 2.0) * (t + 1.0))


def t_max(n: float, m: float) -> float:
    """Time of the first maximum of :func:`p_marked_closed`."""
    if not n > 1 or not m > 0:
        raise ValueError(f"need n > 1 and m > 0, got n={n}, m={m}")
    radicand = 2.0 * n - m - 2.0
    if radicand < 0:
        raise ValueError(f"m={m} exceeds 2n-2={2 * n - 2}")
    return math.atan(math.sqrt(radicand) / math.sqrt(m)) / (2.0 * math.acos(cos_theta2(n, m)))


def hitting_period(n: float, m: float) -> float:
    """Period of the marked-node probability in ``t``."""
    _check_nm(n, m)
    return math.pi / math.acos(cos_theta2(n, m))


# --------------------------------------------------------------------------
# Optimality condition
# --------------------------------------------------------------------------

def optimality_residual(a: float) -> float:
    """Left-hand side of the transcendental equation fixing the slope ``a``."""
    a32 = a**1.5
    r2 = math.sqrt(2.0)
    return (4.0 * r2 * a32 + 2.0 * a - 3.0) * math.atan(math.sqrt(2.0 * a - 1.0)) - 2.0 * math.pi * (
        r2 * a32 - 1.0
    )


def is_admissible_a(a: float, tol: float = 1e-9) -> bool:
    """False for the excluded slopes and for ``a <= 1/2`` (complex radicand)."""
    if a <= 0.5:
        return False
    return all(abs(a - bad) > tol for bad in EXCLUDED_A)


@lru_cache(maxsize=None)
def solve_a(xtol: float = 1e-15, max_iter: int = 200) -> float:
    """Root of :func:`optimality_residual` in ``A_BRACKET``.

    Bisection narrows the bracket to width 1e-6, then a secant stage (kept
    inside the shrinking bracket) converges to machine precision.
    """
    lo, hi = A_BRACKET
    f_lo, f_hi = optimality_residual(lo), optimality_residual(hi)
    if f_lo * f_hi >= 0:
        raise ArithmeticError(f"no sign change of the optimality residual on [{lo}, {hi}]")

    for _ in range(max_iter):
        if hi - lo < 1e-6:
            break
        mid = 0.5 * (lo + hi)
        f_mid = optimality_residual(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    x0, f0, x1, f1 = lo, f_lo, hi, f_hi
    for _ in range(max_iter):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not lo <= x2 <= hi:
            x2 = 0.5 * (lo + hi)
        f2 = optimality_residual(x2)
        if f2 == 0.0 or abs(x2 - x1) <= xtol * max(1.0, abs(x2)):
            x1, f1 = x2, f2
            break
        if (f2 < 0) == (f_lo < 0):
            lo, f_lo = x2, f2
        else:
            hi, f_hi = x2, f2
        x0, f0, x1, f1 = x1, f1, x2, f2

    # the bracket endpoint with the smaller residual is at least as good
    best = min((abs(f1), x1), (abs(f_lo), lo), (abs(f_hi), hi))[1]
    if not is_admissible_a(best):
        raise ArithmeticError(f"root {best} is an excluded slope")
    return best


@dataclass(frozen=True)
class OptimalityConstants:
    a: float
    t_star_max: float
    t_star_second: float
    t_star: int
    p_low: float
    p_high: float


def p_star(n: float, a: float, t: float | None = None) -> float:
    """Marked probability on the optimal line ``m = (n-1)/a`` at ``t`` (default: first maximum)."""
    if t is None:
        t = t_star_max(a)
    return p_marked_closed(t, n, (n - 1.0) / a)


def t_star_max(a: float) -> float:
    return math.atan(math.sqrt(2.0 * a - 1.0)) / (2.0 * math.acos((a - 1.0) / a))


def t_star_constants(a: float) -> OptimalityConstants:
    first = t_star_max(a)
    second = first + math.pi / math.acos((a - 1.0) / a)
    return OptimalityConstants(
        a=a,
        t_star_max=first,
        t_star_second=second,
        t_star=math.floor(second + 0.5),
        p_low=p_star(N_LOWER_LIMIT, a, first),
        p_high=p_star(N_UPPER_LIMIT, a, first),
    )


@lru_cache(maxsize=None)
def default_constants() -> OptimalityConstants:
    return t_star_constants(solve_a())
