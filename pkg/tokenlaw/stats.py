"""Ordinary least squares with Student-t significance.

The two-sided p value of a regression slope is ``I_x(df/2, 1/2)`` with
``x = df / (df + t^2)``, where ``I`` is the regularized incomplete beta function.
It is evaluated here with the modified Lentz continued fraction so that results
match a standard ``lm()`` summary down to the 2.2e-16 reporting floor.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import betaln

from .config import MIN_FIT_POINTS, P_VALUE_FLOOR
from .errors import DegenerateFitError, InsufficientDataError
from .types import LinearFit

logger = logging.getLogger(__name__)

_MAX_ITERATIONS = 400
_EPS = 1e-16
_TINY = 1e-300


def _beta_continued_fraction(x: float, a: float, b: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    logger.warning(f"Incomplete beta continued fraction did not converge for x={x}, a={a}, b={b}")
    return h


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Args:
        x: Upper integration limit in [0, 1]
        a: First shape parameter, > 0
        b: Second shape parameter, > 0

    Returns:
        I_x(a, b) in [0, 1]

    Raises:
        ValueError: If x lies outside [0, 1] or a shape parameter is not positive
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = a * math.log(x) + b * math.log1p(-x) - betaln(a, b)
    # The fraction converges quickly only on one side of the mean.
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_continued_fraction(x, a, b) / a
    return 1.0 - math.exp(log_front) * _beta_continued_fraction(1.0 - x, b, a) / b


def student_t_two_sided(t_value: float, df: int) -> float:
    """Two-sided tail probability P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if math.isinf(t_value):
        return 0.0
    x = df / (df + t_value * t_value)
    return regularized_incomplete_beta(x, df / 2.0, 0.5)


def clamp_p_value(p: float) -> Tuple[float, bool]:
    """Apply the reporting floor; returns the value and whether it was clamped."""
    if p < P_VALUE_FLOOR:
        return P_VALUE_FLOOR, True
    return min(p, 1.0), False


def ols(
    x: Sequence[float],
    y: Sequence[float],
    allow_constant_response: bool = False,
    fit_range: Optional[Tuple[float, float]] = None,
) -> LinearFit:
    """Fit ``y = intercept + slope * x`` by ordinary least squares.

    Args:
        x: Predictor values
        y: Response values, same length as x
        allow_constant_response: Return a slope-0 fit flagged degenerate instead of
            raising when every y is equal
        fit_range: Range recorded on the result

    Returns:
        LinearFit with standard errors, R², t value and clamped two-sided p value

    Raises:
        InsufficientDataError: If fewer than 3 points are given
        DegenerateFitError: If x has zero variance, or y does and constant
            responses are not allowed
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape:
        raise ValueError(f"x and y differ in length: {xs.size} != {ys.size}")
    n = int(xs.size)
    if n < MIN_FIT_POINTS:
        raise InsufficientDataError(f"regression needs at least {MIN_FIT_POINTS} points, got {n}")

    if np.ptp(xs) == 0.0:
        raise DegenerateFitError("degenerate fit: predictor has zero variance", zero_variance="x")
    constant = bool(np.ptp(ys) == 0.0)
    if constant and not allow_constant_response:
        raise DegenerateFitError(
            "degenerate fit: response has zero variance, R² undefined", zero_variance="y"
        )

    x_mean = xs.mean()
    dx = xs - x_mean
    sxx = float(np.dot(dx, dx))
    if constant:
        slope = 0.0
        intercept = float(ys[0])
        syy = 0.0
        rss = 0.0
    else:
        y_mean = ys.mean()
        dy = ys - y_mean
        syy = float(np.dot(dy, dy))
        slope = float(np.dot(dx, dy)) / sxx
        intercept = float(y_mean - slope * x_mean)
        residuals = ys - (intercept + slope * xs)
        rss = float(np.dot(residuals, residuals))
    df = n - 2
    sigma2 = rss / df
    slope_stderr = math.sqrt(sigma2 / sxx)
    intercept_stderr = math.sqrt(sigma2 * (1.0 / n + x_mean * x_mean / sxx))

    if constant:
        r_squared = None
    else:
        r_squared = min(1.0, max(0.0, 1.0 - rss / syy))

    if slope_stderr > 0.0:
        t_value: Optional[float] = slope / slope_stderr
        p_raw = student_t_two_sided(t_value, df)
    else:
        # Points on an exact line: significance is unbounded unless the line is flat.
        t_value = None
        p_raw = 1.0 if slope == 0.0 else 0.0
    p_value, clamped = clamp_p_value(p_raw)

    fit = LinearFit(
        slope=slope,
        intercept=intercept,
        slope_stderr=slope_stderr,
        intercept_stderr=intercept_stderr,
        r_squared=r_squared,
        t_value=t_value,
        p_value=p_value,
        p_below_threshold=clamped,
        residual_stderr=math.sqrt(sigma2),
        df=df,
        n_points=n,
        fit_range=fit_range,
        degenerate=constant,
    )
    logger.debug(f"OLS over {n} points: slope={slope:.6g} se={slope_stderr:.3g} R²={r_squared}")
    return fit
