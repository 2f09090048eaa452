"""Complementary cumulative counts of component sizes and their log-log fits.

A power-law density p(s) ~ s^-alpha integrates to a complementary cumulative
count c(s) ~ s^(-alpha+1); fits here are on ln(count) against ln(s), one point
per distinct size, with no binning.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_FIT_RANGE, ERROR_MESSAGES, MIN_FIT_POINTS, MIN_SHAPE_POINTS
from .errors import DegenerateFitError, EmptyInputError, FitRangeError, InsufficientDataError
from .stats import ols
from .types import CcdfCurve, EcdfPoint, LinearFit, Measure, ShapeReport

logger = logging.getLogger(__name__)

PointsLike = Union[CcdfCurve, Sequence[EcdfPoint]]


def _points(points: PointsLike) -> List[EcdfPoint]:
    return list(points.points) if isinstance(points, CcdfCurve) else list(points)


def build_ccdf(
    sizes: Sequence[int],
    measure: Union[Measure, str] = Measure.TOKENS,
    weights: Optional[Sequence[int]] = None,
) -> CcdfCurve:
    """Complementary cumulative count of ``sizes``.

    For each distinct size s the count is the number of inputs with size >= s.
    With ``weights`` the count is the summed weight at or above s instead, and
    sizes carrying no weight produce no point.

    Args:
        sizes: Positive integer sizes (token counts or alphabet sizes)
        measure: Which measure the sizes are, kept as metadata
        weights: Optional non-negative integer weight per size

    Returns:
        CcdfCurve with points sorted by increasing size

    Raises:
        EmptyInputError: If there are no sizes, or every weight is zero
        ValueError: If a size is not a positive integer or weights mismatch
    """
    values = np.asarray(sizes)
    if values.size == 0:
        raise EmptyInputError("cannot build a ccdf from no sizes")
    if not np.issubdtype(values.dtype, np.integer):
        if not np.all(np.mod(values, 1) == 0):
            raise ValueError("sizes must be integers")
        values = values.astype(np.int64)
    if values.min() < 1:
        raise ValueError(f"sizes must be positive, got {values.min()}")

    if weights is None:
        unique, per_size = np.unique(values, return_counts=True)
    else:
        w = np.asarray(weights, dtype=np.int64)
        if w.shape != values.shape:
            raise ValueError("weights must have one entry per size")
        if w.min() < 0:
            raise ValueError("weights must be non-negative")
        unique, inverse = np.unique(values, return_inverse=True)
        per_size = np.bincount(inverse, weights=w).astype(np.int64)
        keep = per_size > 0
        unique, per_size = unique[keep], per_size[keep]
        if unique.size == 0:
            raise EmptyInputError("every weight is zero")

    counts = np.cumsum(per_size[::-1])[::-1]
    points = [EcdfPoint(s=int(s), count=int(c)) for s, c in zip(unique, counts)]
    curve = CcdfCurve(
        measure=Measure(measure),
        n_inputs=int(values.size),
        weighted=weights is not None,
        points=points,
    )
    logger.debug(f"Built {curve.measure.value} ccdf with {len(points)} points from {values.size} sizes")
    return curve


def fit_loglog(
    s: Sequence[float],
    counts: Sequence[float],
    fit_range: Optional[Tuple[float, float]] = None,
    allow_constant_response: bool = False,
) -> LinearFit:
    """OLS of ln(count) on ln(s) for positive reals."""
    x = np.log(np.asarray(s, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    return ols(x, y, allow_constant_response=allow_constant_response, fit_range=fit_range)


def fit_tail(
    points: PointsLike,
    s_min: float = DEFAULT_FIT_RANGE[0],
    s_max: float = DEFAULT_FIT_RANGE[1],
) -> LinearFit:
    """Power-law fit of the ccdf points with s in [s_min, s_max].

    Args:
        points: ccdf points or curve
        s_min: Smallest size included
        s_max: Largest size included

    Returns:
        LinearFit whose slope is the ccdf exponent; the p value is clamped at
        2.2e-16 and flagged when below it

    Raises:
        FitRangeError: If fewer than 3 points fall in the range
        DegenerateFitError: If every point has the same size (``zero_variance == "x"``) or the
            counts in range are all equal (``zero_variance == "y"``)
    """
    if s_min > s_max:
        raise ValueError(f"s_min {s_min} exceeds s_max {s_max}")
    pts = _points(points)
    if len({p.s for p in pts}) == 1:
        raise DegenerateFitError(
            ERROR_MESSAGES["degenerate_fit"].format(reason=f"every input has size {pts[0].s}"),
            zero_variance="x",
        )
    selected = [p for p in pts if s_min <= p.s <= s_max]
    if len(selected) < MIN_FIT_POINTS:
        raise FitRangeError(
            ERROR_MESSAGES["fit_range"].format(
                minimum=MIN_FIT_POINTS, s_min=s_min, s_max=s_max, found=len(selected)
            ),
            s_min=s_min,
            s_max=s_max,
            found=len(selected),
        )
    fit = fit_loglog(
        [p.s for p in selected], [p.count for p in selected], fit_range=(float(s_min), float(s_max))
    )
    logger.info(
        f"Tail fit over [{s_min}, {s_max}]: slope={fit.slope:.4f} ± {fit.slope_stderr:.4f}, "
        f"R²={fit.r_squared:.4f}, n={fit.n_points}"
    )
    return fit


def _segment_fit(selected: List[EcdfPoint]) -> LinearFit:
    return fit_loglog([p.s for p in selected], [p.count for p in selected], allow_constant_response=True)


def _knee_index(x: np.ndarray, y: np.ndarray) -> int:
    """Index where a flat segment followed by a straight segment fits best.

    Candidate k puts points [0, k) on a constant and [k, n) on a line; the first
    k attaining the smallest total squared residual is returned.
    """
    n = x.size
    zero = np.zeros(1)
    cy = np.concatenate([zero, np.cumsum(y)])
    cyy = np.concatenate([zero, np.cumsum(y * y)])
    cx = np.concatenate([zero, np.cumsum(x)])
    cxx = np.concatenate([zero, np.cumsum(x * x)])
    cxy = np.concatenate([zero, np.cumsum(x * y)])

    ks = np.arange(0, n - 1)
    head = ks.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        flat = np.where(head > 0, cyy[ks] - cy[ks] ** 2 / np.maximum(head, 1.0), 0.0)
        m = (n - ks).astype(float)
        sx = cx[n] - cx[ks]
        sy = cy[n] - cy[ks]
        sxx = (cxx[n] - cxx[ks]) - sx * sx / m
        syy = (cyy[n] - cyy[ks]) - sy * sy / m
        sxy = (cxy[n] - cxy[ks]) - sx * sy / m
        line = np.where(sxx > 0, syy - sxy * sxy / np.where(sxx > 0, sxx, 1.0), np.maximum(syy, 0.0))
    total = np.maximum(flat, 0.0) + np.maximum(line, 0.0)
    scale = float(np.sum((y - y.mean()) ** 2))
    best = float(total.min())
    tolerance = 1e-9 * max(1.0, scale)
    return int(np.argmax(total <= best + tolerance))


def predicted_shape_check(points: PointsLike) -> ShapeReport:
    """Check a ccdf for the flat-head / power-tail shape.

    The head is the smallest decade of sizes, the tail the largest, each widened
    to at least 3 points. The knee is where a flat-plus-power two-segment fit has
    the smallest squared residual.

    Raises:
        InsufficientDataError: If there are fewer than 10 distinct sizes
    """
    pts = sorted(_points(points), key=lambda p: p.s)
    distinct = len({p.s for p in pts})
    if distinct < MIN_SHAPE_POINTS:
        raise InsufficientDataError(
            f"shape check needs at least {MIN_SHAPE_POINTS} distinct sizes, got {distinct}"
        )

    s0 = pts[0].s
    head = [p for p in pts if p.s <= 10 * s0]
    if len(head) < MIN_FIT_POINTS:
        head = pts[:MIN_FIT_POINTS]
    top = pts[-1].s
    tail = [p for p in pts if p.s * 10 >= top]
    if len(tail) < MIN_FIT_POINTS:
        tail = pts[-MIN_FIT_POINTS:]

    head_fit = _segment_fit(head)
    tail_fit = _segment_fit(tail)

    x = np.log(np.array([p.s for p in pts], dtype=float))
    y = np.log(np.array([p.count for p in pts], dtype=float))
    knee = pts[_knee_index(x, y)].s

    report = ShapeReport(
        head_flatness=abs(head_fit.slope),
        head_slope=head_fit.slope,
        head_range=(head[0].s, head[-1].s),
        tail_slope=tail_fit.slope,
        tail_range=(tail[0].s, tail[-1].s),
        tail_fit=tail_fit,
        tail_degenerate=tail_fit.degenerate,
        knee_estimate=knee,
    )
    logger.debug(
        f"Shape: head slope {report.head_slope:.3f}, tail slope {report.tail_slope:.3f}, knee {knee}"
    )
    return report


def tail_beyond(points: PointsLike, s_from: int) -> Optional[LinearFit]:
    """Fit of the points at or above ``s_from``, or None with fewer than 3 of them."""
    selected = [p for p in _points(points) if p.s >= s_from]
    if len(selected) < MIN_FIT_POINTS:
        return None
    return _segment_fit(selected)


def decades(s_low: float, s_high: float) -> float:
    """Number of decades between two sizes."""
    return math.log10(s_high / s_low)
