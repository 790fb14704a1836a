"""
Interpolating B-spline machinery for longitude/latitude smoothing.

Global interpolation recipe: chord-length parameters, clamped knot vector
by averaging, a banded collocation solve for the control points, and
de Boor's triangular recursion for evaluation. Points are plain planar
(lon, lat) pairs in degrees.
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.linalg import LinAlgError, solve_banded

from flightplay.exceptions import DomainError, NumericError

logger = logging.getLogger(__name__)

DEFAULT_DEGREE = 3
DUPLICATE_STEP = 1e-9
# rcond below this is treated as singular
MIN_RECIPROCAL_CONDITION = 1e-14

Point2 = Tuple[float, float]


class SplineCurve(BaseModel):
    """Clamped B-spline curve in the (lon, lat) plane"""
    model_config = ConfigDict(frozen=True)

    degree: int = Field(..., ge=1)
    knots: Tuple[float, ...]
    control_points: Tuple[Point2, ...]

    @model_validator(mode='after')
    def validate_knots(self):
        p = self.degree
        n = len(self.control_points)
        if n < p + 1:
            raise ValueError(f'degree {p} needs at least {p + 1} control points, got {n}')
        if len(self.knots) != n + p + 1:
            raise ValueError(f'expected {n + p + 1} knots, got {len(self.knots)}')
        if any(b < a for a, b in zip(self.knots, self.knots[1:])):
            raise ValueError('knots must be nondecreasing')
        if len(set(self.knots[:p + 1])) != 1 or len(set(self.knots[-(p + 1):])) != 1:
            raise ValueError('knot vector must be clamped')
        if self.knots[0] != 0.0 or self.knots[-1] != 1.0:
            raise ValueError('knot vector must span [0, 1]')
        return self


def degree_for(count: int, preferred: int = DEFAULT_DEGREE) -> int:
    """Degrade the preferred degree when there are too few points"""
    if count < 2:
        raise DomainError("At least 2 points are needed for a curve", {'count': count})
    return min(preferred, count - 1)


def chord_length_params(data_points: Sequence[Point2]) -> List[float]:
    """
    Chord-length parameterization of data points onto [0, 1].

    Consecutive duplicates get a step of 1e-9 of the total chord length so
    the parameters stay strictly increasing.

    Raises:
        DomainError: Fewer than 2 points, or all points identical
    """
    if len(data_points) < 2:
        raise DomainError("Chord-length parameters need at least 2 points", {'count': len(data_points)})

    pts = np.asarray(data_points, dtype=float)
    chords = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    total = float(chords.sum())
    if total == 0.0:
        raise DomainError("All data points coincide", {'count': len(data_points)})

    duplicates = chords == 0.0
    if duplicates.any():
        logger.debug(f"Perturbing {int(duplicates.sum())} duplicate consecutive points")
        chords = np.where(duplicates, DUPLICATE_STEP * total, chords)

    cumulative = np.concatenate(([0.0], np.cumsum(chords)))
    params = cumulative / cumulative[-1]
    params[-1] = 1.0
    return [float(u) for u in params]


def averaging_knots(params: Sequence[float], degree: int) -> List[float]:
    """
    Clamped knot vector by averaging consecutive parameters.

    Interior knot j (1 <= j <= n - p - 1) is the mean of params[j .. j+p-1].

    Raises:
        DomainError: If there are fewer than degree + 1 parameters
    """
    n = len(params)
    p = degree
    if p < 1:
        raise DomainError("Degree must be at least 1", {'degree': p})
    if n < p + 1:
        raise DomainError(
            f"Degree {p} needs at least {p + 1} parameters",
            {'count': n, 'degree': p},
        )

    interior = [sum(params[j:j + p]) / p for j in range(1, n - p)]
    return [0.0] * (p + 1) + interior + [1.0] * (p + 1)


def find_span(knots: Sequence[float], degree: int, n: int, t: float) -> int:
    """Index of the knot span containing t, with t = 1 mapped to the last span"""
    if t >= knots[n]:
        return n - 1
    low, high = degree, n
    mid = (low + high) // 2
    while t < knots[mid] or t >= knots[mid + 1]:
        if t < knots[mid]:
            high = mid
        else:
            low = mid
        mid = (low + high) // 2
    return mid


def basis_functions(span: int, t: float, degree: int, knots: Sequence[float]) -> List[float]:
    """
    Nonzero basis functions N[span-p .. span] at t (Cox-de Boor recursion).
    """
    values = [1.0] + [0.0] * degree
    left = [0.0] * (degree + 1)
    right = [0.0] * (degree + 1)
    for j in range(1, degree + 1):
        left[j] = t - knots[span + 1 - j]
        right[j] = knots[span + j] - t
        saved = 0.0
        for r in range(j):
            temp = values[r] / (right[r + 1] + left[j - r])
            values[r] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        values[j] = saved
    return values


def solve_interpolating_control_points(
    data_points: Sequence[Point2],
    params: Sequence[float],
    knots: Sequence[float],
    degree: int,
) -> List[Point2]:
    """
    Solve the collocation system so the curve passes through every data point.

    The collocation matrix has at most degree + 1 nonzeros per row around the
    diagonal, so it is solved in banded form.

    Raises:
        DomainError: Inconsistent sizes
        NumericError: Singular or ill-conditioned system
    """
    n = len(data_points)
    p = degree
    if len(params) != n or len(knots) != n + p + 1:
        raise DomainError(
            "Inconsistent collocation sizes",
            {'points': n, 'params': len(params), 'knots': len(knots), 'degree': p},
        )

    matrix = np.zeros((n, n))
    for k, t in enumerate(params):
        span = find_span(knots, p, n, t)
        matrix[k, span - p:span + 1] = basis_functions(span, t, p, knots)

    banded = np.zeros((2 * p + 1, n))
    for i in range(n):
        for j in range(max(0, i - p), min(n, i + p + 1)):
            banded[p + i - j, j] = matrix[i, j]

    rhs = np.asarray(data_points, dtype=float)
    try:
        solution = solve_banded((p, p), banded, rhs)
    except (LinAlgError, ValueError) as e:
        raise NumericError(f"Collocation system is singular: {e}", {'points': n}) from e

    if not np.all(np.isfinite(solution)):
        raise NumericError("Collocation solve produced non-finite control points", {'points': n})

    rcond = 1.0 / np.linalg.cond(matrix, 1) if n > 1 else 1.0
    if rcond < MIN_RECIPROCAL_CONDITION:
        raise NumericError("Collocation system is ill-conditioned", {'points': n, 'rcond': rcond})

    return [(float(x), float(y)) for x, y in solution]


def de_boor(curve: SplineCurve, t: float) -> Point2:
    """
    Evaluate a curve at parameter t with de Boor's algorithm.

    Raises:
        DomainError: If t is outside [0, 1]
    """
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"Curve parameter {t} outside [0, 1]", {'t': t})

    p = curve.degree
    knots = curve.knots
    points = curve.control_points
    n = len(points)
    span = find_span(knots, p, n, t)

    d = [list(points[j + span - p]) for j in range(p + 1)]
    for r in range(1, p + 1):
        for j in range(p, r - 1, -1):
            i = j + span - p
            alpha = (t - knots[i]) / (knots[i + 1 + p - r] - knots[i])
            d[j][0] = (1.0 - alpha) * d[j - 1][0] + alpha * d[j][0]
            d[j][1] = (1.0 - alpha) * d[j - 1][1] + alpha * d[j][1]
    return (d[p][0], d[p][1])


def sample_curve(curve: SplineCurve, param_list: Sequence[float]) -> List[Point2]:
    """Evaluate a curve at each parameter, preserving order"""
    return [de_boor(curve, t) for t in param_list]


class InterpolatingBSpline:
    """
    Stateful interpolating B-spline over shape points.

    Holds the shape points, the node (knot) vector, the solved control
    points and the most recently sampled curve points.
    """

    def __init__(self, shape_points: Sequence[Point2], degree: int = DEFAULT_DEGREE):
        self.shape_points: List[Point2] = [(float(x), float(y)) for x, y in shape_points]
        self.degree = degree_for(len(self.shape_points), degree)
        self.params: List[float] = []
        self.node_vector: List[float] = []
        self.control_points: List[Point2] = []
        self.bspline_points: List[Point2] = []
        self._curve = None

    def cal_node_vector(self) -> List[float]:
        self.params = chord_length_params(self.shape_points)
        self.node_vector = averaging_knots(self.params, self.degree)
        return self.node_vector

    def cal_control_points(self) -> List[Point2]:
        if not self.node_vector:
            self.cal_node_vector()
        self.control_points = solve_interpolating_control_points(
            self.shape_points, self.params, self.node_vector, self.degree
        )
        self._curve = SplineCurve(
            degree=self.degree,
            knots=tuple(self.node_vector),
            control_points=tuple(self.control_points),
        )
        return self.control_points

    def fit(self) -> SplineCurve:
        """Compute knots and control points; returns the curve"""
        self.cal_node_vector()
        self.cal_control_points()
        return self._curve

    @property
    def curve(self) -> SplineCurve:
        if self._curve is None:
            self.fit()
        return self._curve

    def evaluate(self, t: float) -> Point2:
        return de_boor(self.curve, t)

    def sample(self, params: Sequence[float]) -> List[Point2]:
        self.bspline_points = sample_curve(self.curve, params)
        return self.bspline_points

    def sample_uniform(self, count: int) -> List[Point2]:
        """Sample count points at evenly spaced parameters including both ends"""
        if count < 2:
            raise DomainError("Uniform sampling needs at least 2 points", {'count': count})
        return self.sample([k / (count - 1) for k in range(count)])

    def __repr__(self) -> str:
        return f"InterpolatingBSpline(points={len(self.shape_points)}, degree={self.degree})"


def fit_interpolating_curve(
    data_points: Sequence[Point2],
    degree: int = DEFAULT_DEGREE,
) -> Tuple[SplineCurve, List[float]]:
    """
    Build the interpolating curve for data points.

    Returns:
        The curve and the parameter of each data point
    """
    spline = InterpolatingBSpline(data_points, degree)
    return spline.fit(), spline.params
