"""B-spline curves: Cox-de Boor basis recursion, a de Boor evaluation
oracle, and uniform curve sampling.

Conventions used throughout:

* knot vectors are clamped by default (degree+1 repeated end knots), so
  curves interpolate both end control points;
* any Cox-de Boor term with a zero denominator contributes 0;
* the evaluation domain is ``[t_k, t_{m-k}]`` and the last non-empty span
  is treated as closed, so the right endpoint evaluates to the last
  control point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KnotValidation:
    """Report from :func:`validate_knots`; ``ok`` is the conjunction."""

    monotone: bool
    count_ok: bool
    expected_count: int
    actual_count: int

    @property
    def ok(self) -> bool:
        return self.monotone and self.count_ok


def validate_knots(knots, n: int, k: int) -> KnotValidation:
    """Check monotonicity and the count relation len(knots) == n + k + 2.

    Never raises and never mutates; callers decide what to do with a
    failing report.
    """
    arr = np.asarray(knots, dtype=float)
    monotone = bool(np.all(np.diff(arr) >= 0.0)) if arr.size > 1 else True
    expected = n + k + 2
    return KnotValidation(
        monotone=monotone,
        count_ok=int(arr.size) == expected,
        expected_count=expected,
        actual_count=int(arr.size),
    )


def make_clamped_knots(n_ctrl: int, degree: int, start: float = 0.0, end: float = 1.0) -> np.ndarray:
    """Clamped knot vector with uniformly spaced interior knots.

    Args:
        n_ctrl: number of control points (must exceed the degree).
        degree: spline degree k >= 1.
        start, end: parameter domain.

    Returns:
        Array of length ``n_ctrl + degree + 1``.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if n_ctrl < degree + 1:
        raise ValueError(f"need at least {degree + 1} control points for degree {degree}")
    if not end > start:
        raise ValueError("end must exceed start")
    n_interior = n_ctrl - degree - 1
    interior = np.linspace(start, end, n_interior + 2)[1:-1]
    return np.concatenate([np.full(degree + 1, start), interior, np.full(degree + 1, end)])


@dataclass(frozen=True)
class SplineCurve:
    """A planar B-spline: control points, knot vector, degree."""

    control_points: np.ndarray  # (n+1, 2)
    knots: np.ndarray           # (n+k+2,) non-decreasing
    degree: int = 3

    def __post_init__(self):
        cps = np.asarray(self.control_points, dtype=float)
        knots = np.asarray(self.knots, dtype=float)
        if cps.ndim != 2 or cps.shape[1] != 2:
            raise ValueError("control_points must have shape (n+1, 2)")
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        if cps.shape[0] < self.degree + 1:
            raise ValueError("need at least degree+1 control points")
        report = validate_knots(knots, cps.shape[0] - 1, self.degree)
        if not report.ok:
            raise ValueError(
                f"invalid knots: monotone={report.monotone}, "
                f"expected {report.expected_count} knots, got {report.actual_count}"
            )
        object.__setattr__(self, "control_points", cps)
        object.__setattr__(self, "knots", knots)

    @property
    def domain(self) -> tuple[float, float]:
        """Clamped evaluation interval [t_k, t_{m-k}]."""
        k = self.degree
        return float(self.knots[k]), float(self.knots[-k - 1])


def basis(i: int, k: int, t: float, knots) -> float:
    """B-spline basis function value B_{i,k}(t) by the Cox-de Boor recursion.

    Zero-denominator terms contribute 0, and the last non-empty span is
    closed so the domain's right endpoint is owned by exactly one degree-0
    function. Out-of-range ``i`` raises; ``t`` outside the knot range falls
    through to the degree-0 indicator and evaluates to 0.
    """
    arr = np.asarray(knots, dtype=float)
    m = arr.size - 1
    if k < 0:
        raise ValueError("degree must be >= 0")
    if not 0 <= i <= m - k - 1:
        raise ValueError(f"basis index {i} out of range for degree {k} and {m + 1} knots")
    dom_end = float(arr[m - k])
    return _basis_rec(i, k, float(t), arr, dom_end)


def _basis_rec(i: int, k: int, t: float, knots: np.ndarray, dom_end: float) -> float:
    if k == 0:
        if knots[i] <= t < knots[i + 1]:
            return 1.0
        if t == dom_end and knots[i] < knots[i + 1] and knots[i + 1] == dom_end:
            return 1.0
        return 0.0
    out = 0.0
    left_den = knots[i + k] - knots[i]
    if left_den != 0.0:
        out += (t - knots[i]) / left_den * _basis_rec(i, k - 1, t, knots, dom_end)
    right_den = knots[i + k + 1] - knots[i + 1]
    if right_den != 0.0:
        out += (knots[i + k + 1] - t) / right_den * _basis_rec(i + 1, k - 1, t, knots, dom_end)
    return out


def _check_domain(curve: SplineCurve, t: float) -> None:
    lo, hi = curve.domain
    if not lo <= t <= hi:
        raise ValueError(f"parameter {t} outside curve domain [{lo}, {hi}]")


def eval_curve(curve: SplineCurve, t: float) -> np.ndarray:
    """Curve point sum_i c_i * B_{i,k}(t); raises for t outside the domain."""
    _check_domain(curve, t)
    weights = _basis_row(curve.knots, curve.degree, float(t))
    return weights @ curve.control_points


def _basis_row(knots: np.ndarray, k: int, t: float) -> np.ndarray:
    return _basis_matrix(knots, k, np.array([t]))[0]


def _basis_matrix(knots: np.ndarray, k: int, ts: np.ndarray) -> np.ndarray:
    """All degree-k basis values at each parameter, shape (len(ts), n+1).

    Bottom-up evaluation of the same recursion as :func:`basis`; every
    entry is the identical arithmetic expression, computed once.
    """
    m = knots.size - 1
    dom_end = knots[m - k]
    t = np.asarray(ts, dtype=float)[:, None]     # (T, 1)
    left = knots[:-1][None, :]                   # (1, m)
    right = knots[1:][None, :]
    b = ((left <= t) & (t < right)).astype(float)
    closed = (t == dom_end) & (left < right) & (right == dom_end)
    b = np.where(closed, 1.0, b)
    for d in range(1, k + 1):
        nb = m - d
        t_i = knots[:nb]
        t_id = knots[d:d + nb]
        t_i1 = knots[1:nb + 1]
        t_id1 = knots[d + 1:d + 1 + nb]
        with np.errstate(divide="ignore", invalid="ignore"):
            w1 = np.where(t_id != t_i, (t - t_i) / (t_id - t_i), 0.0)
            w2 = np.where(t_id1 != t_i1, (t_id1 - t) / (t_id1 - t_i1), 0.0)
        b = w1 * b[:, :nb] + w2 * b[:, 1:nb + 1]
    return b


def eval_curve_deboor(curve: SplineCurve, t: float) -> np.ndarray:
    """Evaluate by de Boor's knot-insertion algorithm.

    Independent of :func:`eval_curve`; the two agree to ~1e-12 and serve as
    cross-checks of each other.
    """
    _check_domain(curve, t)
    knots = curve.knots
    k = curve.degree
    j = _find_span(knots, k, float(t))
    d = [curve.control_points[j - k + r].copy() for r in range(k + 1)]
    for level in range(1, k + 1):
        for r in range(k, level - 1, -1):
            i = j - k + r
            denom = knots[i + k - level + 1] - knots[i]
            a = (t - knots[i]) / denom
            d[r] = (1.0 - a) * d[r - 1] + a * d[r]
    return d[k]


def _find_span(knots: np.ndarray, k: int, t: float) -> int:
    """Index j of the non-empty span [t_j, t_{j+1}) holding t; the last
    non-empty span for t at the right end of the domain."""
    m = knots.size - 1
    j = int(np.searchsorted(knots, t, side="right")) - 1
    j = min(j, m - k - 1)
    j = max(j, k)
    while j > k and knots[j] == knots[j + 1]:
        j -= 1
    return j


def sample_curve(curve: SplineCurve, count: int) -> np.ndarray:
    """Curve points at `count` parameters uniform over the domain, ends inclusive.

    Returns an array of shape (count, 2).
    """
    if count < 2:
        raise ValueError("count must be >= 2")
    lo, hi = curve.domain
    ts = np.linspace(lo, hi, count)
    return _basis_matrix(curve.knots, curve.degree, ts) @ curve.control_points
