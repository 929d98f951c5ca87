"""Stratified shell generation.

A shell is a stack of layer rings. Each ring starts from a fixed teardrop
outline built from two clamped cubic B-splines (top and bottom half), gets
its control points and interior knots perturbed with gaussian noise, is
sampled into a closed polyline, shrunk about its centroid by the in-growth
factor ``r**alpha``, and lifted to height ``alpha * d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import Rng
from .splines import SplineCurve, make_clamped_knots, sample_curve


class ShellGenerationError(RuntimeError):
    """Raised when a parameter set produces degenerate geometry."""


@dataclass(frozen=True)
class ShellParams:
    """Generator parameter set for one shell.

    ``mu1``/``sigma1`` drive control-point noise and ``mu2``/``sigma2``
    interior-knot noise, all expressed in the same units the ablation grid
    sweeps; draws are divided by ``noise_scale`` before being applied in
    model units. ``layer_range`` bounds the layer count, ``growth_rate`` is
    the per-layer in-growth factor in (0, 1], ``layer_depth`` the z spacing.
    """

    mu1: float = 150.0
    mu2: float = 150.0
    sigma1: float = 150.0
    sigma2: float = 15.0
    layer_range: tuple[int, int] = (15, 20)
    growth_rate: float = 0.97
    layer_depth: float = 6.0
    noise_scale: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma1 < 0 or self.sigma2 < 0:
            raise ValueError("sigma1 and sigma2 must be >= 0")
        if not 0.0 < self.growth_rate <= 1.0:
            raise ValueError("growth_rate must be in (0, 1]")
        if self.layer_depth <= 0:
            raise ValueError("layer_depth must be > 0")
        lo, hi = self.layer_range
        if lo < 1 or hi < lo:
            raise ValueError("layer_range must satisfy 1 <= lo <= hi")
        if self.noise_scale <= 0:
            raise ValueError("noise_scale must be > 0")


@dataclass(frozen=True)
class LayerRing:
    """One layer's closed polyline; points are (P, 3), counterclockwise
    from +z, all sharing z == alpha * layer_depth. The final point does
    not repeat the first."""

    alpha: int
    points: np.ndarray


@dataclass(frozen=True)
class BaseOutline:
    """Two half-curves sharing their first and last control points exactly."""

    top: SplineCurve
    bottom: SplineCurve

    def __post_init__(self):
        t, b = self.top.control_points, self.bottom.control_points
        if not (np.array_equal(t[0], b[0]) and np.array_equal(t[-1], b[-1])):
            raise ValueError("top and bottom halves must share end control points")


# Teardrop outline, right tip (umbo) at x=1000, broad end near x=0.
# Traversing the top half forward and the bottom half in reverse yields a
# counterclockwise simple polygon. Knots span [0, 1000].
_TOP_CONTROL = (
    (1000.0, 0.0),
    (965.0, 95.0),
    (820.0, 230.0),
    (560.0, 300.0),
    (300.0, 290.0),
    (90.0, 180.0),
    (0.0, 10.0),
)
_BOTTOM_CONTROL = (
    (1000.0, 0.0),
    (955.0, -85.0),
    (800.0, -215.0),
    (540.0, -300.0),
    (285.0, -275.0),
    (95.0, -170.0),
    (0.0, 10.0),
)
_OUTLINE_DEGREE = 3
_OUTLINE_KNOT_SPAN = (0.0, 1000.0)


def canonical_base_outline() -> BaseOutline:
    """The fixed oyster-like outline every shell starts from.

    Two 7-point clamped cubics over [0, 1000]; identical on every call.
    """
    knots = make_clamped_knots(len(_TOP_CONTROL), _OUTLINE_DEGREE, *_OUTLINE_KNOT_SPAN)
    top = SplineCurve(np.array(_TOP_CONTROL), knots, _OUTLINE_DEGREE)
    bottom = SplineCurve(np.array(_BOTTOM_CONTROL), knots.copy(), _OUTLINE_DEGREE)
    return BaseOutline(top=top, bottom=bottom)


def perturb_curve(
    base: SplineCurve,
    rng: Rng,
    params: ShellParams,
    end_offsets: tuple[np.ndarray, np.ndarray] | None = None,
) -> SplineCurve:
    """Gaussian-perturb a curve's control points and interior knots.

    Draw order: one N(mu1, sigma1^2) pair (x then y) per control point in
    index order, then one N(mu2, sigma2^2) per interior knot. Raw draws are
    divided by ``params.noise_scale``. When ``end_offsets`` is given, the
    first and last control points use those raw offsets instead of drawing,
    which is how an outline keeps its two halves joined.

    Perturbed interior knots are re-sorted and clipped into the domain, and
    the clamped end multiplicities are untouched, so the result is always a
    valid curve.
    """
    scale = params.noise_scale
    cps = base.control_points.copy()
    last = cps.shape[0] - 1
    for j in range(cps.shape[0]):
        if end_offsets is not None and j == 0:
            off = end_offsets[0]
        elif end_offsets is not None and j == last:
            off = end_offsets[1]
        else:
            off = (rng.normal(params.mu1, params.sigma1), rng.normal(params.mu1, params.sigma1))
        cps[j, 0] += off[0] / scale
        cps[j, 1] += off[1] / scale

    k = base.degree
    knots = base.knots.copy()
    lo, hi = knots[0], knots[-1]
    interior = knots[k + 1:-(k + 1)]
    for idx in range(interior.size):
        interior[idx] += rng.normal(params.mu2, params.sigma2) / scale
    interior.sort()
    np.clip(interior, lo, hi, out=interior)
    return SplineCurve(cps, knots, k)


def perturb_outline(outline: BaseOutline, rng: Rng, params: ShellParams) -> BaseOutline:
    """Perturb both halves, drawing the shared end offsets exactly once.

    Draw order: shared start offset (x, y), shared end offset (x, y), then
    the top curve's interior draws, then the bottom curve's.
    """
    start_off = np.array([rng.normal(params.mu1, params.sigma1),
                          rng.normal(params.mu1, params.sigma1)])
    end_off = np.array([rng.normal(params.mu1, params.sigma1),
                        rng.normal(params.mu1, params.sigma1)])
    ends = (start_off, end_off)
    top = perturb_curve(outline.top, rng, params, end_offsets=ends)
    bottom = perturb_curve(outline.bottom, rng, params, end_offsets=ends)
    return BaseOutline(top=top, bottom=bottom)


def build_layer(
    outline: BaseOutline,
    alpha: int,
    samples_per_half: int,
    rng: Rng,
    params: ShellParams,
) -> LayerRing:
    """Build one layer ring: perturb, sample, in-grow, lift.

    The ring concatenates the top half's samples with the bottom half's in
    reverse, dropping the two duplicated join points, giving
    ``2 * samples_per_half - 2`` points. In-growth scales the ring about
    its own centroid by ``growth_rate ** alpha``; z is the exact product
    ``alpha * layer_depth``.
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if samples_per_half < 8:
        raise ValueError("samples_per_half must be >= 8")
    perturbed = perturb_outline(outline, rng, params)
    top_pts = sample_curve(perturbed.top, samples_per_half)
    bottom_pts = sample_curve(perturbed.bottom, samples_per_half)
    ring = np.vstack([top_pts, bottom_pts[::-1][1:-1]])

    centroid = ring.mean(axis=0)
    factor = params.growth_rate ** alpha
    ring = centroid + (ring - centroid) * factor
    if float(np.max(np.abs(ring - ring[0]))) < 1e-9:
        raise ShellGenerationError(f"layer {alpha} collapsed to a point")

    z = float(alpha) * params.layer_depth
    points = np.column_stack([ring, np.full(ring.shape[0], z)])
    return LayerRing(alpha=alpha, points=points)


def layer_count(params: ShellParams) -> int:
    """The layer count :func:`generate_shell` will use for these params
    (the first draw of the shell's stream)."""
    return Rng(params.seed).randint(*params.layer_range)


def generate_shell(
    params: ShellParams,
    samples_per_half: int = 32,
    outline: BaseOutline | None = None,
) -> list[LayerRing]:
    """Generate all rings of one shell; pure function of its arguments.

    Draws the layer count L uniformly from ``layer_range``, then builds
    rings for alpha = 1..L from one sequential stream seeded by
    ``params.seed``.
    """
    if outline is None:
        outline = canonical_base_outline()
    rng = Rng(params.seed)
    total = rng.randint(*params.layer_range)
    return [build_layer(outline, alpha, samples_per_half, rng, params)
            for alpha in range(1, total + 1)]


def ring_roughness(ring: LayerRing) -> float:
    """Normalized spread of the ring: std of centroid distances over their
    mean. Zero for a perfect circle."""
    pts = ring.points[:, :2]
    if pts.shape[0] < 8:
        raise ValueError("ring must have at least 8 points")
    centroid = pts.mean(axis=0)
    dists = np.linalg.norm(pts - centroid, axis=1)
    mean = float(dists.mean())
    if mean == 0.0:
        raise ShellGenerationError("degenerate ring: zero mean radius")
    return float(dists.std()) / mean
